//! Independent numerical oracles shared by the integration tests.
//!
//! Nothing here calls into the crate's linear algebra or propagation code:
//! the Mathieu characteristic values come from Sturm-sequence bisection on
//! the classical cosine/sine recurrence matrices, and the brute-force
//! fidelity evaluates 2x2 slice exponentials through the closed Pauli
//! formula.

#![allow(dead_code)]

use num_complex::Complex64 as C64;

// ---------------------------------------------------------------- Mathieu

/// Number of eigenvalues of the symmetric tridiagonal matrix (diag, off)
/// strictly below x, by the Sturm LDL^T recurrence.
fn count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut p = diag[0] - x;
    if p < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let e2 = off[i - 1] * off[i - 1];
        let denom = if p.abs() < 1e-300 { 1e-300f64.copysign(p) } else { p };
        p = diag[i] - x - e2 / denom;
        if p < 0.0 {
            count += 1;
        }
    }
    count
}

/// j-th (ascending, 0-based) eigenvalue of a symmetric tridiagonal matrix
/// by bisection.
fn tridiag_eigenvalue(diag: &[f64], off: &[f64], j: usize) -> f64 {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i < n - 1 { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(diag, off, mid) > j {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-13 * hi.abs().max(lo.abs()).max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

const MATHIEU_BASIS: usize = 60;

/// Characteristic value a_m(q) of the even Mathieu function ce_m.
pub fn mathieu_a(m: usize, q: f64) -> f64 {
    let n = MATHIEU_BASIS;
    if m % 2 == 0 {
        // cos(2kz) series; the k = 0 row is rescaled by sqrt(2) to make the
        // matrix symmetric
        let diag: Vec<f64> = (0..n).map(|k| (2.0 * k as f64).powi(2)).collect();
        let mut off = vec![q; n - 1];
        off[0] = std::f64::consts::SQRT_2 * q;
        tridiag_eigenvalue(&diag, &off, m / 2)
    } else {
        // cos((2k+1)z) series
        let mut diag: Vec<f64> = (0..n).map(|k| (2.0 * k as f64 + 1.0).powi(2)).collect();
        diag[0] += q;
        let off = vec![q; n - 1];
        tridiag_eigenvalue(&diag, &off, (m - 1) / 2)
    }
}

/// Characteristic value b_m(q) of the odd Mathieu function se_m.
pub fn mathieu_b(m: usize, q: f64) -> f64 {
    let n = MATHIEU_BASIS;
    assert!(m >= 1);
    if m % 2 == 0 {
        // sin(2kz) series, k >= 1
        let diag: Vec<f64> = (1..=n).map(|k| (2.0 * k as f64).powi(2)).collect();
        let off = vec![q; n - 1];
        tridiag_eigenvalue(&diag, &off, m / 2 - 1)
    } else {
        // sin((2k+1)z) series
        let mut diag: Vec<f64> = (0..n).map(|k| (2.0 * k as f64 + 1.0).powi(2)).collect();
        diag[0] -= q;
        let off = vec![q; n - 1];
        tridiag_eigenvalue(&diag, &off, (m - 1) / 2)
    }
}

/// Band energies of the dimensionless lattice Hamiltonian at the zone
/// center (k = 0), from Mathieu characteristic values: the periodic
/// solutions are ce_even and se_even, shifted by r/2 with q = r/4.
pub fn band_edges_center(r: f64, n_bands: usize) -> Vec<f64> {
    let q = r / 4.0;
    let mut values = Vec::new();
    for n in 0..n_bands {
        values.push(mathieu_a(2 * n, q));
        values.push(mathieu_b(2 * n + 2, q));
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values.truncate(n_bands);
    values.iter().map(|a| a + r / 2.0).collect()
}

/// Band energies at the zone edge (k = 1): the antiperiodic solutions are
/// ce_odd and se_odd.
pub fn band_edges_edge(r: f64, n_bands: usize) -> Vec<f64> {
    let q = r / 4.0;
    let mut values = Vec::new();
    for n in 0..n_bands {
        values.push(mathieu_a(2 * n + 1, q));
        values.push(mathieu_b(2 * n + 1, q));
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values.truncate(n_bands);
    values.iter().map(|a| a + r / 2.0).collect()
}

// ----------------------------------------------------- real-space overlap

/// |<u_a| f(x) |u_b>| by periodic trapezoid quadrature over one lattice
/// period, with u_n(x) reconstructed from plane-wave coefficients. The
/// mapping of coefficient index to e^{i 2 m x} matches the convention
/// where the band Hamiltonian diagonal reads (2m - k)^2; only the absolute
/// value is convention-free, so that is what this returns.
pub fn real_space_overlap(
    coeff_a: &[C64],
    coeff_b: &[C64],
    f: impl Fn(f64) -> f64,
) -> f64 {
    let dim = coeff_a.len();
    let half = (dim - 1) / 2;
    let n_grid = 4096;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n_grid {
        let x = std::f64::consts::PI * i as f64 / n_grid as f64;
        let mut ua = C64::new(0.0, 0.0);
        let mut ub = C64::new(0.0, 0.0);
        for m in 0..dim {
            let harmonic = (m as f64 - half as f64) * 2.0;
            let wave = C64::from_polar(1.0, harmonic * x);
            ua += coeff_a[m] * wave;
            ub += coeff_b[m] * wave;
        }
        acc += ua.conj() * ub * f(x);
    }
    (acc / n_grid as f64).norm()
}

// ------------------------------------------------------------ brute force

pub type M2 = [[C64; 2]; 2];

pub fn m2_mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// exp(-i H dt) for a Hermitian 2x2 via the closed Pauli-decomposition
/// formula (no eigensolver involved).
pub fn pauli_exp(h: &M2, dt: f64) -> M2 {
    let a = 0.5 * (h[0][0].re + h[1][1].re);
    let bz = 0.5 * (h[0][0].re - h[1][1].re);
    let bx = h[0][1].re;
    let by = -h[0][1].im;
    let norm = (bx * bx + by * by + bz * bz).sqrt();
    let phase = C64::from_polar(1.0, -a * dt);
    let (cos, sinc) = if norm * dt == 0.0 {
        (1.0, dt)
    } else {
        ((norm * dt).cos(), (norm * dt).sin() / norm)
    };
    let i = C64::new(0.0, 1.0);
    [
        [
            phase * (cos - i * sinc * bz),
            phase * (-i) * sinc * C64::new(bx, -by),
        ],
        [
            phase * (-i) * sinc * C64::new(bx, by),
            phase * (cos + i * sinc * bz),
        ],
    ]
}

/// Straight-line re-implementation of the coherent ensemble fidelity for
/// two-band members: per member, multiply Pauli-formula slice exponentials
/// in time order, trace against V, and coherently average.
pub fn brute_force_phi(
    members: &[(Vec<f64>, M2, M2)], // (energies, cos2x, sin2x) per member
    weights: &[f64],
    alpha: &[f64],
    beta: &[f64],
    dt: f64,
    v: &M2,
) -> f64 {
    let mut sum = C64::new(0.0, 0.0);
    for ((energies, cos_op, sin_op), &w) in members.iter().zip(weights) {
        let mut u = [
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        ];
        for (&aj, &bj) in alpha.iter().zip(beta) {
            let mut h = [[C64::new(0.0, 0.0); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    h[i][j] = 2.0 * aj * cos_op[i][j] + 2.0 * bj * sin_op[i][j];
                }
                h[i][i] += energies[i];
            }
            u = m2_mul(&pauli_exp(&h, dt), &u);
        }
        let mut trace = C64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                trace += v[j][i].conj() * u[j][i];
            }
        }
        sum += trace * w;
    }
    sum.norm_sqr() / 4.0
}

/// Deterministic uniform pseudo-random stream for oracle-side sampling.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    /// uniform in [lo, hi)
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let unit = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * unit
    }

    pub fn index(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}
