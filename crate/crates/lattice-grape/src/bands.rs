//! Bloch bands of the 1-D optical lattice.
//!
//! The dimensionless single-atom Hamiltonian is `p^2 + (r/2)(1 - cos 2x)`
//! with energies in recoil units and lengths in 1/k_L, so the lattice period
//! is pi and the reciprocal vector is 2. Fixing the quasimomentum k in the
//! first Brillouin zone (-1, 1] and expanding the periodic part on plane
//! waves e^{i 2 n x}, n = -N..N, gives a real symmetric tridiagonal matrix
//! per k: diagonal (2n - k)^2 + r/2, first off-diagonals -r/4.
//!
//! Everything here is a pure function of its inputs; a k-grid can be solved
//! from as many threads as desired.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Reduced Planck constant in J s, used only by [`recoil_units`].
pub const HBAR: f64 = 1.054571817e-34;

/// Defining parameters of the lattice Hamiltonian family H^(k).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    /// Potential depth in recoil energies.
    pub r: f64,
    /// Half-width N of the plane-wave basis e^{i 2 n x}, n in [-N, N].
    pub n_planewaves: usize,
    /// Number of energy bands kept after diagonalization.
    pub n_bands: usize,
}

impl LatticeSpec {
    /// Spec with the default basis: N = 16 (33 plane waves), 6 bands.
    ///
    /// N = 16 keeps the lowest six bands converged to better than 1e-10
    /// for depths up to r = 120.
    pub fn new(r: f64) -> Self {
        Self { r, n_planewaves: 16, n_bands: 6 }
    }

    pub fn with_basis(r: f64, n_planewaves: usize, n_bands: usize) -> Self {
        Self { r, n_planewaves, n_bands }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.r.is_finite() || self.r < 0.0 {
            return Err(Error::InvalidDepth(self.r));
        }
        if self.n_bands < 2 {
            return Err(Error::TooFewBands(self.n_bands));
        }
        // the basis must be at least as large as the retained band count
        if self.basis_dim() < self.n_bands {
            return Err(Error::BasisTooSmall {
                n_planewaves: self.n_planewaves,
                n_bands: self.n_bands,
            });
        }
        Ok(())
    }

    /// Plane-wave basis dimension 2N + 1.
    pub fn basis_dim(&self) -> usize {
        2 * self.n_planewaves + 1
    }
}

/// Eigensolution of H^(k), truncated to the lowest `n_bands` states.
#[derive(Debug, Clone)]
pub struct BandSolution {
    /// Quasimomentum in units of hbar k_L.
    pub k: f64,
    /// Band energies E_n^(k) in recoil units, ascending.
    pub energies: Array1<f64>,
    /// Eigenvector columns in the plane-wave basis, ordered by energy.
    /// Phase convention: the largest-magnitude component of each column is
    /// real and positive.
    pub bloch_vectors: Array2<C64>,
}

/// cos(2x) and sin(2x) in the band eigenbasis at fixed k.
#[derive(Debug, Clone)]
pub struct ControlOperators {
    pub cos2x_band: Array2<C64>,
    pub sin2x_band: Array2<C64>,
}

/// Fractional variation of the 0-1 gap between zone center and zone edge.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DispersionReport {
    pub r: f64,
    #[serde(rename = "D")]
    pub d_value: f64,
    /// Delta E_01 at k = 0.
    pub gap_center: f64,
    /// Delta E_01 at k = 1.
    pub gap_edge: f64,
}

fn check_zone(k: f64) -> Result<()> {
    if !(k > -1.0 && k <= 1.0) {
        return Err(Error::OutOfZone(k));
    }
    Ok(())
}

/// Reduce an arbitrary quasimomentum into the first Brillouin zone (-1, 1].
pub fn reduce_to_zone(k: f64) -> f64 {
    k - 2.0 * ((k - 1.0) / 2.0).ceil()
}

/// The (2N+1)-dimensional matrix of H^(k) on the plane-wave basis.
pub fn build_hamiltonian(spec: &LatticeSpec, k: f64) -> Result<Array2<C64>> {
    spec.validate()?;
    check_zone(k)?;
    let dim = spec.basis_dim();
    let half = spec.n_planewaves as i64;
    let mut h = Array2::zeros((dim, dim));
    for i in 0..dim {
        let n = i as i64 - half;
        let kinetic = (2.0 * n as f64 - k).powi(2);
        h[(i, i)] = C64::new(kinetic + spec.r / 2.0, 0.0);
        if i + 1 < dim {
            h[(i, i + 1)] = C64::new(-spec.r / 4.0, 0.0);
            h[(i + 1, i)] = C64::new(-spec.r / 4.0, 0.0);
        }
    }
    Ok(h)
}

/// cos(2x) on the plane-wave basis: 1/2 on both first off-diagonals.
pub fn cos2x_planewave(dim: usize) -> Array2<C64> {
    let mut m = Array2::zeros((dim, dim));
    for i in 0..dim.saturating_sub(1) {
        m[(i, i + 1)] = C64::new(0.5, 0.0);
        m[(i + 1, i)] = C64::new(0.5, 0.0);
    }
    m
}

/// sin(2x) on the plane-wave basis: -i/2 above the diagonal, +i/2 below.
pub fn sin2x_planewave(dim: usize) -> Array2<C64> {
    let mut m = Array2::zeros((dim, dim));
    for i in 0..dim.saturating_sub(1) {
        m[(i, i + 1)] = C64::new(0.0, -0.5);
        m[(i + 1, i)] = C64::new(0.0, 0.5);
    }
    m
}

/// Diagonalize H^(k) and keep the lowest `n_bands` states.
pub fn solve_bands(spec: &LatticeSpec, k: f64) -> Result<BandSolution> {
    let h = build_hamiltonian(spec, k)?;
    let eig = linalg::eigh(&h)?;
    let dim = spec.basis_dim();
    let nb = spec.n_bands;
    let energies = eig.values.slice(ndarray::s![..nb]).to_owned();
    let mut vectors = eig.vectors.slice(ndarray::s![.., ..nb]).to_owned();
    // fix each column's phase: largest-magnitude component real positive
    for col in 0..nb {
        let mut best = 0usize;
        let mut best_mag = 0.0f64;
        for row in 0..dim {
            let mag = vectors[(row, col)].norm();
            if mag > best_mag {
                best_mag = mag;
                best = row;
            }
        }
        if best_mag > 0.0 {
            let phase = vectors[(best, col)] / best_mag;
            let fix = phase.conj();
            for row in 0..dim {
                vectors[(row, col)] *= fix;
            }
        }
    }
    Ok(BandSolution { k, energies, bloch_vectors: vectors })
}

/// Project cos(2x) and sin(2x) into the band eigenbasis of `bands`.
pub fn control_operators(spec: &LatticeSpec, bands: &BandSolution) -> Result<ControlOperators> {
    spec.validate()?;
    let dim = spec.basis_dim();
    let (rows, cols) = bands.bloch_vectors.dim();
    if rows != dim || cols != spec.n_bands {
        return Err(Error::DimensionMismatch(format!(
            "band solution has {rows}x{cols} eigenvector matrix, spec expects {dim}x{}",
            spec.n_bands
        )));
    }
    let cos_pw = cos2x_planewave(dim);
    let sin_pw = sin2x_planewave(dim);
    Ok(ControlOperators {
        cos2x_band: sandwich(&bands.bloch_vectors, &cos_pw),
        sin2x_band: sandwich(&bands.bloch_vectors, &sin_pw),
    })
}

/// B^dagger X B for an eigenvector matrix B (dim x n_bands).
fn sandwich(b: &Array2<C64>, x: &Array2<C64>) -> Array2<C64> {
    let (dim, nb) = b.dim();
    let mut xb = Array2::zeros((dim, nb));
    linalg::mul_into(x, b, &mut xb);
    let mut out = Array2::zeros((nb, nb));
    linalg::adj_mul_into(b, &xb, &mut out);
    out
}

/// Dispersion D = 1 - gap_edge / gap_center of the 0-1 transition.
pub fn dispersion(spec: &LatticeSpec) -> Result<DispersionReport> {
    let center = solve_bands(spec, 0.0)?;
    let edge = solve_bands(spec, 1.0)?;
    let gap_center = center.energies[1] - center.energies[0];
    let gap_edge = edge.energies[1] - edge.energies[0];
    Ok(DispersionReport {
        r: spec.r,
        d_value: 1.0 - gap_edge / gap_center,
        gap_center,
        gap_edge,
    })
}

/// One period of the 0-1 transition at k = 0, in units hbar / E_R.
///
/// This is the time unit all pulse durations are quoted in. A zero-depth
/// lattice has no trapped motion to oscillate, so r = 0 is rejected.
pub fn free_oscillation_period(spec: &LatticeSpec) -> Result<f64> {
    spec.validate()?;
    if spec.r == 0.0 {
        return Err(Error::DegenerateGap);
    }
    let report = dispersion(spec)?;
    if report.gap_center <= 0.0 {
        return Err(Error::DegenerateGap);
    }
    Ok(std::f64::consts::TAU / report.gap_center)
}

/// Band energies tabulated over a list of quasimomenta.
#[derive(Debug, Clone)]
pub struct BandScan {
    pub k_points: Vec<f64>,
    /// `energies[i][n]` is E_n at `k_points[i]`.
    pub energies: Vec<Array1<f64>>,
}

impl BandScan {
    /// `k,band,energy` rows, energies printed with 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,band,energy\n");
        for (k, bands) in self.k_points.iter().zip(&self.energies) {
            for (n, e) in bands.iter().enumerate() {
                out.push_str(&format!("{k},{n},{e:.11e}\n"));
            }
        }
        out
    }
}

/// Solve the bands on a list of quasimomenta. Points are reduced into the
/// first zone before solving, so a plotting grid may include k = -1.
pub fn band_scan(spec: &LatticeSpec, k_points: &[f64]) -> Result<BandScan> {
    let energies = k_points
        .iter()
        .map(|&k| Ok(solve_bands(spec, reduce_to_zone(k))?.energies))
        .collect::<Result<Vec<_>>>()?;
    Ok(BandScan { k_points: k_points.to_vec(), energies })
}

/// Map charge-qubit parameters onto lattice parameters.
///
/// Dividing the charge-qubit Hamiltonian `4 E_C (n - n_g)^2 - E_J cos(phi)`
/// by E_C and substituting phi -> 2x identifies it with H^(k) at depth
/// r = 2 E_J / E_C and quasimomentum k = 2 n_g (reduced into the zone).
/// Band energies then sit in units of E_C, up to an additive constant.
pub fn charge_qubit_map(e_j: f64, e_c: f64, n_g: f64) -> Result<(f64, f64)> {
    if e_c <= 0.0 {
        return Err(Error::NonPositive { name: "charging energy", value: e_c });
    }
    if e_j < 0.0 {
        return Err(Error::NonPositive { name: "Josephson energy", value: e_j });
    }
    Ok((2.0 * e_j / e_c, reduce_to_zone(2.0 * n_g)))
}

/// Dimensionless depth r = U_0 / E_R with E_R = hbar^2 k_L^2 / 2m.
pub fn recoil_units(u0: f64, mass: f64, k_laser: f64) -> Result<f64> {
    for (name, value) in [("trap depth", u0), ("mass", mass), ("laser wave number", k_laser)] {
        if !(value > 0.0) {
            return Err(Error::NonPositive { name, value });
        }
    }
    let recoil = HBAR * HBAR * k_laser * k_laser / (2.0 * mass);
    Ok(u0 / recoil)
}
