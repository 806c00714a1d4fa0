//! Dense complex matrix helpers and a Hermitian eigensolver.
//!
//! Every matrix in this crate is small (at most 2N+1 = 33 plane waves, and
//! 6 bands in the hot propagation loops), so a cyclic Jacobi eigensolver is
//! both fast enough and numerically tight: eigenvectors come out orthonormal
//! to round-off, which is what keeps the propagators unitary downstream.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Eigendecomposition of a Hermitian matrix: real eigenvalues in ascending
/// order, eigenvector columns in matching order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Array1<f64>,
    pub vectors: Array2<C64>,
}

const MAX_SWEEPS: usize = 60;

/// Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// The strict lower triangle is ignored; the matrix is taken to be Hermitian
/// with the upper triangle authoritative.
pub fn eigh(a: &Array2<C64>) -> Result<HermitianEigen> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "eigh needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let mut w = a.clone();
    let ws = w.as_slice_mut().expect("standard layout");
    // symmetrize from the upper triangle so rounding in the caller cannot
    // leak into the iteration
    for i in 0..n {
        ws[i * n + i] = C64::new(ws[i * n + i].re, 0.0);
        for j in (i + 1)..n {
            ws[j * n + i] = ws[i * n + j].conj();
        }
    }
    let mut vecs = identity(n);
    let vs = vecs.as_slice_mut().expect("standard layout");

    let scale: f64 = ws.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);
    let tol = 1e-14 * scale;

    // pivots already this small cannot push the off-norm above tolerance
    let skip2 = (tol / n as f64).powi(2);
    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        if off_norm(ws, n) <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(ws, vs, n, p, q, skip2);
            }
        }
    }
    if !converged {
        return Err(Error::Eigensolver(format!(
            "Jacobi iteration did not reach tolerance after {MAX_SWEEPS} sweeps (off = {:.3e})",
            off_norm(ws, n)
        )));
    }
    Ok(sort_eigen(&w, &vecs))
}

fn off_norm(ws: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += ws[i * n + j].norm_sqr();
        }
    }
    (2.0 * s).sqrt()
}

/// One Jacobi rotation zeroing the (p, q) element of the Hermitian working
/// matrix, accumulated into the eigenvector columns.
#[inline]
fn rotate(ws: &mut [C64], vs: &mut [C64], n: usize, p: usize, q: usize, skip2: f64) {
    let apq = ws[p * n + q];
    let mag2 = apq.norm_sqr();
    if mag2 <= skip2 {
        return;
    }
    let mag = mag2.sqrt();
    let app = ws[p * n + p].re;
    let aqq = ws[q * n + q].re;
    // phase u = apq / |apq| so the remaining 2x2 problem is real
    let u = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let su = u * s;
    let su_conj = su.conj();

    for i in 0..n {
        if i == p || i == q {
            continue;
        }
        let aip = ws[i * n + p];
        let aiq = ws[i * n + q];
        let new_ip = aip * c - aiq * su_conj;
        let new_iq = aip * su + aiq * c;
        ws[i * n + p] = new_ip;
        ws[p * n + i] = new_ip.conj();
        ws[i * n + q] = new_iq;
        ws[q * n + i] = new_iq.conj();
    }
    let app_new = c * c * app - 2.0 * s * c * mag + s * s * aqq;
    let aqq_new = s * s * app + 2.0 * s * c * mag + c * c * aqq;
    ws[p * n + p] = C64::new(app_new, 0.0);
    ws[q * n + q] = C64::new(aqq_new, 0.0);
    ws[p * n + q] = C64::new(0.0, 0.0);
    ws[q * n + p] = C64::new(0.0, 0.0);

    for i in 0..n {
        let vip = vs[i * n + p];
        let viq = vs[i * n + q];
        vs[i * n + p] = vip * c - viq * su_conj;
        vs[i * n + q] = vip * su + viq * c;
    }
}

fn sort_eigen(w: &Array2<C64>, vecs: &Array2<C64>) -> HermitianEigen {
    let n = w.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps the rotation order deterministic for degenerate pairs
    order.sort_by(|&i, &j| w[(i, i)].re.partial_cmp(&w[(j, j)].re).unwrap());
    let mut values = Array1::zeros(n);
    let mut vectors = Array2::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        values[col] = w[(src, src)].re;
        for row in 0..n {
            vectors[(row, col)] = vecs[(row, src)];
        }
    }
    HermitianEigen { values, vectors }
}

pub fn identity(n: usize) -> Array2<C64> {
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        m[(i, i)] = C64::new(1.0, 0.0);
    }
    m
}

/// out = a * b
pub fn mul_into(a: &Array2<C64>, b: &Array2<C64>, out: &mut Array2<C64>) {
    let n = a.nrows();
    let m = b.ncols();
    let k = a.ncols();
    debug_assert_eq!(k, b.nrows());
    debug_assert_eq!(out.dim(), (n, m));
    let aa = a.as_slice().expect("standard layout");
    let bb = b.as_slice().expect("standard layout");
    let oo = out.as_slice_mut().expect("standard layout");
    for i in 0..n {
        for j in 0..m {
            oo[i * m + j] = C64::new(0.0, 0.0);
        }
        for t in 0..k {
            let aval = aa[i * k + t];
            if aval.re == 0.0 && aval.im == 0.0 {
                continue;
            }
            for j in 0..m {
                oo[i * m + j] += aval * bb[t * m + j];
            }
        }
    }
}

/// out = a^dagger * b
pub fn adj_mul_into(a: &Array2<C64>, b: &Array2<C64>, out: &mut Array2<C64>) {
    let k = a.nrows();
    let n = a.ncols();
    let m = b.ncols();
    debug_assert_eq!(k, b.nrows());
    debug_assert_eq!(out.dim(), (n, m));
    let aa = a.as_slice().expect("standard layout");
    let bb = b.as_slice().expect("standard layout");
    let oo = out.as_slice_mut().expect("standard layout");
    for i in 0..n {
        for j in 0..m {
            oo[i * m + j] = C64::new(0.0, 0.0);
        }
    }
    for t in 0..k {
        for i in 0..n {
            let aval = aa[t * n + i].conj();
            if aval.re == 0.0 && aval.im == 0.0 {
                continue;
            }
            for j in 0..m {
                oo[i * m + j] += aval * bb[t * m + j];
            }
        }
    }
}

/// out = a * b^dagger
pub fn mul_adj_into(a: &Array2<C64>, b: &Array2<C64>, out: &mut Array2<C64>) {
    let n = a.nrows();
    let k = a.ncols();
    let m = b.nrows();
    debug_assert_eq!(k, b.ncols());
    debug_assert_eq!(out.dim(), (n, m));
    let aa = a.as_slice().expect("standard layout");
    let bb = b.as_slice().expect("standard layout");
    let oo = out.as_slice_mut().expect("standard layout");
    for i in 0..n {
        for j in 0..m {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..k {
                acc += aa[i * k + t] * bb[j * k + t].conj();
            }
            oo[i * m + j] = acc;
        }
    }
}

pub fn matmul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let mut out = Array2::zeros((a.nrows(), b.ncols()));
    mul_into(a, b, &mut out);
    out
}

pub fn adjoint(a: &Array2<C64>) -> Array2<C64> {
    let (n, m) = a.dim();
    let mut out = Array2::zeros((m, n));
    for i in 0..n {
        for j in 0..m {
            out[(j, i)] = a[(i, j)].conj();
        }
    }
    out
}

/// max_ij |(U^dagger U - I)_ij|
pub fn unitarity_defect(u: &Array2<C64>) -> f64 {
    let n = u.ncols();
    let mut prod = Array2::zeros((n, n));
    adj_mul_into(u, u, &mut prod);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { 1.0 } else { 0.0 };
            let d = (prod[(i, j)] - C64::new(expect, 0.0)).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// max_ij |(A - A^dagger)_ij|
pub fn hermiticity_defect(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// max_ij |(A - B)_ij|
pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
