//! Dense complex-matrix helpers used face by face.

use faer::Mat;
use nalgebra::DMatrix;

use crate::fourier::{CMat, C64};

pub(crate) const EPS: f64 = f64::EPSILON;

/// Full SVD `m = U diag(s) V^H` with `s` descending.
///
/// Backed by faer: nalgebra's bidiagonal iteration can stop early on faces
/// with exactly zero singular values and lose accuracy in the rest.
pub fn svd(m: &CMat) -> (CMat, Vec<f64>, CMat) {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return (CMat::identity(rows, rows), Vec::new(), CMat::identity(cols, cols));
    }
    let fm = Mat::<C64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let d = fm.svd().expect("svd converges");
    let u = CMat::from_fn(rows, rows, |i, j| d.U()[(i, j)]);
    let v = CMat::from_fn(cols, cols, |i, j| d.V()[(i, j)]);
    let s = d.S().column_vector().iter().map(|z| z.re).collect();
    (u, s, v)
}

/// Full SVD of a real matrix, real bases.
pub fn svd_real(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return (DMatrix::identity(rows, rows), Vec::new(), DMatrix::identity(cols, cols));
    }
    let fm = Mat::<f64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let d = fm.svd().expect("svd converges");
    let u = DMatrix::from_fn(rows, rows, |i, j| d.U()[(i, j)]);
    let v = DMatrix::from_fn(cols, cols, |i, j| d.V()[(i, j)]);
    let s = d.S().column_vector().iter().copied().collect();
    (u, s, v)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    let fm = Mat::<C64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let mut s = fm.singular_values().expect("svd converges");
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Default numerical-rank threshold `max(m, n) * eps * sigma_max`.
pub fn default_rank_tol(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * EPS * sigma_max
}

pub fn rank_with_tol(sigma: &[f64], tol: f64) -> usize {
    sigma.iter().filter(|&&s| s > tol).count()
}

/// Moore-Penrose inverse by SVD, dropping singular values `<= tol`
/// (`tol = None` uses [`default_rank_tol`]).
pub fn pinv(m: &CMat, tol: Option<f64>) -> CMat {
    let (rows, cols) = m.shape();
    let (u, s, v) = svd(m);
    let smax = s.first().copied().unwrap_or(0.0);
    let tol = tol.unwrap_or_else(|| default_rank_tol(rows, cols, smax));
    let r = rank_with_tol(&s, tol);
    let mut vs = v.columns(0, r).into_owned();
    for (k, mut col) in vs.column_iter_mut().enumerate() {
        col.scale_mut(1.0 / s[k]);
    }
    vs * u.columns(0, r).adjoint()
}

/// Orthonormal basis (columns) of the column space, plus a basis of its
/// orthogonal complement, from a full SVD with the default tolerance.
pub fn range_and_complement(m: &CMat) -> (CMat, CMat) {
    let (rows, cols) = m.shape();
    let (u, s, _) = svd(m);
    let smax = s.first().copied().unwrap_or(0.0);
    let r = rank_with_tol(&s, default_rank_tol(rows, cols, smax));
    (u.columns(0, r).into_owned(), u.columns(r, rows - r).into_owned())
}

pub fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

pub fn real_part(m: &CMat) -> DMatrix<f64> {
    m.map(|z| z.re)
}

/// Unitary `n x n` factor of a QR decomposition (real when `m` is real).
pub fn unitary_from(m: CMat) -> CMat {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "unitary_from needs a square matrix");
    m.qr().q()
}
