//! Face-wise inverse, Moore-Penrose inverse, multirank and range projections.

use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Result, TensorError};
use crate::fourier::{from_faces, to_faces, FourierFaces};
use crate::linalg::{self, EPS};
use crate::tensor::Tensor3;

/// Safety factor on the inversion threshold `n * eps * ||A||_2 * 1e3`.
const INV_TOL_FACTOR: f64 = 1e3;

/// Per-face numerical ranks of the Fourier faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiRank {
    pub ranks: Vec<usize>,
    /// Threshold applied to each face's singular values.
    pub thresholds: Vec<f64>,
}

impl MultiRank {
    pub fn total(&self) -> usize {
        self.ranks.iter().sum()
    }

    /// Same rank vector, regardless of thresholds.
    pub fn same_ranks(&self, other: &MultiRank) -> bool {
        self.ranks == other.ranks
    }

    pub fn is_full_column_rank(&self, n2: usize) -> bool {
        self.ranks.iter().all(|&r| r == n2)
    }
}

/// Default rank threshold for a face set: `max(n1, n2) * n3 * eps * ||A||_2`,
/// the usual matrix threshold applied to `bcirc(A)`.
///
/// The reference is the largest singular value over all faces, not the
/// face's own, so a face that is pure round-off counts as rank zero. The `n3`
/// factor covers the rounding of the length-`n3` transform.
pub fn default_tol(faces: &FourierFaces) -> f64 {
    let d = faces.dims();
    linalg::default_rank_tol(d.n1 * d.n3, d.n2 * d.n3, faces_spectral_norm(faces))
}

pub(crate) fn faces_spectral_norm(faces: &FourierFaces) -> f64 {
    (0..=faces.dims().n3 / 2)
        .map(|i| linalg::spectral_norm(faces.face(i)))
        .fold(0.0, f64::max)
}

/// Multirank of `A`: the number of singular values of each face above `tol`
/// (default [`default_tol`]).
pub fn multirank(a: &Tensor3, tol: Option<f64>) -> MultiRank {
    if let Some(t) = tol {
        assert!(t > 0.0, "rank tolerance must be positive");
    }
    let faces = to_faces(a);
    let t = tol.unwrap_or_else(|| default_tol(&faces));
    let ranks = faces
        .faces()
        .iter()
        .map(|f| linalg::rank_with_tol(&linalg::singular_values(f), t))
        .collect::<Vec<_>>();
    let thresholds = vec![t; ranks.len()];
    MultiRank { ranks, thresholds }
}

/// Inverse of a square tensor, face by face.
///
/// A face is refused when its smallest singular value is at most
/// `n * eps * ||A||_2 * 1e3`.
pub fn inv(a: &Tensor3) -> Result<Tensor3> {
    inv_named(a, "tensor")
}

pub(crate) fn inv_named(a: &Tensor3, operand: &'static str) -> Result<Tensor3> {
    from_faces(&inv_faces(&to_faces(a), operand)?)
}

pub(crate) fn inv_faces(faces: &FourierFaces, operand: &'static str) -> Result<FourierFaces> {
    let dims = faces.dims();
    if dims.n1 != dims.n2 {
        return Err(mismatch("inv", "square faces", dims));
    }
    let n = dims.n1;
    let smax = faces_spectral_norm(faces);
    for i in 0..=dims.n3 / 2 {
        let s = linalg::singular_values(faces.face(i));
        let smin = s[n - 1];
        if smax == 0.0 || smin <= n as f64 * EPS * smax * INV_TOL_FACTOR {
            return Err(TensorError::SingularTensor { operand, face: i, sigma_min: smin });
        }
    }
    Ok(faces.map(|_, f| f.clone().try_inverse().expect("face passed the conditioning check")))
}

/// Moore-Penrose inverse with the default per-face tolerance.
pub fn pinv(a: &Tensor3) -> Tensor3 {
    pinv_with_tol(a, None)
}

/// Moore-Penrose inverse, pseudo-inverting every Fourier face.
pub fn pinv_with_tol(a: &Tensor3, tol: Option<f64>) -> Tensor3 {
    from_faces(&pinv_faces(&to_faces(a), tol)).expect("pinv of conjugate-symmetric faces is real")
}

pub(crate) fn pinv_faces(faces: &FourierFaces, tol: Option<f64>) -> FourierFaces {
    let t = tol.unwrap_or_else(|| default_tol(faces));
    faces.map(|_, f| linalg::pinv(f, Some(t)))
}

/// `(A * A^+, A^+ * A)`: orthogonal projectors onto `R(A)` and `R(A^T)`.
pub fn range_projectors(a: &Tensor3) -> (Tensor3, Tensor3) {
    let fa = to_faces(a);
    let fp = pinv_faces(&fa, None);
    let col = fa.mul(&fp).expect("shapes agree");
    let row = fp.mul(&fa).expect("shapes agree");
    (
        from_faces(&col).expect("projector faces are conjugate-symmetric"),
        from_faces(&row).expect("projector faces are conjugate-symmetric"),
    )
}

/// Split of a tensor into a part whose lateral slices lie in `R(A)` and a
/// part whose lateral slices are orthogonal to it.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeSplit {
    pub in_range: Tensor3,
    pub orthogonal: Tensor3,
}

/// `U = X + Y` with `X = A * A^+ * U` and `Y = U - X`. Works on every lateral
/// slice of `U` at once. For a split against `R(A^T)` pass `A^T`.
pub fn split_against_range(a: &Tensor3, u: &Tensor3) -> Result<RangeSplit> {
    if u.n1() != a.n1() || u.n3() != a.n3() {
        return Err(mismatch("split_against_range", format!("{}x*x{}", a.n1(), a.n3()), u.dims()));
    }
    let fa = to_faces(a);
    let fp = pinv_faces(&fa, None);
    let fu = to_faces(u);
    let fx = fa.mul(&fp)?.mul(&fu)?;
    let x = from_faces(&fx)?;
    let y = u.sub(&x)?;
    Ok(RangeSplit { in_range: x, orthogonal: y })
}
