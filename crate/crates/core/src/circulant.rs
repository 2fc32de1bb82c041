//! Block-circulant representation of the t-product.
//!
//! `bcirc`, `unfold` and `fold` give the definitional route
//! `A * B = fold(bcirc(A) . unfold(B))`. The production product goes through
//! the Fourier faces instead; [`oracle::tprod`] keeps the dense route as a
//! reference.

use nalgebra::DMatrix;

use crate::error::{mismatch, Result};
use crate::tensor::{Dims, Tensor3};

/// The `n1*n3 x n2*n3` block-circulant matrix of a tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCirculantMatrix {
    matrix: DMatrix<f64>,
    dims: Dims,
}

impl BlockCirculantMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Dims of the tensor this matrix was built from.
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Block `(i, j)`, an `n1 x n2` matrix.
    pub fn block(&self, i: usize, j: usize) -> DMatrix<f64> {
        let Dims { n1, n2, .. } = self.dims;
        self.matrix.view((i * n1, j * n2), (n1, n2)).into_owned()
    }
}

/// Block `(i, j)` holds frontal slice `(i - j) mod n3`.
pub fn bcirc(a: &Tensor3) -> BlockCirculantMatrix {
    let Dims { n1, n2, n3 } = a.dims();
    let mut m = DMatrix::zeros(n1 * n3, n2 * n3);
    for bi in 0..n3 {
        for bj in 0..n3 {
            let k = (bi + n3 - bj) % n3;
            m.view_mut((bi * n1, bj * n2), (n1, n2)).copy_from(&a.slice(k));
        }
    }
    BlockCirculantMatrix { matrix: m, dims: a.dims() }
}

/// Stacks the frontal slices into an `n1*n3 x n2` block column.
pub fn unfold(a: &Tensor3) -> DMatrix<f64> {
    let Dims { n1, n2, n3 } = a.dims();
    let mut m = DMatrix::zeros(n1 * n3, n2);
    for k in 0..n3 {
        m.view_mut((k * n1, 0), (n1, n2)).copy_from(&a.slice(k));
    }
    m
}

/// Inverse of [`unfold`]: splits an `n1*n3 x n2` block column into `n3` slices.
pub fn fold(m: &DMatrix<f64>, dims: impl Into<Dims>) -> Result<Tensor3> {
    let dims = dims.into();
    if m.nrows() != dims.n1 * dims.n3 || m.ncols() != dims.n2 {
        return Err(mismatch(
            "fold",
            format!("{}x{}", dims.n1 * dims.n3, dims.n2),
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    let slices: Vec<DMatrix<f64>> = (0..dims.n3)
        .map(|k| m.view((k * dims.n1, 0), (dims.n1, dims.n2)).into_owned())
        .collect();
    Tensor3::from_slices(&slices)
}

/// Dense reference implementations, kept for cross-checking the FFT route.
pub mod oracle {
    use super::*;

    /// `fold(bcirc(A) . unfold(B))`.
    pub fn tprod(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
        if a.n2() != b.n1() || a.n3() != b.n3() {
            return Err(mismatch("oracle tprod", format!("{}x*x{}", a.n2(), a.n3()), b.dims()));
        }
        let c = bcirc(a).into_matrix() * unfold(b);
        fold(&c, (a.n1(), b.n2(), a.n3()))
    }
}
