//! Dense real third-order tensors.
//!
//! Storage is slice-major: the frontal slice index is outermost, then the
//! column, then the row. Entry `(i, j, k)` lives at `k*n1*n2 + j*n1 + i`, so
//! every frontal slice is a contiguous column-major `n1 x n2` block. The JSON
//! and binary file formats use the same order.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Result, TensorError};

/// Shape `(n1, n2, n3)` of a third-order tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
}

impl Dims {
    pub const fn new(n1: usize, n2: usize, n3: usize) -> Self {
        Self { n1, n2, n3 }
    }

    pub const fn len(&self) -> usize {
        self.n1 * self.n2 * self.n3
    }

    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub const fn slice_len(&self) -> usize {
        self.n1 * self.n2
    }

    pub const fn as_tuple(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.n3)
    }

    /// Shape of the transpose.
    pub const fn transposed(&self) -> Self {
        Self::new(self.n2, self.n1, self.n3)
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.n1, self.n2, self.n3)
    }
}

impl From<(usize, usize, usize)> for Dims {
    fn from((n1, n2, n3): (usize, usize, usize)) -> Self {
        Self::new(n1, n2, n3)
    }
}

/// Dense real order-3 tensor. Immutable once constructed; every entry is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    dims: Dims,
    data: Vec<f64>,
}

impl Tensor3 {
    /// Builds a tensor from slice-major data, rejecting bad lengths and
    /// non-finite entries.
    pub fn new(dims: impl Into<Dims>, data: Vec<f64>) -> Result<Self> {
        let dims = dims.into();
        if dims.n1 == 0 || dims.n2 == 0 || dims.n3 == 0 {
            return Err(TensorError::ZeroDimension(dims.as_tuple()));
        }
        if data.len() != dims.len() {
            return Err(TensorError::InvalidShape {
                dims: dims.as_tuple(),
                expected: dims.len(),
                got: data.len(),
            });
        }
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(TensorError::NonFinite { index, value });
        }
        Ok(Self { dims, data })
    }

    /// Internal constructor for data already known to be valid.
    pub(crate) fn from_raw(dims: Dims, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dims.len());
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self { dims, data }
    }

    pub fn zeros(dims: impl Into<Dims>) -> Self {
        let dims = dims.into();
        assert!(!dims.is_empty(), "tensor dimensions must be positive");
        Self::from_raw(dims, vec![0.0; dims.len()])
    }

    pub fn from_fn(dims: impl Into<Dims>, mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        let dims = dims.into();
        let mut data = Vec::with_capacity(dims.len());
        for k in 0..dims.n3 {
            for j in 0..dims.n2 {
                for i in 0..dims.n1 {
                    data.push(f(i, j, k));
                }
            }
        }
        Self::new(dims, data)
    }

    /// The identity tensor: first frontal slice `I_n`, remaining slices zero.
    pub fn identity(n: usize, n3: usize) -> Self {
        assert!(n >= 1 && n3 >= 1, "identity needs n >= 1 and n3 >= 1");
        let mut t = Self::zeros((n, n, n3));
        for i in 0..n {
            t.data[i * n + i] = 1.0;
        }
        t
    }

    /// Stacks equally-shaped frontal slices along the third mode.
    pub fn from_slices(slices: &[DMatrix<f64>]) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| TensorError::ZeroDimension((0, 0, 0)))?;
        let (n1, n2) = first.shape();
        let mut data = Vec::with_capacity(n1 * n2 * slices.len());
        for (k, s) in slices.iter().enumerate() {
            if s.shape() != (n1, n2) {
                return Err(mismatch(
                    "from_slices",
                    format!("{n1}x{n2}"),
                    format!("{}x{} at slice {k}", s.nrows(), s.ncols()),
                ));
            }
            data.extend_from_slice(s.as_slice());
        }
        Self::new((n1, n2, slices.len()), data)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn n1(&self) -> usize {
        self.dims.n1
    }

    pub fn n2(&self) -> usize {
        self.dims.n2
    }

    pub fn n3(&self) -> usize {
        self.dims.n3
    }

    /// Slice-major entries.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        k * self.dims.slice_len() + j * self.dims.n1 + i
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.index(i, j, k)]
    }

    /// Frontal slice `k` (0-based) as an `n1 x n2` matrix.
    pub fn slice(&self, k: usize) -> DMatrix<f64> {
        let len = self.dims.slice_len();
        DMatrix::from_column_slice(self.dims.n1, self.dims.n2, &self.data[k * len..(k + 1) * len])
    }

    pub fn slices(&self) -> Vec<DMatrix<f64>> {
        (0..self.dims.n3).map(|k| self.slice(k)).collect()
    }

    /// Lateral slice `j` as an `n1 x 1 x n3` tensor.
    pub fn lateral_slice(&self, j: usize) -> Tensor3 {
        assert!(j < self.dims.n2, "lateral slice index out of range");
        let n1 = self.dims.n1;
        let mut data = Vec::with_capacity(n1 * self.dims.n3);
        for k in 0..self.dims.n3 {
            let start = self.index(0, j, k);
            data.extend_from_slice(&self.data[start..start + n1]);
        }
        Self::from_raw(Dims::new(n1, 1, self.dims.n3), data)
    }

    /// Concatenates tensors along the second mode, `[A | B | ...]`.
    pub fn hcat(parts: &[&Tensor3]) -> Result<Tensor3> {
        let first = parts.first().ok_or_else(|| TensorError::ZeroDimension((0, 0, 0)))?;
        let (n1, n3) = (first.n1(), first.n3());
        let mut n2 = 0;
        for p in parts {
            if p.n1() != n1 || p.n3() != n3 {
                return Err(mismatch("hcat", format!("{n1}x*x{n3}"), p.dims()));
            }
            n2 += p.n2();
        }
        let mut data = Vec::with_capacity(n1 * n2 * n3);
        for k in 0..n3 {
            for p in parts {
                let len = p.dims.slice_len();
                data.extend_from_slice(&p.data[k * len..(k + 1) * len]);
            }
        }
        Ok(Self::from_raw(Dims::new(n1, n2, n3), data))
    }

    /// Tensor transpose: transpose every frontal slice, then reverse the order
    /// of slices 2 through n3.
    pub fn transpose(&self) -> Tensor3 {
        let Dims { n1, n2, n3 } = self.dims;
        let out_dims = self.dims.transposed();
        let mut data = vec![0.0; self.data.len()];
        for k in 0..n3 {
            let src = if k == 0 { 0 } else { n3 - k };
            for j in 0..n2 {
                for i in 0..n1 {
                    // out(j, i, k) = in(i, j, src)
                    data[k * n1 * n2 + i * n2 + j] = self.get(i, j, src);
                }
            }
        }
        Self::from_raw(out_dims, data)
    }

    fn check_same_dims(&self, other: &Tensor3, op: &'static str) -> Result<()> {
        if self.dims != other.dims {
            return Err(mismatch(op, self.dims, other.dims));
        }
        Ok(())
    }

    pub fn add(&self, other: &Tensor3) -> Result<Tensor3> {
        self.check_same_dims(other, "add")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Tensor3::new(self.dims, data)
    }

    pub fn sub(&self, other: &Tensor3) -> Result<Tensor3> {
        self.check_same_dims(other, "sub")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Tensor3::new(self.dims, data)
    }

    /// Entrywise `alpha * A`.
    ///
    /// Panics if `alpha` is not finite.
    pub fn scale(&self, alpha: f64) -> Tensor3 {
        assert!(alpha.is_finite(), "scale factor must be finite");
        Self::from_raw(self.dims, self.data.iter().map(|a| alpha * a).collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&a| a == 0.0)
    }
}

/// A `1 x 1 x n3` tensor, the scalar of the t-product algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct TubalScalar(Tensor3);

impl TubalScalar {
    pub fn new(t: Tensor3) -> Result<Self> {
        if t.n1() != 1 || t.n2() != 1 {
            return Err(mismatch("tubal scalar", "1x1xn3", t.dims()));
        }
        Ok(Self(t))
    }

    pub fn tube(&self) -> &[f64] {
        self.0.data()
    }

    pub fn as_tensor(&self) -> &Tensor3 {
        &self.0
    }

    pub fn into_tensor(self) -> Tensor3 {
        self.0
    }

    /// True when every entry of the tube is at most `tol` in magnitude.
    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.0.max_abs() <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Tensor3 {
        Tensor3::from_fn((2, 3, 4), |i, j, k| (i + 10 * j + 100 * k) as f64).unwrap()
    }

    #[test]
    fn layout_is_slice_major_column_major() {
        let t = sample();
        assert_eq!(t.data()[0], 0.0);
        assert_eq!(t.data()[1], 1.0); // row fastest
        assert_eq!(t.data()[2], 10.0); // then column
        assert_eq!(t.data()[6], 100.0); // then slice
        assert_eq!(t.slice(1)[(1, 2)], 121.0);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            Tensor3::new((2, 2, 2), vec![0.0; 7]),
            Err(TensorError::InvalidShape { expected: 8, got: 7, .. })
        ));
        let mut d = vec![0.0; 8];
        d[3] = f64::NAN;
        assert!(matches!(Tensor3::new((2, 2, 2), d), Err(TensorError::NonFinite { index: 3, .. })));
        assert!(matches!(Tensor3::new((0, 2, 2), vec![]), Err(TensorError::ZeroDimension(_))));
    }

    #[test]
    fn identity_norm() {
        assert_eq!(Tensor3::identity(4, 3).frobenius_norm(), 2.0);
    }

    #[test]
    fn transpose_reverses_tail_slices() {
        let t = sample();
        let tt = t.transpose();
        assert_eq!(tt.dims(), Dims::new(3, 2, 4));
        assert_eq!(tt.slice(0), t.slice(0).transpose());
        for k in 1..4 {
            assert_eq!(tt.slice(k), t.slice(4 - k).transpose());
        }
        assert_eq!(tt.transpose(), t);
    }

    #[test]
    fn transpose_with_single_slice_is_matrix_transpose() {
        let t = Tensor3::from_fn((2, 3, 1), |i, j, _| (i * 3 + j) as f64).unwrap();
        assert_eq!(t.transpose().slice(0), t.slice(0).transpose());
    }

    #[test]
    fn arithmetic() {
        let a = sample();
        let z = Tensor3::zeros(a.dims());
        assert_eq!(a.add(&z).unwrap(), a);
        assert!(a.sub(&a).unwrap().is_zero());
        let s = a.scale(2.0);
        assert!((s.frobenius_norm() - 2.0 * a.frobenius_norm()).abs() < 1e-12);
        let other = Tensor3::zeros((3, 2, 4));
        assert!(matches!(a.add(&other), Err(TensorError::DimensionMismatch { .. })));
    }

    #[test]
    fn lateral_slices_and_hcat() {
        let a = sample();
        let cols: Vec<Tensor3> = (0..3).map(|j| a.lateral_slice(j)).collect();
        let refs: Vec<&Tensor3> = cols.iter().collect();
        assert_eq!(Tensor3::hcat(&refs).unwrap(), a);
        assert_eq!(cols[2].get(1, 0, 3), a.get(1, 2, 3));
    }

    #[test]
    fn tubal_scalar_shape() {
        assert!(TubalScalar::new(Tensor3::zeros((1, 1, 5))).is_ok());
        assert!(TubalScalar::new(Tensor3::zeros((2, 1, 5))).is_err());
    }
}
