//! Mode-3 DFT transport between spatial tensors and their Fourier faces.
//!
//! The forward transform is unnormalized and the inverse carries the `1/n3`
//! factor, so `||A||_F = ||faces||_F / sqrt(n3)` and `||A||_2` is the largest
//! face spectral norm.
//!
//! Real tensors have conjugate-symmetric faces: face `i` is the conjugate of
//! face `n3 - i`. Face-wise maps therefore only evaluate faces
//! `0..=n3/2` and mirror the rest, which halves the work and keeps the
//! symmetry exact.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};
use rustfft::FftPlanner;

use crate::error::{mismatch, Result, TensorError};
use crate::par;
use crate::tensor::{Dims, Tensor3};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

/// Relative bound on the imaginary part left after the inverse transform.
pub const IMAG_RESIDUAL_TOL: f64 = 1e-10;

/// The block-diagonal Fourier representation: one complex `n1 x n2` face per
/// frontal index.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierFaces {
    dims: Dims,
    faces: Vec<CMat>,
}

/// Index of the face that must equal the conjugate of face `i`.
#[inline]
pub fn mirror_index(i: usize, n3: usize) -> usize {
    (n3 - i) % n3
}

/// Faces 0 and (for even n3) n3/2 are their own mirrors and must be real.
#[inline]
pub fn is_self_conjugate(i: usize, n3: usize) -> bool {
    mirror_index(i, n3) == i
}

impl FourierFaces {
    /// Wraps a face set; all faces must share a shape.
    pub fn new(faces: Vec<CMat>) -> Result<Self> {
        let first = faces.first().ok_or(TensorError::ZeroDimension((0, 0, 0)))?;
        let (n1, n2) = first.shape();
        if let Some((i, f)) = faces.iter().enumerate().find(|(_, f)| f.shape() != (n1, n2)) {
            return Err(mismatch(
                "fourier faces",
                format!("{n1}x{n2}"),
                format!("{}x{} at face {i}", f.nrows(), f.ncols()),
            ));
        }
        let dims = Dims::new(n1, n2, faces.len());
        Ok(Self { dims, faces })
    }

    /// Builds a conjugate-symmetric face set from a generator evaluated on
    /// faces `0..=n3/2`. The flag passed to `f` says whether the face is
    /// self-conjugate, in which case the generator must return a real matrix
    /// (any imaginary part is dropped).
    pub fn from_half_spectrum<F>(n3: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, bool) -> CMat + Sync + Send,
    {
        let half = par::map_range(n3 / 2 + 1, |i| {
            let sc = is_self_conjugate(i, n3);
            let mut m = f(i, sc);
            if sc {
                m.iter_mut().for_each(|z| z.im = 0.0);
            }
            m
        });
        let faces = (0..n3)
            .map(|i| if i <= n3 / 2 { half[i].clone() } else { half[n3 - i].conjugate() })
            .collect();
        Self::new(faces)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn faces(&self) -> &[CMat] {
        &self.faces
    }

    pub fn face(&self, i: usize) -> &CMat {
        &self.faces[i]
    }

    pub fn into_faces(self) -> Vec<CMat> {
        self.faces
    }

    /// Face-wise map, evaluated on the half spectrum and mirrored.
    pub fn map<F>(&self, f: F) -> FourierFaces
    where
        F: Fn(usize, &CMat) -> CMat + Sync + Send,
    {
        Self::from_half_spectrum(self.dims.n3, |i, _| f(i, &self.faces[i]))
            .expect("face map produced inconsistent shapes")
    }

    /// Face-wise binary map over two face sets with the same `n3`.
    pub fn zip_map<F>(&self, other: &FourierFaces, f: F) -> Result<FourierFaces>
    where
        F: Fn(&CMat, &CMat) -> CMat + Sync + Send,
    {
        if self.dims.n3 != other.dims.n3 {
            return Err(mismatch("face zip", self.dims, other.dims));
        }
        Self::from_half_spectrum(self.dims.n3, |i, _| f(&self.faces[i], &other.faces[i]))
    }

    /// Face-wise matrix product; the Fourier image of the t-product.
    pub fn mul(&self, other: &FourierFaces) -> Result<FourierFaces> {
        if self.dims.n2 != other.dims.n1 || self.dims.n3 != other.dims.n3 {
            return Err(mismatch("face product", format!("{}x*x{}", self.dims.n2, self.dims.n3), other.dims));
        }
        self.zip_map(other, |a, b| a * b)
    }

    /// `sqrt(sum_i ||face_i||_F^2)`, the Frobenius norm of the block diagonal.
    pub fn stacked_frobenius_norm(&self) -> f64 {
        self.faces.iter().map(|f| f.norm_squared()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from conjugate symmetry.
    pub fn conjugate_symmetry_residual(&self) -> f64 {
        let n3 = self.dims.n3;
        let mut worst: f64 = 0.0;
        for i in 0..n3 {
            let m = &self.faces[mirror_index(i, n3)];
            for (a, b) in self.faces[i].iter().zip(m.iter()) {
                worst = worst.max((a - b.conj()).norm());
            }
        }
        worst
    }
}

/// Mode-3 FFT of every tube: `fft(A, [], 3)`.
pub fn to_faces(a: &Tensor3) -> FourierFaces {
    let Dims { n1, n2, n3 } = a.dims();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n3);
    let mut faces = vec![CMat::zeros(n1, n2); n3];
    let mut tube = vec![C64::new(0.0, 0.0); n3];
    for j in 0..n2 {
        for i in 0..n1 {
            for (k, z) in tube.iter_mut().enumerate() {
                *z = C64::new(a.get(i, j, k), 0.0);
            }
            fft.process(&mut tube);
            for (k, z) in tube.iter().enumerate() {
                faces[k][(i, j)] = *z;
            }
        }
    }
    FourierFaces { dims: a.dims(), faces }
}

/// Inverse mode-3 FFT: `ifft(F, [], 3)`, keeping the real part.
///
/// Fails with [`TensorError::ImaginaryResidualExceeded`] when the largest
/// imaginary part exceeds `1e-10 * (1 + ||A||_F)`, where `||A||_F` is the
/// Frobenius norm implied by the faces.
pub fn from_faces(f: &FourierFaces) -> Result<Tensor3> {
    let Dims { n1, n2, n3 } = f.dims;
    let ifft = FftPlanner::<f64>::new().plan_fft_inverse(n3);
    let scale = 1.0 / n3 as f64;
    let mut data = vec![0.0; f.dims.len()];
    let mut tube = vec![C64::new(0.0, 0.0); n3];
    let mut residual: f64 = 0.0;
    for j in 0..n2 {
        for i in 0..n1 {
            for (k, z) in tube.iter_mut().enumerate() {
                *z = f.faces[k][(i, j)];
            }
            ifft.process(&mut tube);
            for (k, z) in tube.iter().enumerate() {
                let v = z * scale;
                residual = residual.max(v.im.abs());
                data[k * n1 * n2 + j * n1 + i] = v.re;
            }
        }
    }
    let limit = IMAG_RESIDUAL_TOL * (1.0 + f.stacked_frobenius_norm() * scale.sqrt());
    if !(residual <= limit) {
        return Err(TensorError::ImaginaryResidualExceeded { residual, limit });
    }
    Tensor3::new(f.dims, data)
}

/// The `n x n` DFT matrix with entries `exp(-2 pi i (j-1)(k-1) / n)`.
///
/// Dense O(n^2) construction, used as a test oracle for the transform.
pub fn dft_matrix(n: usize) -> CMat {
    assert!(n >= 1, "dft_matrix needs n >= 1");
    CMat::from_fn(n, n, |j, k| {
        // reduce the exponent mod n to keep the angle small and exact at 0
        let e = (j * k) % n;
        let theta = -2.0 * PI * e as f64 / n as f64;
        C64::new(theta.cos(), theta.sin())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn dft_small_cases() {
        assert_eq!(dft_matrix(1), CMat::from_element(1, 1, c(1.0)));
        let f2 = dft_matrix(2);
        let expected = CMat::from_row_slice(2, 2, &[c(1.0), c(1.0), c(1.0), c(-1.0)]);
        assert!((f2 - expected).norm() < 1e-15);
    }

    #[test]
    fn dft_is_scaled_unitary() {
        let f = dft_matrix(4);
        let g = f.adjoint() * &f;
        let err = (g - CMat::identity(4, 4).scale(4.0)).norm();
        assert!(err < 1e-14, "{err}");
    }

    #[test]
    fn identity_faces_are_identity() {
        let faces = to_faces(&Tensor3::identity(3, 5));
        for f in faces.faces() {
            assert!((f - CMat::identity(3, 3)).norm() < 1e-15);
        }
    }

    #[test]
    fn single_slice_face_is_the_slice() {
        let a = Tensor3::from_fn((2, 3, 1), |i, j, _| (i + 4 * j) as f64).unwrap();
        let faces = to_faces(&a);
        assert_eq!(faces.face(0).map(|z| z.re), a.slice(0));
    }

    #[test]
    fn all_identity_faces_invert_to_identity() {
        let f = FourierFaces::new(vec![CMat::identity(2, 2); 4]).unwrap();
        let t = from_faces(&f).unwrap();
        assert!(t.sub(&Tensor3::identity(2, 4)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn asymmetric_faces_are_rejected() {
        let mut faces = vec![CMat::identity(2, 2); 3];
        faces[1][(0, 1)] = C64::new(0.0, 1.0);
        let f = FourierFaces::new(faces).unwrap();
        assert!(f.conjugate_symmetry_residual() > 0.5);
        assert!(matches!(from_faces(&f), Err(TensorError::ImaginaryResidualExceeded { .. })));
    }

    #[test]
    fn half_spectrum_builder_mirrors() {
        let f = FourierFaces::from_half_spectrum(5, |i, _| {
            CMat::from_element(2, 2, C64::new(i as f64, 1.0 + i as f64))
        })
        .unwrap();
        assert_eq!(f.conjugate_symmetry_residual(), 0.0);
        assert_eq!(f.face(0)[(0, 0)].im, 0.0);
        assert_eq!(f.face(4)[(0, 0)], C64::new(1.0, -2.0));
    }
}
