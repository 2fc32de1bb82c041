//! The t-product and the quantities derived from it: inner product and
//! spectral norm.

use crate::error::{mismatch, Result};
use crate::fourier::{from_faces, to_faces};
use crate::linalg;
use crate::tensor::{Tensor3, TubalScalar};

/// `A * B`, computed as face-wise products of the Fourier images.
pub fn tprod(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    if a.n2() != b.n1() || a.n3() != b.n3() {
        return Err(mismatch("tprod", format!("{}x*x{}", a.n2(), a.n3()), b.dims()));
    }
    from_faces(&to_faces(a).mul(&to_faces(b))?)
}

/// Left-to-right product of a chain of tensors.
pub fn tprod_chain(factors: &[&Tensor3]) -> Result<Tensor3> {
    let (first, rest) = factors.split_first().expect("tprod_chain needs at least one factor");
    if rest.is_empty() {
        return Ok((*first).clone());
    }
    let mut acc = to_faces(first);
    for f in rest {
        acc = acc.mul(&to_faces(f))?;
    }
    from_faces(&acc)
}

/// `<X, Y> = X^T * Y` for lateral slices `n1 x 1 x n3`.
pub fn inner_product(x: &Tensor3, y: &Tensor3) -> Result<TubalScalar> {
    if x.n2() != 1 || x.dims() != y.dims() {
        return Err(mismatch("inner_product", format!("{}x1x{} pair", x.n1(), x.n3()), y.dims()));
    }
    TubalScalar::new(tprod(&x.transpose(), y)?)
}

/// `||A||_2 = ||bcirc(A)||_2`, the largest singular value over all faces.
pub fn spectral_norm(a: &Tensor3) -> f64 {
    let faces = to_faces(a);
    let n3 = a.n3();
    // conjugate faces share singular values
    (0..=n3 / 2)
        .map(|i| linalg::spectral_norm(faces.face(i)))
        .fold(0.0, f64::max)
}

impl Tensor3 {
    pub fn tprod(&self, other: &Tensor3) -> Result<Tensor3> {
        tprod(self, other)
    }

    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circulant::oracle;

    fn t(dims: (usize, usize, usize), seed: u64) -> Tensor3 {
        // small deterministic pattern, no rng needed here
        let mut s = seed;
        Tensor3::from_fn(dims, |_, _, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 33) as f64 / (1u64 << 31) as f64) - 0.5
        })
        .unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let a = t((3, 4, 5), 1);
        let right = tprod(&a, &Tensor3::identity(4, 5)).unwrap();
        let left = tprod(&Tensor3::identity(3, 5), &a).unwrap();
        assert!(right.sub(&a).unwrap().max_abs() < 1e-14);
        assert!(left.sub(&a).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn single_slice_is_matrix_product() {
        let a = t((3, 4, 1), 2);
        let b = t((4, 2, 1), 3);
        let c = tprod(&a, &b).unwrap();
        assert!((c.slice(0) - a.slice(0) * b.slice(0)).norm() < 1e-14);
    }

    #[test]
    fn matches_bcirc_oracle() {
        let a = t((3, 4, 5), 4);
        let b = t((4, 2, 5), 5);
        let fast = tprod(&a, &b).unwrap();
        let slow = oracle::tprod(&a, &b).unwrap();
        let rel = fast.sub(&slow).unwrap().frobenius_norm() / (a.frobenius_norm() * b.frobenius_norm());
        assert!(rel < 1e-12, "{rel}");
    }

    #[test]
    fn rejects_mismatch() {
        assert!(tprod(&t((2, 3, 2), 1), &t((2, 3, 2), 2)).is_err());
        assert!(tprod(&t((2, 3, 2), 1), &t((3, 3, 3), 2)).is_err());
    }

    #[test]
    fn inner_product_cases() {
        let x = t((4, 1, 3), 6);
        let z = inner_product(&x, &Tensor3::zeros((4, 1, 3))).unwrap();
        assert!(z.is_zero_within(0.0));
        let x1 = t((4, 1, 1), 7);
        let y1 = t((4, 1, 1), 8);
        let dot: f64 = x1.data().iter().zip(y1.data()).map(|(a, b)| a * b).sum();
        let ip = inner_product(&x1, &y1).unwrap();
        assert!((ip.tube()[0] - dot).abs() < 1e-15);
        assert!(inner_product(&x, &t((4, 2, 3), 1)).is_err());
    }

    #[test]
    fn identity_norms() {
        let i = Tensor3::identity(4, 3);
        assert_eq!(i.frobenius_norm(), 2.0);
        assert!((spectral_norm(&i) - 1.0).abs() < 1e-15);
        assert_eq!(spectral_norm(&Tensor3::zeros((2, 3, 4))), 0.0);
    }

    #[test]
    fn chain_matches_pairwise() {
        let a = t((2, 3, 4), 9);
        let b = t((3, 3, 4), 10);
        let c = t((3, 2, 4), 11);
        let chain = tprod_chain(&[&a, &b, &c]).unwrap();
        let pair = tprod(&tprod(&a, &b).unwrap(), &c).unwrap();
        assert!(chain.sub(&pair).unwrap().max_abs() < 1e-13);
    }
}
