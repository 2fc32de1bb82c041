//! Seeded random instances.
//!
//! Every generator takes an explicit RNG; experiments derive one
//! [`TrialRng`] per trial from a master seed with [`trial_seed`], so any
//! single trial can be replayed on its own.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{mismatch, Result};
use crate::inverse::default_tol;
use crate::fourier::{from_faces, is_self_conjugate, mirror_index, to_faces, CMat, FourierFaces, C64};
use crate::linalg;
use crate::tensor::{Dims, Tensor3};

pub type TrialRng = ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Sub-seed for trial `trial` under `master`: SplitMix64 applied to
/// `master + (trial + 1) * 0x9E3779B97F4A7C15` (wrapping).
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    let mut z = master.wrapping_add(trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// I.i.d. standard normal entries.
pub fn gaussian(dims: impl Into<Dims>, rng: &mut impl Rng) -> Tensor3 {
    let dims = dims.into();
    let data = (0..dims.len()).map(|_| normal(rng)).collect();
    Tensor3::new(dims, data).expect("gaussian entries are finite")
}

/// Gaussian tensor rescaled to spectral norm `target`.
pub fn gaussian_with_spectral_norm(dims: impl Into<Dims>, target: f64, rng: &mut impl Rng) -> Tensor3 {
    let g = gaussian(dims, rng);
    let s = g.spectral_norm();
    g.scale(target / s)
}

/// Gaussian tensor rescaled to Frobenius norm `target`.
pub fn gaussian_with_frobenius_norm(dims: impl Into<Dims>, target: f64, rng: &mut impl Rng) -> Tensor3 {
    let g = gaussian(dims, rng);
    let s = g.frobenius_norm();
    g.scale(target / s)
}

/// Square tensor with every face well away from singular: a Gaussian tensor
/// plus `3 * sqrt(n * n3)` times the identity.
pub fn well_conditioned(n: usize, n3: usize, rng: &mut impl Rng) -> Tensor3 {
    let g = gaussian((n, n, n3), rng);
    let shift = 3.0 * ((n * n3) as f64).sqrt();
    g.add(&Tensor3::identity(n, n3).scale(shift)).expect("same dims")
}

fn random_cmat(rows: usize, cols: usize, real: bool, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re = normal(rng);
        let im = if real { 0.0 } else { normal(rng) };
        C64::new(re, im)
    })
}

/// Haar-like random unitary (real orthogonal when `real`).
pub(crate) fn random_unitary(n: usize, real: bool, rng: &mut impl Rng) -> CMat {
    if real {
        let m = DMatrix::from_fn(n, n, |_, _| normal(rng));
        linalg::to_complex(&m.qr().q())
    } else {
        linalg::unitary_from(random_cmat(n, n, false, rng))
    }
}

/// Random matrix for face `i`, real when the face is self-conjugate.
pub(crate) fn random_face(rows: usize, cols: usize, real: bool, rng: &mut impl Rng) -> CMat {
    random_cmat(rows, cols, real, rng)
}

/// Builds a real tensor from faces generated on the half spectrum.
pub(crate) fn tensor_from_half_faces(n3: usize, mut gen: impl FnMut(usize, bool) -> CMat) -> Result<Tensor3> {
    let half: Vec<CMat> = (0..=n3 / 2).map(|i| gen(i, is_self_conjugate(i, n3))).collect();
    from_faces(&FourierFaces::from_half_spectrum(n3, |i, _| half[i].clone())?)
}

/// Random conjugate-symmetric rank vector with entries in `min_rank..=min(n1, n2)`.
pub fn random_rank_profile(n1: usize, n2: usize, n3: usize, min_rank: usize, rng: &mut impl Rng) -> Vec<usize> {
    let cap = n1.min(n2);
    let lo = min_rank.min(cap);
    let mut ranks = vec![0; n3];
    for i in 0..=n3 / 2 {
        let r = rng.random_range(lo..=cap);
        ranks[i] = r;
        ranks[mirror_index(i, n3)] = r;
    }
    ranks
}

/// Tensor with prescribed multirank. Face `i` is `U_r diag(s) V_r^H` with
/// Haar bases and singular values drawn from `[0.5, 2]`.
///
/// `ranks` must be conjugate-symmetric (`ranks[i] == ranks[n3 - i]`).
pub fn with_multirank(n1: usize, n2: usize, ranks: &[usize], rng: &mut impl Rng) -> Result<Tensor3> {
    let n3 = ranks.len();
    for i in 0..n3 {
        if ranks[i] != ranks[mirror_index(i, n3)] || ranks[i] > n1.min(n2) {
            return Err(mismatch("with_multirank", "conjugate-symmetric ranks <= min(n1, n2)", format!("{ranks:?}")));
        }
    }
    tensor_from_half_faces(n3, |i, real| {
        let r = ranks[i];
        let u = random_unitary(n1, real, rng);
        let v = random_unitary(n2, real, rng);
        let mut face = CMat::zeros(n1, n2);
        for j in 0..r {
            let s = rng.random_range(0.5..2.0);
            face += (u.column(j) * v.column(j).adjoint()).scale(s);
        }
        face
    })
}

/// Top-`r` singular triplets of a face; real faces get real bases so the
/// mirrored faces stay consistent.
fn truncated_svd(face: &CMat, real: bool, tol: f64) -> (CMat, Vec<f64>, CMat) {
    let (u, s, v) = if real {
        let (u, s, v) = linalg::svd_real(&linalg::real_part(face));
        (linalg::to_complex(&u), s, linalg::to_complex(&v))
    } else {
        linalg::svd(face)
    };
    let r = linalg::rank_with_tol(&s, tol);
    (u.columns(0, r).into_owned(), s[..r].to_vec(), v.columns(0, r).into_owned())
}

/// Perturbation that leaves the multirank of `a` unchanged.
///
/// On each face `A_i = U_r S V_r^H` the perturbation is `U_r G V_r^H` with
/// `||G||_2 = min(magnitude, sigma_r / 2)`, so `S + G` stays nonsingular with
/// smallest singular value at least `sigma_r / 2`.
pub fn rank_preserving_perturbation(a: &Tensor3, magnitude: f64, rng: &mut impl Rng) -> Result<Tensor3> {
    let faces = to_faces(a);
    let tol = default_tol(&faces);
    let n3 = a.n3();
    tensor_from_half_faces(n3, |i, real| {
        let (u, s, v) = truncated_svd(faces.face(i), real, tol);
        let r = s.len();
        if r == 0 {
            return CMat::zeros(a.n1(), a.n2());
        }
        let g = random_face(r, r, real, rng);
        let gn = linalg::spectral_norm(&g);
        let size = magnitude.min(0.5 * s[r - 1]);
        &u * g.scale(size / gn) * v.adjoint()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inverse::multirank;

    #[test]
    fn trial_seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..100).map(|t| trial_seed(7, t)).collect();
        let mut b = a.clone();
        b.sort_unstable();
        b.dedup();
        assert_eq!(b.len(), 100);
        assert_eq!(trial_seed(7, 3), a[3]);
        assert_ne!(trial_seed(8, 3), a[3]);
    }

    #[test]
    fn prescribed_multirank_is_recovered() {
        let mut rng = rng_from_seed(11);
        for trial in 0..50 {
            let (n1, n2, n3) = (2 + trial % 4, 2 + (trial / 4) % 4, 1 + trial % 6);
            let ranks = random_rank_profile(n1, n2, n3, 0, &mut rng);
            let a = with_multirank(n1, n2, &ranks, &mut rng).unwrap();
            assert_eq!(multirank(&a, None).ranks, ranks, "dims {n1}x{n2}x{n3}");
        }
    }

    #[test]
    fn rank_preserving_perturbation_keeps_ranks() {
        let mut rng = rng_from_seed(12);
        for _ in 0..30 {
            let ranks = random_rank_profile(4, 3, 5, 1, &mut rng);
            let a = with_multirank(4, 3, &ranks, &mut rng).unwrap();
            let e = rank_preserving_perturbation(&a, 0.1, &mut rng).unwrap();
            let b = a.add(&e).unwrap();
            assert_eq!(multirank(&b, None).ranks, ranks);
            assert!(e.spectral_norm() <= 0.1 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn non_symmetric_ranks_rejected() {
        let mut rng = rng_from_seed(1);
        assert!(with_multirank(3, 3, &[3, 1, 2], &mut rng).is_err());
    }
}
