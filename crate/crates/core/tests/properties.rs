//! Algebraic invariants checked on random instances.

use nalgebra::DMatrix;
use proptest::prelude::*;
use tprod_core::fourier::{from_faces, to_faces};
use tprod_core::generate::{gaussian, gaussian_with_spectral_norm, random_rank_profile, rank_preserving_perturbation, rng_from_seed, well_conditioned, with_multirank};
use tprod_core::perturb::{inv_perturb_posterior, inv_perturb_prior, pinv_perturb_general, pinv_perturb_rank_preserving, pinv_perturb_relative};
use tprod_core::{
    bcirc, construct_conditioned_instance, inner_product, lstsq_min_norm, multirank, pinv, smw_pinv, solve_exact, split_against_range, tprod, InstanceFamily,
    SmwDims, Tensor3,
};

fn rel(a: &Tensor3, b: &Tensor3) -> f64 {
    a.sub(b).unwrap().frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)
}

fn mat_rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn dims() -> impl Strategy<Value = (usize, usize, usize)> {
    (1usize..=6, 1usize..=6, 1usize..=6)
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn bcirc_is_multiplicative((n1, n2, n3) in dims(), n4 in 1usize..=6, seed: u64) {
        let mut rng = rng_from_seed(seed);
        let a = gaussian((n1, n2, n3), &mut rng);
        let b = gaussian((n2, n4, n3), &mut rng);
        let lhs = bcirc(&tprod(&a, &b).unwrap()).into_matrix();
        let rhs = bcirc(&a).matrix() * bcirc(&b).matrix();
        prop_assert!(mat_rel(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn transpose_reverses_products((n1, n2, n3) in dims(), n4 in 1usize..=6, seed: u64) {
        let mut rng = rng_from_seed(seed);
        let a = gaussian((n1, n2, n3), &mut rng);
        let b = gaussian((n2, n4, n3), &mut rng);
        prop_assert_eq!(a.transpose().transpose(), a.clone());
        let lhs = tprod(&a, &b).unwrap().transpose();
        let rhs = tprod(&b.transpose(), &a.transpose()).unwrap();
        prop_assert!(rel(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn orthogonal_slices_add_in_square((n1, n2, n3) in dims(), seed: u64) {
        let mut rng = rng_from_seed(seed);
        let ranks = random_rank_profile(n1, n2, n3, 0, &mut rng);
        let a = with_multirank(n1, n2, &ranks, &mut rng).unwrap();
        let s = split_against_range(&a, &gaussian((n1, 1, n3), &mut rng)).unwrap();
        let ip = inner_product(&s.in_range, &s.orthogonal).unwrap();
        prop_assert!(ip.tube().iter().all(|x| x.abs() <= 1e-12 * (1.0 + s.in_range.frobenius_norm() * s.orthogonal.frobenius_norm())));
        let sum = s.in_range.add(&s.orthogonal).unwrap().frobenius_norm().powi(2);
        let parts = s.in_range.frobenius_norm().powi(2) + s.orthogonal.frobenius_norm().powi(2);
        prop_assert!((sum - parts).abs() <= 1e-10 * sum.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn faces_preserve_norm_and_products((n1, n2, n3) in dims(), n4 in 1usize..=6, seed: u64) {
        let mut rng = rng_from_seed(seed);
        let a = gaussian((n1, n2, n3), &mut rng);
        let b = gaussian((n2, n4, n3), &mut rng);
        let fa = to_faces(&a);
        let parseval = fa.stacked_frobenius_norm() / (n3 as f64).sqrt();
        prop_assert!((parseval - a.frobenius_norm()).abs() <= 1e-12 * a.frobenius_norm());
        let fab = to_faces(&tprod(&a, &b).unwrap());
        let fb = to_faces(&b);
        for i in 0..n3 {
            let prod = fa.face(i) * fb.face(i);
            prop_assert!((fab.face(i) - &prod).norm() <= 1e-12 * (1.0 + prod.norm()));
        }
        prop_assert!(rel(&from_faces(&fa).unwrap(), &a) <= 1e-14);
    }

    #[test]
    fn pinv_commutes_with_bcirc((n1, n2, n3) in dims(), seed: u64) {
        let mut rng = rng_from_seed(seed);
        let ranks = random_rank_profile(n1, n2, n3, 0, &mut rng);
        let a = with_multirank(n1, n2, &ranks, &mut rng).unwrap();
        // bcirc(A^+) satisfies the four matrix Penrose identities for bcirc(A)
        let m = bcirc(&a).into_matrix();
        let x = bcirc(&pinv(&a)).into_matrix();
        let (mx, xm) = (&m * &x, &x * &m);
        let scale = 1.0 + m.norm() * x.norm();
        prop_assert!((&mx * &m - &m).norm() <= 1e-10 * scale * m.norm());
        prop_assert!((&xm * &x - &x).norm() <= 1e-10 * scale * x.norm());
        prop_assert!((mx.transpose() - &mx).norm() <= 1e-10 * scale);
        prop_assert!((xm.transpose() - &xm).norm() <= 1e-10 * scale);
    }

    #[test]
    fn multirank_sums_to_bcirc_rank((n1, n2, n3) in dims(), seed: u64) {
        let mut rng = rng_from_seed(seed);
        let ranks = random_rank_profile(n1, n2, n3, 0, &mut rng);
        let a = with_multirank(n1, n2, &ranks, &mut rng).unwrap();
        let mr = multirank(&a, None);
        prop_assert_eq!(&mr.ranks, &ranks);
        let sv = bcirc(&a).into_matrix().singular_values();
        let dense_rank = sv.iter().filter(|&&s| s > 1e-8 * sv.max()).count();
        prop_assert_eq!(mr.total(), dense_rank);
    }

    #[test]
    fn consistency_matches_augmented_rank((n1, n2, n3) in (2usize..=6, 1usize..=6, 1usize..=5), inside: bool, seed: u64) {
        let mut rng = rng_from_seed(seed);
        let ranks = random_rank_profile(n1, n2, n3, 0, &mut rng);
        let a = with_multirank(n1, n2, &ranks, &mut rng).unwrap();
        let d = if inside { tprod(&a, &gaussian((n2, 2, n3), &mut rng)).unwrap() } else { gaussian((n1, 2, n3), &mut rng) };
        let verdict = solve_exact(&a, &d, None).unwrap().consistent;
        let tol = Some(1e-8 * a.spectral_norm().max(d.spectral_norm()).max(1.0));
        let augmented = multirank(&Tensor3::hcat(&[&a, &d]).unwrap(), tol);
        prop_assert_eq!(verdict, augmented.ranks == multirank(&a, tol).ranks);
    }

    #[test]
    fn lstsq_is_shortest_minimizer((n1, n2, n3) in (1usize..=6, 2usize..=6, 1usize..=4), seed: u64) {
        let mut rng = rng_from_seed(seed);
        let ranks = random_rank_profile(n1, n2, n3, 0, &mut rng);
        let a = with_multirank(n1, n2, &ranks, &mut rng).unwrap();
        let b = gaussian((n1, 2, n3), &mut rng);
        let x = lstsq_min_norm(&a, &b).unwrap();
        let h = Tensor3::identity(n2, n3).sub(&tprod(&pinv(&a), &a).unwrap()).unwrap();
        for _ in 0..100 {
            let z = tprod(&h, &gaussian((n2, 2, n3), &mut rng)).unwrap();
            let other = x.add(&z).unwrap();
            let (r0, r1) = (tprod(&a, &x).unwrap().sub(&b).unwrap().frobenius_norm(), tprod(&a, &other).unwrap().sub(&b).unwrap().frobenius_norm());
            prop_assert!((r0 - r1).abs() <= 1e-10 * (1.0 + b.frobenius_norm()));
            prop_assert!(other.frobenius_norm() >= x.frobenius_norm() * (1.0 - 1e-12));
        }
    }

    #[test]
    fn smw_pinv_satisfies_penrose(n1 in 3usize..=6, n2 in 3usize..=6, n3 in 1usize..=4, lifted: bool, seed: u64) {
        let family = if lifted { InstanceFamily::MatrixLifted } else { InstanceFamily::Trivial };
        let (a, f) = construct_conditioned_instance(SmwDims { n1, n2, k: 2, n3 }, family, seed).unwrap();
        let m = a.add(&f.update().unwrap()).unwrap();
        let x = smw_pinv(&a, &f).unwrap();
        let mx = tprod(&m, &x).unwrap();
        let xm = tprod(&x, &m).unwrap();
        prop_assert!(rel(&tprod(&mx, &m).unwrap(), &m) <= 1e-8);
        prop_assert!(rel(&tprod(&x, &mx).unwrap(), &x) <= 1e-8);
        prop_assert!(rel(&mx.transpose(), &mx) <= 1e-8);
        prop_assert!(rel(&xm.transpose(), &xm) <= 1e-8);
        prop_assert!(rel(&x, &pinv(&m)) <= 1e-8);
    }

    #[test]
    fn shrinking_the_perturbation_never_raises_a_bound(n in 2usize..=5, n3 in 1usize..=4, s in 0.05f64..0.95, seed: u64) {
        let mut rng = rng_from_seed(seed);
        let a = well_conditioned(n, n3, &mut rng);
        let e = gaussian_with_spectral_norm((n, n, n3), 0.1 * a.spectral_norm(), &mut rng);
        let es = e.scale(s);
        let le = |small: (f64, f64), big: (f64, f64)| small.0 <= big.0 * (1.0 + 1e-12) && small.1 <= big.1 * (1.0 + 1e-12);
        let bounds = |f: fn(&Tensor3, &Tensor3) -> tprod_core::BoundReport, e: &Tensor3| {
            let r = f(&a, e);
            (r.bound_f, r.bound_2)
        };
        for f in [inv_perturb_posterior, inv_perturb_prior, pinv_perturb_general, pinv_perturb_rank_preserving] {
            prop_assert!(le(bounds(f, &es), bounds(f, &e)));
        }
    }

    #[test]
    fn relative_bound_applicability_implies_rank_preserving(n1 in 2usize..=5, n2 in 2usize..=5, n3 in 1usize..=4, scale in 1e-4f64..1.0, seed: u64) {
        let mut rng = rng_from_seed(seed);
        let ranks = random_rank_profile(n1, n2, n3, 1, &mut rng);
        let a = with_multirank(n1, n2, &ranks, &mut rng).unwrap();
        let e = if seed % 2 == 0 {
            rank_preserving_perturbation(&a, scale * a.spectral_norm(), &mut rng).unwrap()
        } else {
            gaussian_with_spectral_norm(a.dims(), scale * a.spectral_norm(), &mut rng)
        };
        if pinv_perturb_relative(&a, &e).is_applicable() {
            prop_assert!(pinv_perturb_rank_preserving(&a, &e).is_applicable());
        }
    }
}
