//! Bounds for `(A + E)^{-1}` and for `(A + E) * (X + H) = B + K`.

use super::{rel, BoundReport};
use crate::inverse::inv;
use crate::product::tprod;
use crate::tensor::Tensor3;

fn check_square_pair(a: &Tensor3, e: &Tensor3) {
    assert_eq!(a.n1(), a.n2(), "A must have square faces");
    assert_eq!(a.dims(), e.dims(), "A and E must have the same dims");
}

/// A-posteriori bound on `A^{-1} - (A + E)^{-1}`, using `(A + E)^{-1}`:
///
/// `||A^-1 - B^-1||_F / ||A^-1||_F <= kappa_F ||E||_2 / ||A||_F` with
/// `kappa_F = ||A||_F ||B^-1||_2`, and the spectral analogue.
///
/// Also checks `sqrt(n3) ||E||_2 ||B^-1||_F` as a bound on the Frobenius
/// ratio.
///
/// # Panics
/// If `A` is not square or `E` has different dims.
pub fn inv_perturb_posterior(a: &Tensor3, e: &Tensor3) -> BoundReport {
    check_square_pair(a, e);
    let Ok(ai) = inv(a) else {
        return BoundReport::violated("A is singular");
    };
    let b = a.add(e).expect("same dims");
    let Ok(bi) = inv(&b) else {
        return BoundReport::violated("A + E is singular");
    };
    let diff = ai.sub(&bi).expect("same dims");
    let e2 = e.spectral_norm();
    let (af, a2) = (a.frobenius_norm(), a.spectral_norm());
    let bi2 = bi.spectral_norm();
    let kappa = (af * bi2, a2 * bi2);
    let actual = (rel(diff.frobenius_norm(), ai.frobenius_norm()), rel(diff.spectral_norm(), ai.spectral_norm()));
    let bound = (kappa.0 * e2 / af, kappa.1 * e2 / a2);
    let n3 = a.n3() as f64;
    BoundReport::new(bound, actual, kappa).with_extra("sqrt(n3)*||E||_2*||B^-1||_F", n3.sqrt() * e2 * bi.frobenius_norm(), actual.0)
}

/// A-priori bounds under `||A^-1||_2 ||E||_2 < 1`:
///
/// `||B^-1|| <= ||A^-1|| / gamma` and
/// `||B^-1 - A^-1|| / ||A^-1|| <= (kappa / gamma) ||E||_2 / ||A||` in both
/// norms, where `kappa_F = ||A||_F ||A^-1||_2`, `gamma_F = 1 - kappa_F ||E||_2 / ||A||_F`
/// and the spectral versions replace `||A||_F` with `||A||_2`.
///
/// The main report holds the relative-error bounds; the two size bounds are
/// extras.
///
/// # Panics
/// If `A` is not square or `E` has different dims.
pub fn inv_perturb_prior(a: &Tensor3, e: &Tensor3) -> BoundReport {
    check_square_pair(a, e);
    let Ok(ai) = inv(a) else {
        return BoundReport::violated("A is singular");
    };
    let ai2 = ai.spectral_norm();
    let e2 = e.spectral_norm();
    if ai2 * e2 >= 1.0 {
        return BoundReport::violated(format!("||A^-1||_2 ||E||_2 = {:e} >= 1", ai2 * e2));
    }
    let b = a.add(e).expect("same dims");
    let Ok(bi) = inv(&b) else {
        return BoundReport::violated("A + E is numerically singular");
    };
    let (af, a2) = (a.frobenius_norm(), a.spectral_norm());
    let kappa = (af * ai2, a2 * ai2);
    let gamma = (1.0 - kappa.0 * e2 / af, 1.0 - kappa.1 * e2 / a2);
    let diff = bi.sub(&ai).expect("same dims");
    let aif = ai.frobenius_norm();
    let actual = (rel(diff.frobenius_norm(), aif), rel(diff.spectral_norm(), ai2));
    let bound = (kappa.0 / gamma.0 * e2 / af, kappa.1 / gamma.1 * e2 / a2);
    BoundReport::new(bound, actual, kappa)
        .with_gamma(gamma.0, gamma.1)
        .with_extra("||B^-1||_F <= ||A^-1||_F/gamma_F", aif / gamma.0, bi.frobenius_norm())
        .with_extra("||B^-1||_2 <= ||A^-1||_2/gamma_2", ai2 / gamma.1, bi.spectral_norm())
}

/// Sensitivity of `A * X = B` to `A -> A + E`, `B -> B + K`:
///
/// `||H||_F / ||X||_F <= (kappa_F / gamma_F)(||E||_2 / ||A||_F + sqrt(n3) ||K||_F / ||B||_F)`
/// and `||H||_2 / ||X||_2 <= (kappa_2 / gamma_2)(||E||_2 / ||A||_2 + ||K||_2 / ||B||_2)`,
/// with `kappa`, `gamma` as in [`inv_perturb_prior`].
///
/// # Panics
/// On incompatible shapes.
pub fn equation_perturb(a: &Tensor3, e: &Tensor3, rhs: &Tensor3, k: &Tensor3) -> BoundReport {
    check_square_pair(a, e);
    assert_eq!(rhs.dims(), k.dims(), "B and K must have the same dims");
    assert!(rhs.n1() == a.n1() && rhs.n3() == a.n3(), "B must be n x m x n3");
    if rhs.is_zero() {
        return BoundReport::violated("B = 0");
    }
    let Ok(ai) = inv(a) else {
        return BoundReport::violated("A is singular");
    };
    let ai2 = ai.spectral_norm();
    let e2 = e.spectral_norm();
    if ai2 * e2 >= 1.0 {
        return BoundReport::violated(format!("||A^-1||_2 ||E||_2 = {:e} >= 1", ai2 * e2));
    }
    let m = a.add(e).expect("same dims");
    let Ok(mi) = inv(&m) else {
        return BoundReport::violated("A + E is numerically singular");
    };
    let x = tprod(&ai, rhs).expect("shapes checked");
    let xt = tprod(&mi, &rhs.add(k).expect("same dims")).expect("shapes checked");
    let h = xt.sub(&x).expect("same dims");
    let (af, a2) = (a.frobenius_norm(), a.spectral_norm());
    let kappa = (af * ai2, a2 * ai2);
    let gamma = (1.0 - kappa.0 * e2 / af, 1.0 - kappa.1 * e2 / a2);
    let n3 = a.n3() as f64;
    let bound = (
        kappa.0 / gamma.0 * (e2 / af + n3.sqrt() * k.frobenius_norm() / rhs.frobenius_norm()),
        kappa.1 / gamma.1 * (e2 / a2 + k.spectral_norm() / rhs.spectral_norm()),
    );
    let actual = (rel(h.frobenius_norm(), x.frobenius_norm()), rel(h.spectral_norm(), x.spectral_norm()));
    BoundReport::new(bound, actual, kappa).with_gamma(gamma.0, gamma.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gaussian_with_spectral_norm, rng_from_seed, well_conditioned};

    fn scalar(x: f64) -> Tensor3 {
        Tensor3::new((1, 1, 1), vec![x]).unwrap()
    }

    #[test]
    fn zero_perturbation_gives_zero_error() {
        let mut rng = rng_from_seed(1);
        let a = well_conditioned(3, 2, &mut rng);
        let z = Tensor3::zeros(a.dims());
        for r in [inv_perturb_posterior(&a, &z), inv_perturb_prior(&a, &z)] {
            assert!(r.is_applicable());
            assert_eq!((r.actual_f, r.actual_2), (0.0, 0.0));
            assert_eq!((r.bound_f, r.bound_2), (0.0, 0.0));
            assert!(r.all_hold());
        }
        let prior = inv_perturb_prior(&a, &z);
        assert_eq!(prior.gamma_f, Some(1.0));
        let rhs = gaussian_with_spectral_norm((3, 2, 2), 1.0, &mut rng);
        let eq = equation_perturb(&a, &z, &rhs, &Tensor3::zeros(rhs.dims()));
        assert_eq!(eq.actual_f, 0.0);
        assert_eq!(eq.bound_f, 0.0);
    }

    #[test]
    fn scaled_identity_posterior() {
        // A = 2I, E = 0.1I: A^-1 - B^-1 = (1/2 - 1/2.1) I
        let a = Tensor3::identity(2, 2).scale(2.0);
        let e = Tensor3::identity(2, 2).scale(0.1);
        let r = inv_perturb_posterior(&a, &e);
        let expect_actual = (0.5 - 1.0 / 2.1) / 0.5;
        assert!((r.actual_f - expect_actual).abs() < 1e-14);
        assert!((r.actual_2 - expect_actual).abs() < 1e-14);
        // kappa_2 = ||A||_2 ||B^-1||_2 = 2 / 2.1, bound_2 = kappa_2 * 0.1 / 2
        assert!((r.bound_2 - (2.0 / 2.1) * 0.05).abs() < 1e-14);
        assert!(r.all_hold());
    }

    #[test]
    fn scalar_prior() {
        let r = inv_perturb_prior(&scalar(2.0), &scalar(0.5));
        assert!((r.kappa_2 - 1.0).abs() < 1e-15);
        assert!((r.gamma_2.unwrap() - 0.75).abs() < 1e-15);
        assert!((r.bound_2 - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.actual_2 - 0.2).abs() < 1e-15);
        assert!(r.all_hold());
    }

    #[test]
    fn scalar_equation() {
        let r = equation_perturb(&scalar(4.0), &scalar(1.0), &scalar(8.0), &scalar(0.0));
        assert!((r.kappa_2 - 1.0).abs() < 1e-15);
        assert!((r.gamma_2.unwrap() - 0.75).abs() < 1e-15);
        assert!((r.bound_2 - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.actual_2 - 0.2).abs() < 1e-15);
        assert!(r.all_hold());
    }

    #[test]
    fn hypothesis_violations_are_reported() {
        let a = scalar(2.0);
        assert!(!inv_perturb_prior(&a, &scalar(0.5 + 1.5)).is_applicable());
        assert!(!inv_perturb_posterior(&a, &scalar(-2.0)).is_applicable());
        assert!(!inv_perturb_posterior(&scalar(0.0), &scalar(1.0)).is_applicable());
        assert!(!equation_perturb(&a, &scalar(0.1), &scalar(0.0), &scalar(1.0)).is_applicable());
    }

    #[test]
    fn random_trials_dominate() {
        let mut rng = rng_from_seed(2);
        for _ in 0..50 {
            let a = well_conditioned(4, 3, &mut rng);
            let e = gaussian_with_spectral_norm((4, 4, 3), 1e-3 * a.spectral_norm(), &mut rng);
            let rhs = gaussian_with_spectral_norm((4, 2, 3), 1.0, &mut rng);
            let k = gaussian_with_spectral_norm((4, 2, 3), 1e-2, &mut rng);
            for r in [inv_perturb_posterior(&a, &e), inv_perturb_prior(&a, &e), equation_perturb(&a, &e, &rhs, &k)] {
                assert!(r.is_applicable());
                assert!(r.all_hold(), "{r:?}");
            }
        }
    }
}
