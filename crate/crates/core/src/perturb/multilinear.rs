//! Sensitivity of `A * X = D` under an SMW-structured perturbation
//! `E = (X1 + Y1) * B * (X2 + Y2)^T` and a right-hand-side perturbation `H`.

use serde::Serialize;

use super::{rel, BoundReport};
use crate::inverse::pinv;
use crate::product::tprod;
use crate::smw::{check_smw_conditions, smw_pinv, SmwFactors};
use crate::solve::solve_exact;
use crate::tensor::Tensor3;

/// Size parameters of the perturbation, one pair per norm:
/// `||Xi||, ||Ei||, ||B^+|| <= eps_a ||A||` and `||H|| <= eps_d ||D||`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmwEpsilons {
    pub a_f: f64,
    pub a_2: f64,
    pub d_f: f64,
    pub d_2: f64,
}

impl SmwEpsilons {
    /// Smallest values satisfying every hypothesis.
    pub fn tightest(a: &Tensor3, f: &SmwFactors, d: &Tensor3, h: &Tensor3) -> Self {
        let bp = pinv(&f.b);
        let parts = [&f.x1, &f.x2, &f.e1, &f.e2, &bp];
        let max_f = parts.iter().map(|t| t.frobenius_norm()).fold(0.0, f64::max);
        let max_2 = parts.iter().map(|t| t.spectral_norm()).fold(0.0, f64::max);
        Self {
            a_f: max_f / a.frobenius_norm(),
            a_2: max_2 / a.spectral_norm(),
            d_f: rel(h.frobenius_norm(), d.frobenius_norm()),
            d_2: rel(h.spectral_norm(), d.spectral_norm()),
        }
    }

    /// Name of the first hypothesis these values fail on the instance.
    fn first_violation(&self, a: &Tensor3, f: &SmwFactors, d: &Tensor3, h: &Tensor3) -> Option<String> {
        let bp = pinv(&f.b);
        let named = [("X1", &f.x1), ("X2", &f.x2), ("E1", &f.e1), ("E2", &f.e2), ("B^+", &bp)];
        let slack = 1.0 + super::DOMINANCE_RTOL;
        for (name, t) in named {
            if t.frobenius_norm() > self.a_f * a.frobenius_norm() * slack {
                return Some(format!("||{name}||_F > eps_A ||A||_F"));
            }
            if t.spectral_norm() > self.a_2 * a.spectral_norm() * slack {
                return Some(format!("||{name}||_2 > eps_A ||A||_2"));
            }
        }
        if h.frobenius_norm() > self.d_f * d.frobenius_norm() * slack {
            return Some("||H||_F > eps_D ||D||_F".into());
        }
        if h.spectral_norm() > self.d_2 * d.spectral_norm() * slack {
            return Some("||H||_2 > eps_D ||D||_2".into());
        }
        None
    }
}

/// Relative change of the minimal-norm solution `X = A^+ * D` when the system
/// becomes `(A + E) * Y = D + H`, with `Y = (A + E)^+ * (D + H)` computed
/// through [`smw_pinv`].
///
/// Main bounds, with `eps = (eps_A, eps_D)` in the matching norm:
///
/// `(1 + eps_D) ||D||_F^3 ||X||_F (2 n3^2 eps_A^2 ||A^+||_F + n3^2 eps_A^3 ||A||_F
///   + n3^3 eps_A^4 ||A||_F^2 ||A^+||_F) + n3 eps_D ||A||_F ||A^+||_F`
///
/// and the spectral form without the `n3` powers. These are not invariant
/// under rescaling of `D`; the extras carry a term-by-term bound from the
/// same expansion of `Y - X`, in spectral-norm `eps_A`:
///
/// `(||D|| (2 e^2 a^2 p + e^3 a^3 + e^4 a^4 p) + ||H|| (p + 2 e^2 a^2 p + e^3 a^3 + e^4 a^4 p)) / ||X||`
///
/// with `e = eps_A`, `a = ||A||_2`, `p = ||A^+||_2` and `||D||`, `||H||`,
/// `||X||` in the norm being bounded.
///
/// `eps = None` uses [`SmwEpsilons::tightest`]. Hypothesis failures (SMW
/// conditions, `D = 0`, inconsistent `D`, explicit epsilons too small) are
/// reported in the applicability field.
pub fn multilinear_smw_perturb(a: &Tensor3, f: &SmwFactors, d: &Tensor3, h: &Tensor3, eps: Option<SmwEpsilons>) -> BoundReport {
    assert_eq!(d.dims(), h.dims(), "D and H must have the same dims");
    assert!(d.n1() == a.n1() && d.n3() == a.n3(), "D must be n1 x n4 x n3");
    if d.is_zero() {
        return BoundReport::violated("D = 0");
    }
    if a.is_zero() {
        return BoundReport::violated("A = 0");
    }
    match check_smw_conditions(f) {
        Err(err) => return BoundReport::violated(format!("malformed factors: {err}")),
        Ok(report) if !report.satisfied => {
            return BoundReport::violated(format!("SMW conditions fail (worst residual {:e})", report.worst()))
        }
        Ok(_) => {}
    }
    let sol = match solve_exact(a, d, None) {
        Ok(s) => s,
        Err(err) => return BoundReport::violated(format!("A * X = D: {err}")),
    };
    if !sol.consistent {
        return BoundReport::violated(format!("A * X = D is inconsistent (residual {:e})", sol.consistency_residual));
    }
    let eps = match eps {
        Some(e) => {
            if let Some(reason) = e.first_violation(a, f, d, h) {
                return BoundReport::violated(reason);
            }
            e
        }
        None => SmwEpsilons::tightest(a, f, d, h),
    };
    let mp = match smw_pinv(a, f) {
        Ok(m) => m,
        Err(err) => return BoundReport::violated(err.to_string()),
    };
    let x = sol.particular;
    let y = tprod(&mp, &d.add(h).expect("same dims")).expect("shapes checked");
    let diff = y.sub(&x).expect("same dims");
    let (xf, x2) = (x.frobenius_norm(), x.spectral_norm());
    let actual = (rel(diff.frobenius_norm(), xf), rel(diff.spectral_norm(), x2));

    let ap = pinv(a);
    let (af, a2) = (a.frobenius_norm(), a.spectral_norm());
    let (apf, ap2) = (ap.frobenius_norm(), ap.spectral_norm());
    let (df, d2) = (d.frobenius_norm(), d.spectral_norm());
    let n3 = a.n3() as f64;

    let (ea, ed) = (eps.a_f, eps.d_f);
    let bound_f = (1.0 + ed) * df.powi(3) * xf * (2.0 * n3.powi(2) * ea.powi(2) * apf + n3.powi(2) * ea.powi(3) * af + n3.powi(3) * ea.powi(4) * af.powi(2) * apf)
        + n3 * ed * af * apf;
    let (ea, ed) = (eps.a_2, eps.d_2);
    let bound_2 = (1.0 + ed) * d2.powi(3) * x2 * (2.0 * ea.powi(2) * ap2 + ea.powi(3) * a2 + ea.powi(4) * a2.powi(2) * ap2) + ed * a2 * ap2;

    let e = eps.a_2;
    let update = 2.0 * e.powi(2) * a2.powi(2) * ap2 + e.powi(3) * a2.powi(3) + e.powi(4) * a2.powi(4) * ap2;
    let termwise = |dn: f64, hn: f64, xn: f64| rel(dn * update + hn * (ap2 + update), xn);
    let termwise_f = termwise(df, h.frobenius_norm(), xf);
    let termwise_2 = termwise(d2, h.spectral_norm(), x2);

    BoundReport::new((bound_f, bound_2), actual, (af * apf, a2 * ap2))
        .with_extra("term-wise ||Y-X||_F/||X||_F", termwise_f, actual.0)
        .with_extra("term-wise ||Y-X||_2/||X||_2", termwise_2, actual.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gaussian, gaussian_with_frobenius_norm, rng_from_seed};
    use crate::smw::{build_smw_factors, construct_conditioned_instance, InstanceFamily};

    fn zero_factors(a: &Tensor3, k: usize) -> SmwFactors {
        let n3 = a.n3();
        build_smw_factors(a, &Tensor3::zeros((a.n1(), k, n3)), &Tensor3::zeros((k, k, n3)), &Tensor3::zeros((k, a.n2(), n3))).unwrap()
    }

    #[test]
    fn no_perturbation_gives_zero_error() {
        let (a, _) = construct_conditioned_instance((4, 2, 3), InstanceFamily::MatrixLifted, 1).unwrap();
        let mut rng = rng_from_seed(1);
        let d = tprod(&a, &gaussian((4, 2, 3), &mut rng)).unwrap();
        let r = multilinear_smw_perturb(&a, &zero_factors(&a, 2), &d, &Tensor3::zeros(d.dims()), None);
        assert!(r.is_applicable(), "{r:?}");
        assert!(r.actual_f < 1e-13);
        assert!(r.all_hold());
    }

    #[test]
    fn rhs_only_reduces_to_last_term() {
        let (a, _) = construct_conditioned_instance((4, 2, 2), InstanceFamily::MatrixLifted, 2).unwrap();
        let mut rng = rng_from_seed(2);
        let d = tprod(&a, &gaussian((4, 1, 2), &mut rng)).unwrap();
        let h = gaussian_with_frobenius_norm(d.dims(), 1e-3 * d.frobenius_norm(), &mut rng);
        let f = zero_factors(&a, 1);
        let r = multilinear_smw_perturb(&a, &f, &d, &h, None);
        let eps = SmwEpsilons::tightest(&a, &f, &d, &h);
        assert_eq!(eps.a_f, 0.0);
        let ap = pinv(&a);
        let expected = 2.0 * eps.d_f * a.frobenius_norm() * ap.frobenius_norm();
        assert!((r.bound_f - expected).abs() < 1e-12 * expected);
        assert!(r.all_hold(), "{r:?}");
    }

    #[test]
    fn structured_instances_dominate() {
        for seed in 0..30 {
            let family = if seed % 2 == 0 { InstanceFamily::MatrixLifted } else { InstanceFamily::Trivial };
            let (a, f) = construct_conditioned_instance((3, 2, 2), family, seed).unwrap();
            let mut rng = rng_from_seed(100 + seed);
            let d = tprod(&a, &gaussian((3, 2, 2), &mut rng)).unwrap();
            let h = gaussian_with_frobenius_norm(d.dims(), 1e-3 * d.frobenius_norm(), &mut rng);
            let r = multilinear_smw_perturb(&a, &f, &d, &h, None);
            assert!(r.is_applicable(), "{r:?}");
            assert!(r.all_hold(), "seed {seed}: {r:?}");
        }
    }

    #[test]
    fn hypotheses_are_checked() {
        let (a, f) = construct_conditioned_instance((4, 2, 2), InstanceFamily::MatrixLifted, 3).unwrap();
        let mut rng = rng_from_seed(3);
        let d = tprod(&a, &gaussian((4, 1, 2), &mut rng)).unwrap();
        let h = Tensor3::zeros(d.dims());
        assert!(!multilinear_smw_perturb(&a, &f, &Tensor3::zeros(d.dims()), &h, None).is_applicable());
        let outside = d.add(&gaussian(d.dims(), &mut rng)).unwrap();
        assert!(!multilinear_smw_perturb(&a, &f, &outside, &h, None).is_applicable());
        let tiny = SmwEpsilons { a_f: 1e-9, a_2: 1e-9, d_f: 0.0, d_2: 0.0 };
        match multilinear_smw_perturb(&a, &f, &d, &h, Some(tiny)).applicability {
            super::super::Applicability::HypothesisViolated(reason) => assert!(reason.contains("eps_A"), "{reason}"),
            other => panic!("{other:?}"),
        }
        // invertible A leaves no orthogonal part, so a nonzero update cannot satisfy the conditions
        let full = gaussian((4, 4, 2), &mut rng);
        let generic = build_smw_factors(&full, &gaussian(f.u.dims(), &mut rng), &f.b, &gaussian((2, 4, 2), &mut rng)).unwrap();
        let d_full = tprod(&full, &gaussian((4, 1, 2), &mut rng)).unwrap();
        assert!(!multilinear_smw_perturb(&full, &generic, &d_full, &h, None).is_applicable());
    }
}
