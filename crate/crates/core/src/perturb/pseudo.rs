//! Bounds for `(A + E)^+` and for minimal-norm least-squares solutions.

use super::{mu_lambda, rel, BoundReport, GOLDEN_RATIO};
use crate::inverse::{multirank, pinv};
use crate::product::tprod;
use crate::tensor::Tensor3;

fn check_pair(a: &Tensor3, e: &Tensor3) {
    assert_eq!(a.dims(), e.dims(), "A and E must have the same dims");
}

/// General bound, no rank hypothesis:
///
/// `||B^+ - A^+||_F <= sqrt(2) max(||A^+||_2^2, ||B^+||_2^2) ||E||_F` and
/// `||B^+ - A^+||_2 <= (1 + sqrt(5))/2 max(||A^+||_2^2, ||B^+||_2^2) ||E||_2`.
///
/// Reported kappas are `||A||_F ||A^+||_2` and `||A||_2 ||A^+||_2`.
pub fn pinv_perturb_general(a: &Tensor3, e: &Tensor3) -> BoundReport {
    check_pair(a, e);
    let ap = pinv(a);
    let bp = pinv(&a.add(e).expect("same dims"));
    let diff = bp.sub(&ap).expect("same dims");
    let (ap2, bp2) = (ap.spectral_norm(), bp.spectral_norm());
    let m = (ap2 * ap2).max(bp2 * bp2);
    let bound = (std::f64::consts::SQRT_2 * m * e.frobenius_norm(), GOLDEN_RATIO * m * e.spectral_norm());
    let actual = (diff.frobenius_norm(), diff.spectral_norm());
    BoundReport::new(bound, actual, (a.frobenius_norm() * ap2, a.spectral_norm() * ap2))
}

/// Rank-preserving bound, requires `multirank(A) = multirank(A + E)`:
///
/// `||B^+ - A^+||_F <= mu ||A^+||_2 ||B^+||_2 ||E||_F` and the spectral form
/// with `lambda`, constants from [`mu_lambda`](super::mu_lambda).
///
/// The relative forms `||B^+ - A^+|| / ||B^+||_2 <= mu kappa ||E|| / ||A||_2`
/// (`kappa = ||A^+||_2 ||A||_2`, `lambda` for the spectral norm) are extras.
pub fn pinv_perturb_rank_preserving(a: &Tensor3, e: &Tensor3) -> BoundReport {
    check_pair(a, e);
    let b = a.add(e).expect("same dims");
    let ra = multirank(a, None);
    let rb = multirank(&b, None);
    if !ra.same_ranks(&rb) {
        return BoundReport::violated(format!("multirank changed from {:?} to {:?}", ra.ranks, rb.ranks));
    }
    let ml = mu_lambda(&ra, a.dims());
    let ap = pinv(a);
    let bp = pinv(&b);
    let diff = bp.sub(&ap).expect("same dims");
    let (ap2, bp2) = (ap.spectral_norm(), bp.spectral_norm());
    let (ef, e2) = (e.frobenius_norm(), e.spectral_norm());
    let a2 = a.spectral_norm();
    let kappa = ap2 * a2;
    let actual = (diff.frobenius_norm(), diff.spectral_norm());
    let bound = (ml.mu * ap2 * bp2 * ef, ml.lambda * ap2 * bp2 * e2);
    BoundReport::new(bound, actual, (a.frobenius_norm() * ap2, kappa))
        .with_mu_lambda(ml)
        .with_extra("||B^+-A^+||_F/||B^+||_2 <= mu*kappa*||E||_F/||A||_2", ml.mu * kappa * ef / a2, rel(actual.0, bp2))
        .with_extra("||B^+-A^+||_2/||B^+||_2 <= lambda*kappa*||E||_2/||A||_2", ml.lambda * kappa * e2 / a2, rel(actual.1, bp2))
}

/// Relative bound, requires the multirank to be preserved and
/// `||A^+||_2 ||E||_2 < 1`. With `gamma = 1 - ||A^+||_2 ||E||_2`:
///
/// `||B^+ - A^+||_F / ||A^+||_2 <= (mu kappa_1 / gamma) ||E||_F / ||A||_F` and
/// `||B^+ - A^+||_2 / ||A^+||_2 <= (mu kappa_2 / gamma) ||E||_2 / ||A||_2`,
/// `kappa_1 = ||A^+||_2 ||A||_F`, `kappa_2 = ||A^+||_2 ||A||_2`. Both use `mu`.
///
/// `||B^+||_2 <= ||A^+||_2 / gamma` is an extra.
pub fn pinv_perturb_relative(a: &Tensor3, e: &Tensor3) -> BoundReport {
    check_pair(a, e);
    let b = a.add(e).expect("same dims");
    let ra = multirank(a, None);
    let rb = multirank(&b, None);
    if !ra.same_ranks(&rb) {
        return BoundReport::violated(format!("multirank changed from {:?} to {:?}", ra.ranks, rb.ranks));
    }
    let ap = pinv(a);
    let ap2 = ap.spectral_norm();
    let (ef, e2) = (e.frobenius_norm(), e.spectral_norm());
    if ap2 * e2 >= 1.0 {
        return BoundReport::violated(format!("||A^+||_2 ||E||_2 = {:e} >= 1", ap2 * e2));
    }
    let ml = mu_lambda(&ra, a.dims());
    let bp = pinv(&b);
    let diff = bp.sub(&ap).expect("same dims");
    let (af, a2) = (a.frobenius_norm(), a.spectral_norm());
    let gamma = 1.0 - ap2 * e2;
    let kappa = (ap2 * af, ap2 * a2);
    let bound = (ml.mu * kappa.0 / gamma * ef / af, ml.mu * kappa.1 / gamma * e2 / a2);
    let actual = (rel(diff.frobenius_norm(), ap2), rel(diff.spectral_norm(), ap2));
    BoundReport::new(bound, actual, kappa)
        .with_gamma(gamma, gamma)
        .with_mu_lambda(ml)
        .with_extra("||B^+||_2 <= ||A^+||_2/gamma", ap2 / gamma, bp.spectral_norm())
}

/// Sensitivity of the minimal-norm least-squares solution `X = A^+ * B` to
/// `A -> A + E`, `B -> B + K`, under the hypotheses of
/// [`pinv_perturb_relative`]. With `R = B - A * X` and `Y = (A^+)^T`:
///
/// `||H||_F <= (kappa_1/gamma)(||E||_2/||A||_F ||X||_F + ||K||_F/||A||_F
///   + (kappa_1/gamma) ||E||_2/||A||_F ||R||_F/||A||_F + sqrt(n3) ||E||_2 ||Y*X||_F)`
///
/// and the spectral form without `sqrt(n3)`. When every face has full column
/// rank the last term drops; the main report then holds the three-term form
/// and the four-term form is kept as an extra per norm.
pub fn lstsq_perturb(a: &Tensor3, e: &Tensor3, rhs: &Tensor3, k: &Tensor3) -> BoundReport {
    check_pair(a, e);
    assert_eq!(rhs.dims(), k.dims(), "B and K must have the same dims");
    assert!(rhs.n1() == a.n1() && rhs.n3() == a.n3(), "B must be n1 x n4 x n3");
    let at = a.add(e).expect("same dims");
    let ra = multirank(a, None);
    let rt = multirank(&at, None);
    if !ra.same_ranks(&rt) {
        return BoundReport::violated(format!("multirank changed from {:?} to {:?}", ra.ranks, rt.ranks));
    }
    let ap = pinv(a);
    let ap2 = ap.spectral_norm();
    let e2 = e.spectral_norm();
    if ap2 * e2 >= 1.0 {
        return BoundReport::violated(format!("||A^+||_2 ||E||_2 = {:e} >= 1", ap2 * e2));
    }
    let x = tprod(&ap, rhs).expect("shapes checked");
    let xt = tprod(&pinv(&at), &rhs.add(k).expect("same dims")).expect("shapes checked");
    let h = xt.sub(&x).expect("same dims");
    let r = rhs.sub(&tprod(a, &x).expect("shapes checked")).expect("same dims");
    let yx = tprod(&ap.transpose(), &x).expect("shapes checked");

    let (af, a2) = (a.frobenius_norm(), a.spectral_norm());
    let gamma = 1.0 - ap2 * e2;
    let kappa = (ap2 * af, ap2 * a2);
    let (c1, c2) = (kappa.0 / gamma, kappa.1 / gamma);
    let n3 = a.n3() as f64;
    let three_f = c1 * (e2 / af * x.frobenius_norm() + k.frobenius_norm() / af + c1 * e2 / af * r.frobenius_norm() / af);
    let three_2 = c2 * (e2 / a2 * x.spectral_norm() + k.spectral_norm() / a2 + c2 * e2 / a2 * r.spectral_norm() / a2);
    let four_f = three_f + c1 * n3.sqrt() * e2 * yx.frobenius_norm();
    let four_2 = three_2 + c2 * e2 * yx.spectral_norm();
    let actual = (h.frobenius_norm(), h.spectral_norm());
    if ra.is_full_column_rank(a.n2()) {
        BoundReport::new((three_f, three_2), actual, kappa)
            .with_gamma(gamma, gamma)
            .with_extra("four-term ||H||_F", four_f, actual.0)
            .with_extra("four-term ||H||_2", four_2, actual.1)
    } else {
        BoundReport::new((four_f, four_2), actual, kappa).with_gamma(gamma, gamma)
    }
}
