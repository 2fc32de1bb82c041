//! Perturbation bounds for inverses, Moore-Penrose inverses, tensor equations,
//! least squares and SMW-structured multilinear systems.
//!
//! Every calculator evaluates the bound and the error it bounds on the same
//! instance and returns both in a [`BoundReport`]. A failed hypothesis is
//! reported through [`Applicability`], never as an `Err`.

mod inverse;
mod multilinear;
mod pseudo;

pub use inverse::{equation_perturb, inv_perturb_posterior, inv_perturb_prior};
pub use multilinear::{multilinear_smw_perturb, SmwEpsilons};
pub use pseudo::{lstsq_perturb, pinv_perturb_general, pinv_perturb_rank_preserving, pinv_perturb_relative};

use serde::Serialize;

use crate::inverse::MultiRank;
use crate::tensor::Dims;

/// Relative slack allowed when comparing an actual error against its bound.
pub const DOMINANCE_RTOL: f64 = 1e-9;
/// Absolute slack for bounds that vanish.
pub const DOMINANCE_ATOL: f64 = 1e-12;

/// `actual <= bound * (1 + 1e-9) + 1e-12`.
pub fn dominates(actual: f64, bound: f64) -> bool {
    actual <= bound * (1.0 + DOMINANCE_RTOL) + DOMINANCE_ATOL
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Applicability {
    Applicable,
    HypothesisViolated(String),
}

impl Applicability {
    pub fn is_applicable(&self) -> bool {
        matches!(self, Applicability::Applicable)
    }
}

/// A secondary inequality checked on the same instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub bound: f64,
    pub actual: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_f: f64,
    pub bound_2: f64,
    pub actual_f: f64,
    pub actual_2: f64,
    pub kappa_f: f64,
    pub kappa_2: f64,
    pub gamma_f: Option<f64>,
    pub gamma_2: Option<f64>,
    pub mu: Option<f64>,
    pub lambda: Option<f64>,
    /// Dominance verdict for the Frobenius and spectral bounds.
    pub holds: (bool, bool),
    pub applicability: Applicability,
    pub extras: Vec<BoundCheck>,
}

impl BoundReport {
    pub(crate) fn new(bound: (f64, f64), actual: (f64, f64), kappa: (f64, f64)) -> Self {
        Self {
            bound_f: bound.0,
            bound_2: bound.1,
            actual_f: actual.0,
            actual_2: actual.1,
            kappa_f: kappa.0,
            kappa_2: kappa.1,
            gamma_f: None,
            gamma_2: None,
            mu: None,
            lambda: None,
            holds: (dominates(actual.0, bound.0), dominates(actual.1, bound.1)),
            applicability: Applicability::Applicable,
            extras: Vec::new(),
        }
    }

    /// Report for an instance outside the hypotheses; numeric fields are NaN.
    pub(crate) fn violated(reason: impl Into<String>) -> Self {
        let mut r = Self::new((f64::NAN, f64::NAN), (f64::NAN, f64::NAN), (f64::NAN, f64::NAN));
        r.holds = (false, false);
        r.applicability = Applicability::HypothesisViolated(reason.into());
        r
    }

    pub(crate) fn with_gamma(mut self, gamma_f: f64, gamma_2: f64) -> Self {
        self.gamma_f = Some(gamma_f);
        self.gamma_2 = Some(gamma_2);
        self
    }

    pub(crate) fn with_mu_lambda(mut self, ml: MuLambda) -> Self {
        self.mu = Some(ml.mu);
        self.lambda = Some(ml.lambda);
        self
    }

    pub(crate) fn with_extra(mut self, name: &'static str, bound: f64, actual: f64) -> Self {
        self.extras.push(BoundCheck { name, bound, actual, holds: dominates(actual, bound) });
        self
    }

    pub fn is_applicable(&self) -> bool {
        self.applicability.is_applicable()
    }

    /// Both main bounds and every extra inequality hold.
    pub fn all_hold(&self) -> bool {
        self.holds.0 && self.holds.1 && self.extras.iter().all(|c| c.holds)
    }

    /// `actual / bound` per norm; `0` when both are zero.
    pub fn ratios(&self) -> (f64, f64) {
        (ratio(self.actual_f, self.bound_f), ratio(self.actual_2, self.bound_2))
    }
}

pub(crate) fn ratio(actual: f64, bound: f64) -> f64 {
    if actual == 0.0 {
        0.0
    } else {
        actual / bound
    }
}

/// `num / den`, with `0 / 0 = 0`.
pub(crate) fn rel(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RankCase {
    /// `sum(r) < min(n3 n1, n3 n2)`
    Deficient,
    /// `sum(r) = min(n3 n1, n3 n2)` with `n1 != n2`
    FullNonSquare,
    /// `sum(r) = n1 n3 = n2 n3`
    FullSquare,
}

/// Constants of the rank-preserving Moore-Penrose bounds: `mu` for the
/// Frobenius norm, `lambda` for the spectral norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuLambda {
    pub mu: f64,
    pub lambda: f64,
    pub case: RankCase,
}

pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

/// Classifies the total rank against `min(n3 n1, n3 n2)`.
pub fn mu_lambda(ranks: &MultiRank, dims: Dims) -> MuLambda {
    let total = ranks.total();
    let full = (dims.n3 * dims.n1).min(dims.n3 * dims.n2);
    assert!(total <= full, "multirank {total} exceeds min(n3 n1, n3 n2) = {full}");
    if total < full {
        MuLambda { mu: std::f64::consts::SQRT_2, lambda: GOLDEN_RATIO, case: RankCase::Deficient }
    } else if dims.n1 != dims.n2 {
        MuLambda { mu: 1.0, lambda: std::f64::consts::SQRT_2, case: RankCase::FullNonSquare }
    } else {
        MuLambda { mu: 1.0, lambda: 1.0, case: RankCase::FullSquare }
    }
}
