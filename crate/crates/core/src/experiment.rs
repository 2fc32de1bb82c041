//! Seeded bound-verification experiments.
//!
//! Trial `t` of an experiment with master seed `s` draws its instance from
//! `rng_from_seed(trial_seed(s, t))`, so any trial can be replayed alone with
//! [`run_trial`]. Trials may run in parallel; rows are collected in trial order
//! and the report does not depend on the degree of parallelism.

use std::fmt;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TensorError};
use crate::generate::{
    gaussian, gaussian_with_frobenius_norm, gaussian_with_spectral_norm, random_rank_profile, rank_preserving_perturbation,
    rng_from_seed, trial_seed, well_conditioned, with_multirank, TrialRng,
};
use crate::fourier::mirror_index;
use crate::inverse::{inv, pinv};
use crate::par;
use crate::perturb::{self, Applicability, BoundReport};
use crate::product::tprod;
use crate::smw::{construct_conditioned_instance, smw_inverse, smw_pinv, InstanceFamily, SmwDims};
use crate::tensor::Tensor3;

/// Agreement tolerance for `smw_inverse` against the direct inverse.
pub const SMW_INVERSE_TOL: f64 = 1e-9;
/// Agreement tolerance for `smw_pinv` against the face-wise pseudo-inverse.
pub const SMW_PINV_TOL: f64 = 1e-8;

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    T3_1,
    T3_2,
    T3_3,
    T4_1,
    T4_2,
    T4_3,
    T4_4,
    T5_2,
    SMW_INV,
    SMW_PINV,
}

impl Theorem {
    pub const ALL: [Theorem; 10] = [
        Theorem::T3_1,
        Theorem::T3_2,
        Theorem::T3_3,
        Theorem::T4_1,
        Theorem::T4_2,
        Theorem::T4_3,
        Theorem::T4_4,
        Theorem::T5_2,
        Theorem::SMW_INV,
        Theorem::SMW_PINV,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::T3_1 => "T3_1",
            Theorem::T3_2 => "T3_2",
            Theorem::T3_3 => "T3_3",
            Theorem::T4_1 => "T4_1",
            Theorem::T4_2 => "T4_2",
            Theorem::T4_3 => "T4_3",
            Theorem::T4_4 => "T4_4",
            Theorem::T5_2 => "T5_2",
            Theorem::SMW_INV => "SMW_INV",
            Theorem::SMW_PINV => "SMW_PINV",
        }
    }

    /// What the calculator bounds, for `--help` output.
    pub fn describe(self) -> &'static str {
        match self {
            Theorem::T3_1 => "inverse perturbation, a-posteriori (uses (A+E)^-1)",
            Theorem::T3_2 => "inverse perturbation, a-priori (needs ||A^-1|| ||E|| < 1)",
            Theorem::T3_3 => "tensor equation A*X = B under perturbed A and B",
            Theorem::T4_1 => "Moore-Penrose inverse, general perturbation",
            Theorem::T4_2 => "Moore-Penrose inverse, multirank-preserving perturbation",
            Theorem::T4_3 => "Moore-Penrose inverse, relative bound with gamma",
            Theorem::T4_4 => "minimal-norm least squares",
            Theorem::T5_2 => "multilinear system under an SMW-structured perturbation",
            Theorem::SMW_INV => "SMW inverse formula against the direct inverse",
            Theorem::SMW_PINV => "SMW Moore-Penrose formula against the face-wise pseudo-inverse",
        }
    }

    fn needs_square(self) -> bool {
        matches!(self, Theorem::T3_1 | Theorem::T3_2 | Theorem::T3_3 | Theorem::SMW_INV)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theorem {
    type Err = TensorError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace(['-', '.'], "_");
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == norm)
            .ok_or_else(|| TensorError::Parse(format!("unknown theorem {s:?}; expected one of {}", Theorem::ALL.map(|t| t.name()).join(", "))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = TensorError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(TensorError::Parse(format!("unknown format {s:?}; expected csv or json"))),
        }
    }
}

fn default_n4() -> usize {
    2
}

/// `(n1, n2, n3, n4)`; `n4` is the column count of right-hand sides. In JSON
/// it is `[n1, n2, n3]` or `[n1, n2, n3, n4]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExperimentDims {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub n4: usize,
}

impl ExperimentDims {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: std::result::Result<Vec<usize>, _> = s.split(',').map(|p| p.trim().parse::<usize>()).collect();
        let parts = parts.map_err(|e| TensorError::Parse(format!("dims {s:?}: {e}")))?;
        Self::from_slice(&parts)
    }

    fn from_slice(parts: &[usize]) -> Result<Self> {
        match *parts {
            [n1, n2, n3] => Ok(Self { n1, n2, n3, n4: default_n4() }),
            [n1, n2, n3, n4] => Ok(Self { n1, n2, n3, n4 }),
            _ => Err(TensorError::Parse(format!("dims need 3 or 4 entries, got {}", parts.len()))),
        }
    }
}

impl Serialize for ExperimentDims {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.n1, self.n2, self.n3, self.n4].serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExperimentDims {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Self::from_slice(&v).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub theorem: Theorem,
    pub dims: ExperimentDims,
    pub trials: usize,
    pub seed: u64,
    /// Relative perturbation size; how it enters depends on the theorem.
    #[serde(alias = "perturbation_scale")]
    pub scale: f64,
    /// Fixed multirank for the Moore-Penrose theorems; random when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_profile: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: ReportFormat,
}

impl ExperimentConfig {
    pub fn new(theorem: Theorem, dims: ExperimentDims, trials: usize, seed: u64, scale: f64) -> Self {
        Self { theorem, dims, trials, seed, scale, rank_profile: None, output: None, format: ReportFormat::Csv }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dims;
        if d.n1 == 0 || d.n2 == 0 || d.n3 == 0 || d.n4 == 0 {
            return Err(TensorError::InfeasibleDims(format!("dims must be positive, got {d:?}")));
        }
        if self.trials == 0 {
            return Err(TensorError::InfeasibleDims("trials must be at least 1".into()));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(TensorError::InfeasibleDims(format!("scale must be positive and finite, got {}", self.scale)));
        }
        if self.theorem.needs_square() && d.n1 != d.n2 {
            return Err(TensorError::InfeasibleDims(format!("{} needs n1 = n2, got {}x{}", self.theorem, d.n1, d.n2)));
        }
        if matches!(self.theorem, Theorem::T5_2 | Theorem::SMW_PINV) && d.n1.min(d.n2) < 2 {
            return Err(TensorError::InfeasibleDims(format!("{} needs min(n1, n2) >= 2", self.theorem)));
        }
        if let Some(p) = &self.rank_profile {
            if p.len() != d.n3 {
                return Err(TensorError::InfeasibleDims(format!("rank profile has {} entries, n3 = {}", p.len(), d.n3)));
            }
            for (i, &r) in p.iter().enumerate() {
                if r > d.n1.min(d.n2) || r != p[mirror_index(i, d.n3)] {
                    return Err(TensorError::InfeasibleDims(format!(
                        "rank profile {p:?} must be conjugate-symmetric with entries <= min(n1, n2)"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub trial: usize,
    pub seed: u64,
    pub applicability: Applicability,
    pub bound_f: f64,
    pub actual_f: f64,
    pub ratio_f: f64,
    pub bound_2: f64,
    pub actual_2: f64,
    pub ratio_2: f64,
    pub holds_f: bool,
    pub holds_2: bool,
    pub kappa_f: f64,
    pub kappa_2: f64,
    pub gamma_f: Option<f64>,
    pub gamma_2: Option<f64>,
    pub mu: Option<f64>,
    pub lambda: Option<f64>,
    /// Every secondary inequality of the calculator held.
    pub extras_hold: bool,
}

pub const CSV_HEADER: &str =
    "trial,seed,applicability,bound_f,actual_f,ratio_f,bound_2,actual_2,ratio_2,holds_f,holds_2,kappa_f,kappa_2,gamma_f,gamma_2,mu,lambda,extras_hold";

impl ExperimentRow {
    fn from_report(trial: usize, seed: u64, r: BoundReport) -> Self {
        let (ratio_f, ratio_2) = r.ratios();
        Self {
            trial,
            seed,
            bound_f: r.bound_f,
            actual_f: r.actual_f,
            ratio_f,
            bound_2: r.bound_2,
            actual_2: r.actual_2,
            ratio_2,
            holds_f: r.holds.0,
            holds_2: r.holds.1,
            kappa_f: r.kappa_f,
            kappa_2: r.kappa_2,
            gamma_f: r.gamma_f,
            gamma_2: r.gamma_2,
            mu: r.mu,
            lambda: r.lambda,
            extras_hold: r.extras.iter().all(|c| c.holds),
            applicability: r.applicability,
        }
    }

    pub fn is_applicable(&self) -> bool {
        self.applicability.is_applicable()
    }

    /// Applicable and some bound (main or extra) failed.
    pub fn is_violation(&self) -> bool {
        self.is_applicable() && !(self.holds_f && self.holds_2 && self.extras_hold)
    }

    fn csv_line(&self) -> String {
        let app = match &self.applicability {
            Applicability::Applicable => "Applicable".to_string(),
            Applicability::HypothesisViolated(r) => format!("\"HypothesisViolated: {}\"", r.replace('"', "'")),
        };
        let f = |x: f64| format!("{x:.16e}");
        let o = |x: Option<f64>| x.map(f).unwrap_or_default();
        [
            self.trial.to_string(),
            self.seed.to_string(),
            app,
            f(self.bound_f),
            f(self.actual_f),
            f(self.ratio_f),
            f(self.bound_2),
            f(self.actual_2),
            f(self.ratio_2),
            self.holds_f.to_string(),
            self.holds_2.to_string(),
            f(self.kappa_f),
            f(self.kappa_2),
            o(self.gamma_f),
            o(self.gamma_2),
            o(self.mu),
            o(self.lambda),
            self.extras_hold.to_string(),
        ]
        .join(",")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub trials: usize,
    pub applicable: usize,
    pub hypothesis_violations: usize,
    pub bound_violations: usize,
    /// Largest `actual / bound` over applicable trials, per norm.
    pub max_ratio_f: f64,
    pub max_ratio_2: f64,
}

impl ExperimentSummary {
    fn from_rows(rows: &[ExperimentRow]) -> Self {
        let applicable: Vec<&ExperimentRow> = rows.iter().filter(|r| r.is_applicable()).collect();
        let max = |g: fn(&ExperimentRow) -> f64| applicable.iter().map(|r| g(r)).filter(|x| !x.is_nan()).fold(0.0, f64::max);
        Self {
            trials: rows.len(),
            applicable: applicable.len(),
            hypothesis_violations: rows.len() - applicable.len(),
            bound_violations: rows.iter().filter(|r| r.is_violation()).count(),
            max_ratio_f: max(|r| r.ratio_f),
            max_ratio_2: max(|r| r.ratio_2),
        }
    }

    pub fn max_ratio(&self) -> f64 {
        self.max_ratio_f.max(self.max_ratio_2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub rows: Vec<ExperimentRow>,
    pub summary: ExperimentSummary,
}

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv_line());
            out.push('\n');
        }
        let s = &self.summary;
        writeln!(
            out,
            "# summary theorem={} trials={} applicable={} hypothesis_violations={} bound_violations={} max_ratio_f={:.16e} max_ratio_2={:.16e}",
            self.config.theorem, s.trials, s.applicable, s.hypothesis_violations, s.bound_violations, s.max_ratio_f, s.max_ratio_2
        )
        .expect("writing to a String");
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render(&self) -> String {
        match self.config.format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Json => self.to_json(),
        }
    }
}

/// Runs every trial of `cfg`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let rows = par::map_range(cfg.trials, |t| run_trial(cfg, t));
    let summary = ExperimentSummary::from_rows(&rows);
    Ok(ExperimentReport { config: cfg.clone(), rows, summary })
}

/// Runs trial `trial` of `cfg` in isolation. `cfg` must be valid.
pub fn run_trial(cfg: &ExperimentConfig, trial: usize) -> ExperimentRow {
    let seed = trial_seed(cfg.seed, trial as u64);
    let mut rng = rng_from_seed(seed);
    let report = evaluate(cfg, trial, &mut rng);
    ExperimentRow::from_report(trial, seed, report)
}

fn ranks(cfg: &ExperimentConfig, min_rank: usize, rng: &mut TrialRng) -> Vec<usize> {
    let d = cfg.dims;
    cfg.rank_profile.clone().unwrap_or_else(|| random_rank_profile(d.n1, d.n2, d.n3, min_rank, rng))
}

fn low_rank(cfg: &ExperimentConfig, min_rank: usize, rng: &mut TrialRng) -> Tensor3 {
    let d = cfg.dims;
    let r = ranks(cfg, min_rank, rng);
    with_multirank(d.n1, d.n2, &r, rng).expect("validated rank profile")
}

fn evaluate(cfg: &ExperimentConfig, trial: usize, rng: &mut TrialRng) -> BoundReport {
    let d = cfg.dims;
    let s = cfg.scale;
    let a_dims = (d.n1, d.n2, d.n3);
    let rhs_dims = (d.n1, d.n4, d.n3);
    match cfg.theorem {
        Theorem::T3_1 | Theorem::T3_2 => {
            let a = well_conditioned(d.n1, d.n3, rng);
            let e = gaussian_with_spectral_norm(a_dims, s * a.spectral_norm(), rng);
            if cfg.theorem == Theorem::T3_1 {
                perturb::inv_perturb_posterior(&a, &e)
            } else {
                perturb::inv_perturb_prior(&a, &e)
            }
        }
        Theorem::T3_3 => {
            let a = well_conditioned(d.n1, d.n3, rng);
            let e = gaussian_with_spectral_norm(a_dims, s * a.spectral_norm(), rng);
            let b = gaussian(rhs_dims, rng);
            let k = gaussian_with_frobenius_norm(rhs_dims, s * b.frobenius_norm(), rng);
            perturb::equation_perturb(&a, &e, &b, &k)
        }
        Theorem::T4_1 => {
            let a = low_rank(cfg, 0, rng);
            let e = gaussian_with_spectral_norm(a_dims, s * a.spectral_norm().max(1.0), rng);
            perturb::pinv_perturb_general(&a, &e)
        }
        Theorem::T4_2 | Theorem::T4_3 => {
            let a = low_rank(cfg, 1, rng);
            let e = rank_preserving_perturbation(&a, s * a.spectral_norm(), rng).expect("real faces");
            if cfg.theorem == Theorem::T4_2 {
                perturb::pinv_perturb_rank_preserving(&a, &e)
            } else {
                perturb::pinv_perturb_relative(&a, &e)
            }
        }
        Theorem::T4_4 => {
            let a = low_rank(cfg, 1, rng);
            let e = rank_preserving_perturbation(&a, s * a.spectral_norm(), rng).expect("real faces");
            let b = gaussian(rhs_dims, rng);
            let k = gaussian_with_frobenius_norm(rhs_dims, s * b.frobenius_norm(), rng);
            perturb::lstsq_perturb(&a, &e, &b, &k)
        }
        Theorem::T5_2 => {
            let (family, k) = smw_family(trial, d.n1.min(d.n2));
            let sd = SmwDims { n1: d.n1, n2: d.n2, k, n3: d.n3 };
            let (a, mut f) = match construct_conditioned_instance(sd, family, rng.next_u64_compat()) {
                Ok(x) => x,
                Err(err) => return BoundReport::violated(err.to_string()),
            };
            // scaling B keeps every SMW condition (they are homogeneous in B)
            f.b = f.b.scale(s);
            f = crate::smw::build_smw_factors(&a, &f.u, &f.b, &f.v).expect("shapes from the generator");
            let w = gaussian((d.n2, d.n4, d.n3), rng);
            let dd = tprod(&a, &w).expect("shapes agree");
            let h = gaussian_with_frobenius_norm(rhs_dims, s * dd.frobenius_norm(), rng);
            perturb::multilinear_smw_perturb(&a, &f, &dd, &h, None)
        }
        Theorem::SMW_INV => {
            let k = 1 + trial % 3;
            let a = well_conditioned(d.n1, d.n3, rng);
            let b = well_conditioned(k, d.n3, rng);
            let u = gaussian_with_spectral_norm((d.n1, k, d.n3), s.sqrt(), rng);
            let v = gaussian_with_spectral_norm((k, d.n1, d.n3), s.sqrt(), rng);
            let got = match smw_inverse(&a, &u, &b, &v) {
                Ok(x) => x,
                Err(err) => return BoundReport::violated(err.to_string()),
            };
            let m = a.add(&tprod(&tprod(&u, &b).expect("shapes"), &v).expect("shapes")).expect("same dims");
            let Ok(direct) = inv(&m) else {
                return BoundReport::violated("A + U*B*V is singular");
            };
            agreement_report(&got, &direct, SMW_INVERSE_TOL)
        }
        Theorem::SMW_PINV => {
            let (family, k) = smw_family(trial, d.n1.min(d.n2));
            let sd = SmwDims { n1: d.n1, n2: d.n2, k, n3: d.n3 };
            let (a, f) = match construct_conditioned_instance(sd, family, rng.next_u64_compat()) {
                Ok(x) => x,
                Err(err) => return BoundReport::violated(err.to_string()),
            };
            let m = a.add(&f.update().expect("shapes")).expect("same dims");
            match smw_pinv(&a, &f) {
                Ok(got) => agreement_report(&got, &pinv(&m), SMW_PINV_TOL),
                Err(err) => BoundReport::violated(err.to_string()),
            }
        }
    }
}

/// Alternates the two conditioned-instance families. The matrix-lifted family
/// needs `min(n1, n2) >= k + 1`, the trivial one `k >= 2`.
fn smw_family(trial: usize, min_dim: usize) -> (InstanceFamily, usize) {
    if trial % 2 == 0 || min_dim < 2 {
        (InstanceFamily::MatrixLifted, 1.max(min_dim.saturating_sub(1)).min(2))
    } else {
        (InstanceFamily::Trivial, 2)
    }
}

/// Relative discrepancy of `got` from `want` in both norms against a fixed
/// tolerance.
fn agreement_report(got: &Tensor3, want: &Tensor3, tol: f64) -> BoundReport {
    let diff = got.sub(want).expect("same dims");
    let actual = (perturb::rel(diff.frobenius_norm(), want.frobenius_norm()), perturb::rel(diff.spectral_norm(), want.spectral_norm()));
    BoundReport::new((tol, tol), actual, (f64::NAN, f64::NAN))
}

trait NextSeed {
    fn next_u64_compat(&mut self) -> u64;
}

impl NextSeed for TrialRng {
    fn next_u64_compat(&mut self) -> u64 {
        rand::RngCore::next_u64(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(theorem: Theorem, dims: &str, trials: usize) -> ExperimentConfig {
        ExperimentConfig::new(theorem, ExperimentDims::parse(dims).unwrap(), trials, 7, 1e-3)
    }

    #[test]
    fn theorem_names_round_trip() {
        for t in Theorem::ALL {
            assert_eq!(t.name().parse::<Theorem>().unwrap(), t);
        }
        assert_eq!("smw-pinv".parse::<Theorem>().unwrap(), Theorem::SMW_PINV);
        assert!("T9_9".parse::<Theorem>().is_err());
    }

    #[test]
    fn dims_parsing() {
        let d = ExperimentDims::parse("4,4,3").unwrap();
        assert_eq!((d.n1, d.n2, d.n3, d.n4), (4, 4, 3, 2));
        assert_eq!(ExperimentDims::parse("3, 5, 2, 1").unwrap().n4, 1);
        assert!(ExperimentDims::parse("3,5").is_err());
        assert!(ExperimentDims::parse("a,b,c").is_err());
    }

    #[test]
    fn config_validation() {
        assert!(cfg(Theorem::T3_1, "3,4,2", 1).validate().is_err());
        assert!(cfg(Theorem::T4_1, "3,4,2", 0).validate().is_err());
        let mut c = cfg(Theorem::T4_2, "3,3,3", 1);
        c.rank_profile = Some(vec![3, 1, 2]);
        assert!(c.validate().is_err());
        c.rank_profile = Some(vec![3, 1, 1]);
        assert!(c.validate().is_ok());
        c.scale = -1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_json() {
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"theorem":"T4_2","dims":[4,4,3],"trials":5,"seed":1,"perturbation_scale":1e-3,"format":"json"}"#).unwrap();
        assert_eq!(c.theorem, Theorem::T4_2);
        assert_eq!(c.dims.n4, 2);
        assert_eq!(c.format, ReportFormat::Json);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"theorem":"T4_2","dims":[4,4,3],"trials":5,"seed":1,"scale":1,"bogus":1}"#).is_err());
    }

    #[test]
    fn every_theorem_runs_and_holds() {
        for t in Theorem::ALL {
            let dims = match t {
                Theorem::T4_1 | Theorem::T4_2 | Theorem::T4_3 | Theorem::T4_4 => "3,5,2,2",
                _ => "3,3,2,2",
            };
            let r = run_experiment(&cfg(t, dims, 6)).unwrap();
            assert_eq!(r.rows.len(), 6);
            assert!(r.summary.applicable > 0, "{t}: {:?}", r.rows[0].applicability);
            assert_eq!(r.summary.bound_violations, 0, "{t}: {:?}", r.rows);
        }
    }

    #[test]
    fn trials_replay_in_isolation() {
        let c = cfg(Theorem::T4_4, "6,3,2,2", 4);
        let r = run_experiment(&c).unwrap();
        assert_eq!(run_trial(&c, 2), r.rows[2]);
    }

    #[test]
    fn csv_shape() {
        let r = run_experiment(&cfg(Theorem::T3_2, "3,3,2", 3)).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(lines[4].starts_with("# summary theorem=T3_2 trials=3"));
        assert_eq!(lines[1].split(',').count(), CSV_HEADER.split(',').count());
        assert_eq!(csv, run_experiment(&cfg(Theorem::T3_2, "3,3,2", 3)).unwrap().to_csv());
    }
}
