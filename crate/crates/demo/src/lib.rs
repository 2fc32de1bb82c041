//! WebAssembly entry points for the browser demo in `www/`.
//!
//! Every function returns a JSON string so the page needs no bindings beyond
//! plain strings and numbers. Errors come back as `{"error": "..."}`.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

use tprod_core::experiment::{run_experiment, ExperimentConfig, ExperimentDims, Theorem};
use tprod_core::fourier::to_faces;
use tprod_core::generate::{random_rank_profile, rng_from_seed, with_multirank};
use tprod_core::linalg::singular_values;
use tprod_core::{check_smw_conditions, construct_conditioned_instance, pinv, smw_pinv, InstanceFamily, SmwDims};

/// Demo inputs are capped so a click never freezes the tab.
const MAX_DIM: usize = 8;
const MAX_TRIALS: usize = 2000;

fn error(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

fn check_dims(dims: &[usize]) -> Result<(), String> {
    if dims.iter().any(|&d| d == 0 || d > MAX_DIM) {
        return Err(format!("dimensions must be between 1 and {MAX_DIM}"));
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepPoint {
    trial: usize,
    applicable: bool,
    ratio_f: f64,
    ratio_2: f64,
    holds: bool,
}

/// Runs `trials` seeded trials of one bound calculator and returns the
/// per-trial ratios `actual / bound` plus the summary.
#[wasm_bindgen]
pub fn bound_sweep(theorem: &str, n1: usize, n2: usize, n3: usize, trials: usize, seed: u32, scale: f64) -> String {
    let run = || -> Result<String, String> {
        check_dims(&[n1, n2, n3])?;
        if trials > MAX_TRIALS {
            return Err(format!("at most {MAX_TRIALS} trials"));
        }
        let theorem: Theorem = theorem.parse().map_err(|e| format!("{e}"))?;
        let dims = ExperimentDims { n1, n2, n3, n4: 2 };
        let cfg = ExperimentConfig::new(theorem, dims, trials, u64::from(seed), scale);
        let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
        let points: Vec<SweepPoint> = report
            .rows
            .iter()
            .map(|r| SweepPoint { trial: r.trial, applicable: r.is_applicable(), ratio_f: r.ratio_f, ratio_2: r.ratio_2, holds: !r.is_violation() })
            .collect();
        Ok(json!({ "theorem": theorem.name(), "describe": theorem.describe(), "points": points, "summary": report.summary }).to_string())
    };
    run().unwrap_or_else(error)
}

/// Singular values of every Fourier face of a random `n1 x n2 x n3` tensor
/// with the given multirank (comma-separated, empty for random).
#[wasm_bindgen]
pub fn face_spectrum(n1: usize, n2: usize, n3: usize, ranks: &str, seed: u32) -> String {
    let run = || -> Result<String, String> {
        check_dims(&[n1, n2, n3])?;
        let mut rng = rng_from_seed(u64::from(seed));
        let ranks: Vec<usize> = if ranks.trim().is_empty() {
            random_rank_profile(n1, n2, n3, 0, &mut rng)
        } else {
            ranks.split(',').map(|r| r.trim().parse::<usize>().map_err(|e| format!("ranks: {e}"))).collect::<Result<_, _>>()?
        };
        let a = with_multirank(n1, n2, &ranks, &mut rng).map_err(|e| e.to_string())?;
        let faces = to_faces(&a);
        let spectra: Vec<Vec<f64>> = faces.faces().iter().map(singular_values).collect();
        let mr = tprod_core::multirank(&a, None);
        Ok(json!({ "ranks": mr.ranks, "threshold": mr.thresholds.first(), "spectra": spectra }).to_string())
    };
    run().unwrap_or_else(error)
}

/// Builds a conditioned SMW instance, checks its conditions and compares the
/// update formula against the direct pseudo-inverse of `A + U*B*V`.
#[wasm_bindgen]
pub fn smw_pinv_check(n1: usize, n2: usize, k: usize, n3: usize, lifted: bool, seed: u32) -> String {
    let run = || -> Result<String, String> {
        check_dims(&[n1, n2, k, n3])?;
        let family = if lifted { InstanceFamily::MatrixLifted } else { InstanceFamily::Trivial };
        let (a, f) = construct_conditioned_instance(SmwDims { n1, n2, k, n3 }, family, u64::from(seed)).map_err(|e| e.to_string())?;
        let report = check_smw_conditions(&f).map_err(|e| e.to_string())?;
        let m = a.add(&f.update().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let direct = pinv(&m);
        let discrepancy = smw_pinv(&a, &f).ok().map(|x| x.sub(&direct).expect("same dims").frobenius_norm() / direct.frobenius_norm().max(f64::MIN_POSITIVE));
        Ok(json!({
            "family": format!("{family:?}"),
            "conditions": report.residuals.iter().map(|c| json!({ "name": c.name, "residual": c.residual })).collect::<Vec<_>>(),
            "satisfied": report.satisfied,
            "discrepancy": discrepancy,
        })
        .to_string())
    };
    run().unwrap_or_else(error)
}
