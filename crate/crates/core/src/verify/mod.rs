//! Seeded property suites for the monotonicity and coarseness results, and
//! the golden counterexamples.
//!
//! Every trial draws from its own ChaCha stream `(seed, trial)`, so a report
//! depends only on `(suite, trials, dim, seed)` and trials can run in
//! parallel.

pub mod constructions;
pub mod counterexamples;
pub mod random;
mod suites;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub use counterexamples::{counterexample_registry, GoldenInstance, GoldenOutcome};
pub use random::{random_density_matrix, random_left_stochastic, random_povm, StochasticMode};

/// Slack on inequalities checked by the suites.
pub const INEQUALITY_TOL: f64 = 1e-9;
/// Slack on equalities checked by the suites.
pub const EQUALITY_TOL: f64 = 1e-8;
/// Largest acceptable independently recomputed witness residual.
pub const WITNESS_TOL: f64 = 1e-7;

/// Names accepted by [`run_suite`], in registry order.
pub const SUITES: &[&str] = &[
    "dpi_kl",
    "obs_monotone",
    "dpi_mi",
    "projective_equiv",
    "lemma_processing",
    "coarser_entropy",
    "coarser_mi",
    "subspace_processing",
    "subspace_entropy",
    "subspace_mi",
    "restriction",
    "bounds",
    "composition",
    "counterexamples",
];

/// One violated check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub trial: usize,
    /// The inequality or equality that failed.
    pub check: String,
    pub values: Value,
    /// Inputs in the JSON file formats, enough to replay the failure.
    pub inputs: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub failures: usize,
    pub details: Vec<Failure>,
    pub elapsed_ms: u64,
    /// Feasible certificates whose witness was recomputed.
    pub certificates: usize,
    /// Largest recomputed witness residual over those certificates.
    pub max_witness_residual: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// The report without its timing, for determinism comparisons.
    pub fn without_timing(&self) -> Self {
        Self { elapsed_ms: 0, ..self.clone() }
    }
}

/// Runs `name` over `trials` seeded instances of dimension `dim`.
pub fn run_suite(name: &str, trials: usize, dim: usize, seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    if name == "counterexamples" {
        let mut details = Vec::new();
        for g in counterexample_registry() {
            match (g.run)() {
                Ok(out) if out.passed => {}
                Ok(out) => details.push(Failure {
                    trial: 0,
                    check: g.name.to_string(),
                    values: out.values,
                    inputs: Value::Null,
                }),
                Err(e) => details.push(Failure {
                    trial: 0,
                    check: g.name.to_string(),
                    values: Value::String(e.to_string()),
                    inputs: Value::Null,
                }),
            }
        }
        return Ok(SuiteReport {
            suite: name.to_string(),
            trials: 1,
            failures: details.len(),
            details,
            elapsed_ms: start.elapsed().as_millis() as u64,
            certificates: 0,
            max_witness_residual: 0.0,
        });
    }
    let run = suites::lookup(name).ok_or_else(|| Error::UnknownSuite(name.to_string()))?;
    if dim < 2 {
        return Err(Error::InvalidRange(format!("suite {name} needs dim >= 2, got {dim}")));
    }
    if trials == 0 {
        return Err(Error::InvalidRange("trials must be at least 1".into()));
    }
    let outcomes: Vec<suites::Trial> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut t = suites::Trial::new(k);
            let mut rng = random::trial_rng(seed, k as u64);
            if let Err(e) = run(&mut t, &mut rng, dim) {
                t.fail("no error", serde_json::json!({"error": e.to_string()}), Value::Null);
            }
            t
        })
        .collect();
    let mut details = Vec::new();
    let mut certificates = 0;
    let mut max_witness_residual: f64 = 0.0;
    for t in outcomes {
        certificates += t.certificates;
        max_witness_residual = max_witness_residual.max(t.max_witness_residual);
        details.extend(t.failures);
    }
    Ok(SuiteReport {
        suite: name.to_string(),
        trials,
        failures: details.len(),
        details,
        elapsed_ms: start.elapsed().as_millis() as u64,
        certificates,
        max_witness_residual,
    })
}

/// Runs every suite in [`SUITES`].
pub fn run_all(trials: usize, dim: usize, seed: u64) -> Result<Vec<SuiteReport>> {
    SUITES.iter().map(|s| run_suite(s, trials, dim, seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("nope", 1, 2, 0), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn every_suite_runs_briefly() {
        for name in SUITES {
            let r = run_suite(name, 8, 3, 1).unwrap();
            assert!(r.passed(), "{name}: {:?}", r.details);
        }
    }

    #[test]
    fn deterministic_reports() {
        let a = run_suite("subspace_entropy", 6, 3, 9).unwrap();
        let b = run_suite("subspace_entropy", 6, 3, 9).unwrap();
        assert_eq!(a.without_timing(), b.without_timing());
    }
}
