//! Generalization tests for trained networks and summary statistics over
//! experiment batches.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::EnvConfig;
use crate::error::{Error, Result};
use crate::net::NetworkTopology;
use crate::seeding::substream;
use crate::trainer::evaluate_cycle;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizationResult {
    pub tests_run: usize,
    pub successes: usize,
    pub success_percentage: f64,
}

impl GeneralizationResult {
    pub fn from_counts(tests_run: usize, successes: usize) -> Self {
        let success_percentage = if tests_run == 0 { 0.0 } else { 100.0 * successes as f64 / tests_run as f64 };
        Self { tests_run, successes, success_percentage }
    }
}

/// Runs `n_tests` deterministic cycles (no stochastic prefix) and counts those
/// that last at least `success_threshold` steps.
///
/// Test `i` draws its initial state from `substream(seed, i)`, so the result
/// does not depend on how the tests are scheduled.
pub fn generalization_test(
    topology: &NetworkTopology,
    params: &[f64],
    seed: u64,
    env_cfg: &EnvConfig,
    n_tests: usize,
    success_threshold: u64,
) -> Result<GeneralizationResult> {
    let successes = (0..n_tests as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i);
            let out = evaluate_cycle(topology, params, &mut rng, env_cfg, success_threshold, 0)?;
            Ok(usize::from(out.steps_survived >= success_threshold))
        })
        .sum::<Result<usize>>()?;
    Ok(GeneralizationResult::from_counts(n_tests, successes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    LowerIsBetter,
    HigherIsBetter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchStats {
    pub best: f64,
    pub worst: f64,
    pub mean: f64,
    /// Population standard deviation (divides by N).
    pub sd: f64,
}

pub fn batch_stats(values: &[f64], orientation: Orientation) -> Result<BatchStats> {
    if values.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
    let (best, worst) = match orientation {
        Orientation::LowerIsBetter => (min, max),
        Orientation::HigherIsBetter => (max, min),
    };
    Ok(BatchStats { best, worst, mean, sd })
}
