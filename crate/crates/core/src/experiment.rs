//! Experiment configuration, seeded batch runs and report rendering.
//!
//! Experiment `i` of a batch trains from `substream(master_seed, i)` and, when
//! generalization testing is enabled, tests its network with the seed drawn
//! first from `substream(master_seed, GENERALIZATION_STREAM_OFFSET + i)`.
//! Results depend only on the configuration, never on scheduling.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::EnvConfig;
use crate::error::{Error, Result};
use crate::evaluator::{batch_stats, generalization_test, BatchStats, GeneralizationResult, Orientation};
use crate::init::LineSearchConfig;
use crate::net::{ActionNetwork, NetworkTopology};
use crate::optimizer::PolytopeConfig;
use crate::seeding::substream;
use crate::trainer::{run_training, CartPoleTask, StrategyConfig, TrainingReport};

pub const GENERALIZATION_STREAM_OFFSET: u64 = 1 << 32;

/// Header line carrying the wall-clock time; the only non-deterministic line
/// of any report.
pub const TIMESTAMP_PREFIX: &str = "# generated_unix_secs = ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// 10 experiments, success at 10 000 steps.
    Desk,
    /// 50 experiments, success at 120 000 steps.
    Paper,
}

impl Profile {
    pub fn max_cycle_steps(self) -> u64 {
        match self {
            Profile::Desk => 10_000,
            Profile::Paper => 120_000,
        }
    }

    pub fn n_experiments(self) -> usize {
        match self {
            Profile::Desk => 10,
            Profile::Paper => 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub n_experiments: usize,
    /// Generalization tests per trained network; 0 skips testing.
    pub generalization_tests: usize,
    /// A generalization test succeeds when the pole stays up this many steps.
    pub generalization_threshold: u64,
    pub topology: NetworkTopology,
    pub env: EnvConfig,
    pub strategy: StrategyConfig,
    pub polytope: PolytopeConfig,
    pub line_search: LineSearchConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::for_profile(Profile::Desk)
    }
}

impl ExperimentConfig {
    pub fn for_profile(profile: Profile) -> Self {
        Self {
            master_seed: 1,
            n_experiments: profile.n_experiments(),
            generalization_tests: 5000,
            generalization_threshold: 1000,
            topology: NetworkTopology::default(),
            env: EnvConfig::default(),
            strategy: StrategyConfig { max_cycle_steps: profile.max_cycle_steps(), ..Default::default() },
            polytope: PolytopeConfig::default(),
            line_search: LineSearchConfig::cart_pole(),
        }
    }

    /// Switches the profile-dependent fields, leaving everything else alone.
    pub fn apply_profile(&mut self, profile: Profile) {
        self.n_experiments = profile.n_experiments();
        self.strategy.max_cycle_steps = profile.max_cycle_steps();
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialize(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_experiments == 0 {
            return Err(Error::InvalidConfig("n_experiments must be >= 1".into()));
        }
        self.topology.validate()?;
        if self.topology.inputs != 4 || self.topology.outputs != 1 {
            return Err(Error::UnsupportedTopology(format!(
                "the cart-pole controller needs 4 inputs and 1 output, got {} and {}",
                self.topology.inputs, self.topology.outputs
            )));
        }
        self.env.validate()?;
        self.strategy.validate()?;
        self.polytope.validate()?;
        self.line_search.validate()
    }

    pub fn generalization_seed(&self, experiment: usize) -> u64 {
        substream(self.master_seed, GENERALIZATION_STREAM_OFFSET + experiment as u64).next_u64()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub experiment: usize,
    pub master_seed: u64,
    pub report: TrainingReport,
    pub generalization: Option<GeneralizationResult>,
}

impl RunRecord {
    pub fn network(&self, cfg: &ExperimentConfig) -> Result<ActionNetwork> {
        ActionNetwork::new(cfg.topology, self.report.best_weights.clone())
    }
}

/// Trains experiment `experiment` and, for successful runs with testing
/// enabled, measures generalization.
pub fn run_experiment(cfg: &ExperimentConfig, experiment: usize) -> Result<RunRecord> {
    cfg.validate()?;
    let mut task = CartPoleTask::new(cfg.topology, cfg.env, &cfg.strategy);
    let mut rng = substream(cfg.master_seed, experiment as u64);
    let report = run_training(
        &mut task,
        cfg.topology.parameter_count(),
        &mut rng,
        &cfg.strategy,
        &cfg.polytope,
        &cfg.line_search,
    )?;
    let generalization = if report.succeeded && cfg.generalization_tests > 0 {
        Some(generalization_test(
            &cfg.topology,
            &report.best_weights,
            cfg.generalization_seed(experiment),
            &cfg.env,
            cfg.generalization_tests,
            cfg.generalization_threshold,
        )?)
    } else {
        None
    };
    Ok(RunRecord { experiment, master_seed: cfg.master_seed, report, generalization })
}

/// Runs every experiment of the batch in parallel; records come back in
/// experiment order.
pub fn run_batch(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    (0..cfg.n_experiments).into_par_iter().map(|i| run_experiment(cfg, i)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Total evaluations over successful runs (lower is better).
    pub training_cycles: Option<BatchStats>,
    /// Generalization percentages over tested runs (higher is better).
    pub generalization: Option<BatchStats>,
}

pub fn summarize(records: &[RunRecord]) -> BatchSummary {
    let cycles: Vec<f64> = records
        .iter()
        .filter(|r| r.report.succeeded)
        .map(|r| r.report.total_evaluations as f64)
        .collect();
    let percentages: Vec<f64> =
        records.iter().filter_map(|r| r.generalization.map(|g| g.success_percentage)).collect();
    let successes = cycles.len();
    BatchSummary {
        runs: records.len(),
        successes,
        success_rate: if records.is_empty() { 0.0 } else { 100.0 * successes as f64 / records.len() as f64 },
        training_cycles: batch_stats(&cycles, Orientation::LowerIsBetter).ok(),
        generalization: batch_stats(&percentages, Orientation::HigherIsBetter).ok(),
    }
}

#[derive(Serialize)]
struct RunDocument<'a> {
    run: RunSection,
    result: ResultSection<'a>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generalization: Option<&'a GeneralizationResult>,
    config: &'a ExperimentConfig,
}

#[derive(Serialize)]
struct RunSection {
    experiment: usize,
    master_seed: u64,
}

#[derive(Serialize)]
struct ResultSection<'a> {
    succeeded: bool,
    total_evaluations: usize,
    restarts_used: usize,
    best_cycle_steps: u64,
    restarts: &'a [crate::trainer::RestartLog],
}

fn header(title: &str, timestamp: Option<u64>) -> String {
    let mut out = format!("# polyrl {title}\n");
    if let Some(secs) = timestamp {
        out.push_str(&format!("{TIMESTAMP_PREFIX}{secs}\n"));
    }
    out
}

/// Per-run record as a TOML document: header comments, the outcome, then the
/// full configuration that produced it.
pub fn render_run_report(cfg: &ExperimentConfig, record: &RunRecord, timestamp: Option<u64>) -> Result<String> {
    let doc = RunDocument {
        run: RunSection { experiment: record.experiment, master_seed: record.master_seed },
        result: ResultSection {
            succeeded: record.report.succeeded,
            total_evaluations: record.report.total_evaluations,
            restarts_used: record.report.restarts_used,
            best_cycle_steps: record.report.best_cycle_steps,
            restarts: &record.report.per_restart_log,
        },
        generalization: record.generalization.as_ref(),
        config: cfg,
    };
    let body = toml::to_string(&doc).map_err(|e| Error::Serialize(e.to_string()))?;
    Ok(header("training report", timestamp) + &body)
}

/// Drops the timestamp header line, leaving the deterministic content.
pub fn strip_timestamp(report: &str) -> String {
    report
        .split_inclusive('\n')
        .filter(|line| !line.starts_with(TIMESTAMP_PREFIX))
        .collect()
}

pub const RUNS_CSV_HEADER: &str =
    "experiment,succeeded,total_evaluations,restarts_used,best_cycle_steps,generalization_percentage";

pub fn render_runs_csv(records: &[RunRecord]) -> String {
    let mut out = format!("{RUNS_CSV_HEADER}\n");
    for r in records {
        let generalization = r.generalization.map(|g| g.success_percentage.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.experiment,
            r.report.succeeded,
            r.report.total_evaluations,
            r.report.restarts_used,
            r.report.best_cycle_steps,
            generalization
        ));
    }
    out
}

pub const SUMMARY_CSV_HEADER: &str = "table,method,runs,successes,success_rate,best,worst,mean,sd";

/// Training-cost row and, when available, generalization row.
pub fn render_summary_csv(summary: &BatchSummary) -> String {
    let mut out = format!("{SUMMARY_CSV_HEADER}\n");
    let row = |table: &str, stats: &Option<BatchStats>| match stats {
        Some(s) => format!(
            "{table},polytope,{},{},{:.1},{},{},{:.1},{:.1}\n",
            summary.runs, summary.successes, summary.success_rate, s.best, s.worst, s.mean, s.sd
        ),
        None => format!("{table},polytope,{},{},{:.1},,,,\n", summary.runs, summary.successes, summary.success_rate),
    };
    out.push_str(&row("training_cycles", &summary.training_cycles));
    if summary.generalization.is_some() {
        out.push_str(&row("generalization_percent", &summary.generalization));
    }
    out
}

pub const GENERALIZATION_CSV_HEADER: &str = "weights,seed,tests,threshold,successes,success_percentage";

pub fn render_generalization_row(weights: &str, seed: u64, threshold: u64, result: &GeneralizationResult) -> String {
    format!(
        "{},{},{},{},{},{:.2}\n",
        weights.replace(',', "_"),
        seed,
        result.tests_run,
        threshold,
        result.successes,
        result.success_percentage
    )
}
