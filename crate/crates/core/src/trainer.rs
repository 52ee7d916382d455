//! Cycle-length objective and the restart strategy wrapped around the
//! polytope optimizer.

use std::cell::{Cell, RefCell};

use rand::{Rng, RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::env::{self, CartPoleState, EnvConfig};
use crate::error::{Error, Result};
use crate::init::{build_initial_simplex, LineSearchConfig};
use crate::net::{forward, NetworkTopology};
use crate::optimizer::{self, PolytopeConfig};
use crate::params::ParameterVector;
use crate::seeding::Stream;

/// Cart velocity that maps to a network input of 1, m/s.
pub const VELOCITY_SCALE: f64 = 2.0;
/// Pole angular velocity that maps to a network input of 1, rad/s.
pub const ANGULAR_VELOCITY_SCALE: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrategyConfig {
    /// Evaluations per restart, simplex construction included, before deciding
    /// whether the restart is promising.
    pub probe_evaluations: usize,
    /// A restart is promising once some cycle lasts more than this many steps.
    pub probe_success_steps: u64,
    /// Extra evaluations granted to a promising restart.
    pub continuation_evaluations: usize,
    pub max_restarts: usize,
    pub max_total_evaluations: usize,
    /// A cycle reaching this length ends training successfully.
    pub max_cycle_steps: u64,
    /// Leading steps of each cycle whose action is sampled from the network output.
    pub stochastic_prefix_steps: u64,
    /// First vertices are drawn uniformly from `(-range, range)` per parameter.
    pub weight_init_range: f64,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        Self {
            probe_evaluations: 100,
            probe_success_steps: 100,
            continuation_evaluations: 750,
            max_restarts: 15,
            max_total_evaluations: 15_000,
            max_cycle_steps: 120_000,
            stochastic_prefix_steps: 10,
            weight_init_range: 0.5,
        }
    }
}

impl StrategyConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("probe_evaluations", self.probe_evaluations),
            ("max_restarts", self.max_restarts),
            ("max_total_evaluations", self.max_total_evaluations),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be > 0")));
            }
        }
        if !(self.weight_init_range > 0.0) || !self.weight_init_range.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "weight_init_range must be finite and > 0, got {}",
                self.weight_init_range
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleEnd {
    Failure,
    ReachedMaxSteps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleOutcome {
    /// Steps completed without failure; the failing step is not counted.
    pub steps_survived: u64,
    pub cause: CycleEnd,
}

/// Network inputs for a state: each component divided by its scale.
pub fn observe(s: &CartPoleState, cfg: &EnvConfig) -> [f64; 4] {
    [
        s.x / cfg.x_fail,
        s.x_dot / VELOCITY_SCALE,
        s.theta / cfg.theta_fail,
        s.theta_dot / ANGULAR_VELOCITY_SCALE,
    ]
}

/// Runs one cycle from a random start.
///
/// For the first `stochastic_prefix_steps` steps the cart is pushed toward +x
/// with probability `y` (one fresh uniform draw per step); afterwards it is
/// pushed toward +x iff `y > 0.5`.
pub fn evaluate_cycle<R: Rng + ?Sized>(
    topology: &NetworkTopology,
    params: &[f64],
    rng: &mut R,
    env_cfg: &EnvConfig,
    max_cycle_steps: u64,
    stochastic_prefix_steps: u64,
) -> Result<CycleOutcome> {
    let state = env::random_initial_state(rng, env_cfg);
    run_cycle_from(topology, params, state, rng, env_cfg, max_cycle_steps, stochastic_prefix_steps)
}

/// Same as [`evaluate_cycle`] but from a given starting state.
pub fn run_cycle_from<R: Rng + ?Sized>(
    topology: &NetworkTopology,
    params: &[f64],
    mut state: CartPoleState,
    rng: &mut R,
    env_cfg: &EnvConfig,
    max_cycle_steps: u64,
    stochastic_prefix_steps: u64,
) -> Result<CycleOutcome> {
    let mut steps = 0;
    while steps < max_cycle_steps {
        let y = forward(topology, params, &observe(&state, env_cfg))?;
        let push_right = if steps < stochastic_prefix_steps { rng.gen::<f64>() < y } else { y > 0.5 };
        let force = if push_right { env_cfg.force_magnitude } else { -env_cfg.force_magnitude };
        state = env::step(&state, force, env_cfg)?;
        if env::is_failure(&state, env_cfg) {
            return Ok(CycleOutcome { steps_survived: steps, cause: CycleEnd::Failure });
        }
        steps += 1;
    }
    Ok(CycleOutcome { steps_survived: steps, cause: CycleEnd::ReachedMaxSteps })
}

/// Minimization value for a cycle: the negated length.
pub fn cycle_objective(outcome: &CycleOutcome) -> f64 {
    0.0 - outcome.steps_survived as f64
}

pub fn objective_from_cycle<R: Rng + ?Sized>(
    topology: &NetworkTopology,
    params: &[f64],
    rng: &mut R,
    env_cfg: &EnvConfig,
    strategy: &StrategyConfig,
) -> Result<f64> {
    let outcome = evaluate_cycle(
        topology,
        params,
        rng,
        env_cfg,
        strategy.max_cycle_steps,
        strategy.stochastic_prefix_steps,
    )?;
    Ok(cycle_objective(&outcome))
}

/// Source of cycle outcomes for the restart strategy.
pub trait CycleEvaluator {
    fn evaluate(&mut self, params: &[f64], rng: &mut Stream) -> Result<CycleOutcome>;
}

impl<F> CycleEvaluator for F
where
    F: FnMut(&[f64]) -> Result<CycleOutcome>,
{
    fn evaluate(&mut self, params: &[f64], _rng: &mut Stream) -> Result<CycleOutcome> {
        self(params)
    }
}

/// The cart-pole task with the configured network.
#[derive(Debug, Clone, Copy)]
pub struct CartPoleTask {
    pub topology: NetworkTopology,
    pub env: EnvConfig,
    pub max_cycle_steps: u64,
    pub stochastic_prefix_steps: u64,
}

impl CartPoleTask {
    pub fn new(topology: NetworkTopology, env: EnvConfig, strategy: &StrategyConfig) -> Self {
        Self {
            topology,
            env,
            max_cycle_steps: strategy.max_cycle_steps,
            stochastic_prefix_steps: strategy.stochastic_prefix_steps,
        }
    }
}

impl CycleEvaluator for CartPoleTask {
    fn evaluate(&mut self, params: &[f64], rng: &mut Stream) -> Result<CycleOutcome> {
        evaluate_cycle(&self.topology, params, rng, &self.env, self.max_cycle_steps, self.stochastic_prefix_steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestartLog {
    pub evaluations: usize,
    pub best_steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    pub succeeded: bool,
    pub total_evaluations: usize,
    pub restarts_used: usize,
    pub best_cycle_steps: u64,
    pub best_weights: ParameterVector,
    pub per_restart_log: Vec<RestartLog>,
}

/// Bookkeeping shared by the objective and the stop predicate.
struct Tracker {
    max_cycle_steps: u64,
    total: Cell<usize>,
    restart_best: Cell<u64>,
    succeeded: Cell<bool>,
    best: RefCell<Option<(u64, ParameterVector)>>,
}

impl Tracker {
    fn record(&self, params: &[f64], outcome: &CycleOutcome) {
        self.total.set(self.total.get() + 1);
        let steps = outcome.steps_survived;
        if steps > self.restart_best.get() {
            self.restart_best.set(steps);
        }
        if steps >= self.max_cycle_steps {
            self.succeeded.set(true);
        }
        let mut best = self.best.borrow_mut();
        if best.as_ref().is_none_or(|(s, _)| steps > *s) {
            *best = Some((steps, params.into()));
        }
    }
}

/// Polytope search with random restarts.
///
/// Each restart draws a first vertex in `(-weight_init_range, weight_init_range)^n`,
/// builds the initial simplex by axis probing, and runs the optimizer until the
/// restart has used `probe_evaluations` cycles. If some cycle of the restart
/// lasted more than `probe_success_steps`, the same polytope gets
/// `continuation_evaluations` more; otherwise the restart is abandoned.
/// Training stops as soon as a cycle reaches `max_cycle_steps`, after
/// `max_restarts` restarts, or once `max_total_evaluations` is spent. Budgets are
/// checked between optimizer iterations, so the total can overshoot by at most
/// one iteration or one simplex construction.
///
/// Restart `k` draws from its own generator seeded by the `k`-th `u64` of `rng`.
pub fn run_training<E, R>(
    evaluator: &mut E,
    dimension: usize,
    rng: &mut R,
    strategy: &StrategyConfig,
    polytope: &PolytopeConfig,
    line_search: &LineSearchConfig,
) -> Result<TrainingReport>
where
    E: CycleEvaluator + ?Sized,
    R: RngCore + ?Sized,
{
    strategy.validate()?;
    polytope.validate()?;
    line_search.validate()?;

    let tracker = Tracker {
        max_cycle_steps: strategy.max_cycle_steps,
        total: Cell::new(0),
        restart_best: Cell::new(0),
        succeeded: Cell::new(false),
        best: RefCell::new(None),
    };
    let mut log = Vec::new();
    let mut restarts_used = 0;

    while restarts_used < strategy.max_restarts && tracker.total.get() < strategy.max_total_evaluations {
        restarts_used += 1;
        let mut restart_rng = Stream::seed_from_u64(rng.next_u64());
        let start_total = tracker.total.get();
        tracker.restart_best.set(0);

        let range = strategy.weight_init_range;
        let first: ParameterVector =
            (0..dimension).map(|_| restart_rng.gen_range(-range..range)).collect::<Vec<_>>().into();

        let mut objective = |p: &[f64]| -> Result<f64> {
            let outcome = evaluator.evaluate(p, &mut restart_rng)?;
            tracker.record(p, &outcome);
            Ok(cycle_objective(&outcome))
        };
        let stop = |_: &optimizer::Simplex| tracker.succeeded.get();
        let remaining_total = || strategy.max_total_evaluations.saturating_sub(tracker.total.get());

        let (simplex, _) = build_initial_simplex(first, line_search, &mut objective)?;

        let used = tracker.total.get() - start_total;
        let probe_cfg = PolytopeConfig {
            max_evaluations: strategy.probe_evaluations.saturating_sub(used).min(remaining_total()),
            ..*polytope
        };
        let probe = optimizer::run(simplex, &probe_cfg, &mut objective, stop)?;

        if !tracker.succeeded.get() && tracker.restart_best.get() > strategy.probe_success_steps {
            let continuation_cfg = PolytopeConfig {
                max_evaluations: strategy.continuation_evaluations.min(remaining_total()),
                ..*polytope
            };
            optimizer::run(probe.simplex, &continuation_cfg, &mut objective, stop)?;
        }

        log.push(RestartLog {
            evaluations: tracker.total.get() - start_total,
            best_steps: tracker.restart_best.get(),
        });
        if tracker.succeeded.get() {
            break;
        }
    }

    let (best_cycle_steps, best_weights) =
        tracker.best.into_inner().unwrap_or_else(|| (0, ParameterVector::zeros(dimension)));
    Ok(TrainingReport {
        succeeded: tracker.succeeded.get(),
        total_evaluations: tracker.total.get(),
        restarts_used,
        best_cycle_steps,
        best_weights,
        per_restart_log: log,
    })
}
