//! Nelder-Mead polytope minimization over an opaque objective.
//!
//! The engine minimizes. Callers that want to maximize a quantity hand in its
//! negation. Vertex values are cached when a point is evaluated and are never
//! recomputed, even for noisy objectives.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ParameterVector;

/// Coefficients and stopping parameters of the polytope iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolytopeConfig {
    /// Reflection coefficient.
    pub alpha: f64,
    /// Expansion coefficient.
    pub gamma: f64,
    /// Contraction coefficient.
    pub beta: f64,
    /// Stop once the mean absolute deviation of the vertex values drops to this.
    pub epsilon: f64,
    /// Objective-call budget for one [`run`].
    pub max_evaluations: usize,
}

impl Default for PolytopeConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            gamma: 2.0,
            beta: 0.5,
            epsilon: 1e-8,
            max_evaluations: 100_000,
        }
    }
}

impl PolytopeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidConfig(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(self.gamma > 1.0) {
            return Err(Error::InvalidConfig(format!("gamma must be > 1, got {}", self.gamma)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidConfig(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::InvalidConfig(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// A polytope vertex with its cached objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub point: ParameterVector,
    pub value: f64,
}

impl Vertex {
    pub fn new(point: impl Into<ParameterVector>, value: f64) -> Self {
        Self { point: point.into(), value }
    }
}

/// `n + 1` vertices in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    vertices: Vec<Vertex>,
}

impl Simplex {
    pub fn new(vertices: Vec<Vertex>) -> Result<Self> {
        let dimension = vertices.first().map_or(0, |v| v.point.len());
        if dimension == 0 || vertices.len() != dimension + 1 {
            return Err(Error::MalformedSimplex { vertices: vertices.len(), dimension });
        }
        if let Some(bad) = vertices.iter().find(|v| v.point.len() != dimension) {
            return Err(Error::DimensionMismatch { expected: dimension, found: bad.point.len() });
        }
        Ok(Self { vertices })
    }

    /// Evaluates every point once and builds the simplex. Returns the number
    /// of objective calls alongside it.
    pub fn from_points<F>(points: Vec<ParameterVector>, mut objective: F) -> Result<(Self, usize)>
    where
        F: FnMut(&[f64]) -> Result<f64>,
    {
        let mut vertices = Vec::with_capacity(points.len());
        for point in points {
            let value = objective(&point)?;
            vertices.push(Vertex { point, value });
        }
        let evaluations = vertices.len();
        Ok((Self::new(vertices)?, evaluations))
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vertex> {
        self.vertices
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.vertices.iter().map(|v| v.value)
    }

    /// Lowest-valued vertex; the earliest one wins ties.
    pub fn best(&self) -> &Vertex {
        self.vertices
            .iter()
            .reduce(|best, v| if compare_values(v.value, best.value) == Ordering::Less { v } else { best })
            .expect("simplex is never empty")
    }

    /// Stable ascending sort by value. NaN sorts after every number.
    pub fn sort(&mut self) {
        self.vertices.sort_by(|a, b| compare_values(a.value, b.value));
    }

    pub fn sorted(mut self) -> Self {
        self.sort();
        self
    }

    /// Centroid of every vertex except the last one (the worst, once sorted).
    pub fn centroid(&self) -> ParameterVector {
        let n = self.dimension();
        let mut c = vec![0.0; n];
        for v in &self.vertices[..n] {
            for (acc, x) in c.iter_mut().zip(v.point.iter()) {
                *acc += x;
            }
        }
        for acc in &mut c {
            *acc /= n as f64;
        }
        c.into()
    }

    /// Mean absolute deviation of the vertex values around their mean.
    pub fn termination_measure(&self) -> f64 {
        let count = self.vertices.len() as f64;
        let mean = self.values().sum::<f64>() / count;
        self.values().map(|f| (f - mean).abs()).sum::<f64>() / count
    }

    /// Moves every vertex but the first halfway toward it and re-evaluates the
    /// moved ones. Expects a sorted simplex. Returns the number of objective calls.
    pub fn shrink<F>(&mut self, mut objective: F) -> Result<usize>
    where
        F: FnMut(&[f64]) -> Result<f64>,
    {
        let (head, tail) = self.vertices.split_at_mut(1);
        let anchor = &head[0].point;
        for v in tail.iter_mut() {
            for (x, a) in v.point.iter_mut().zip(anchor.iter()) {
                *x = 0.5 * (a + *x);
            }
            v.value = objective(&v.point)?;
        }
        Ok(tail.len())
    }

    fn worst_mut(&mut self) -> &mut Vertex {
        self.vertices.last_mut().expect("simplex is never empty")
    }
}

fn compare_values(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).unwrap_or_else(|| a.is_nan().cmp(&b.is_nan()))
}

/// `c + alpha * (c - worst)`
pub fn reflect(centroid: &[f64], worst: &[f64], alpha: f64) -> ParameterVector {
    centroid.iter().zip(worst).map(|(c, w)| c + alpha * (c - w)).collect::<Vec<_>>().into()
}

/// `c + gamma * (r - c)`
pub fn expand(centroid: &[f64], reflected: &[f64], gamma: f64) -> ParameterVector {
    centroid.iter().zip(reflected).map(|(c, r)| c + gamma * (r - c)).collect::<Vec<_>>().into()
}

/// `c + beta * (target - c)`
pub fn contract(centroid: &[f64], target: &[f64], beta: f64) -> ParameterVector {
    centroid.iter().zip(target).map(|(c, t)| c + beta * (t - c)).collect::<Vec<_>>().into()
}

/// Which branch of the iteration replaced the worst vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Reflected point landed between the best and second-worst values.
    ReflectAccept,
    /// Reflected point beat the best vertex and the expansion beat it too.
    ExpandAccept,
    /// Reflected point beat the best vertex but the expansion did not improve on it.
    ReflectAfterExpand,
    ContractAccept,
    Shrink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepReport {
    pub branch: Branch,
    pub evaluations: usize,
}

/// One polytope iteration: sort, reflect, then expand, contract or shrink.
///
/// Uses 1, 2 or `2 + n` objective calls.
pub fn step<F>(simplex: &mut Simplex, cfg: &PolytopeConfig, mut objective: F) -> Result<StepReport>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    simplex.sort();
    let n = simplex.dimension();
    let f_best = simplex.vertices[0].value;
    let f_second_worst = simplex.vertices[n - 1].value;
    let f_worst = simplex.vertices[n].value;

    let c = simplex.centroid();
    let r = reflect(&c, &simplex.vertices[n].point, cfg.alpha);
    let f_r = objective(&r)?;

    if f_best <= f_r && f_r <= f_second_worst {
        *simplex.worst_mut() = Vertex { point: r, value: f_r };
        return Ok(StepReport { branch: Branch::ReflectAccept, evaluations: 1 });
    }

    if f_r < f_best {
        let e = expand(&c, &r, cfg.gamma);
        let f_e = objective(&e)?;
        let (replacement, branch) = if f_e < f_r {
            (Vertex { point: e, value: f_e }, Branch::ExpandAccept)
        } else {
            (Vertex { point: r, value: f_r }, Branch::ReflectAfterExpand)
        };
        *simplex.worst_mut() = replacement;
        return Ok(StepReport { branch, evaluations: 2 });
    }

    // f_r exceeds the second-worst value (or is NaN).
    let k = if f_r >= f_worst {
        contract(&c, &simplex.vertices[n].point, cfg.beta)
    } else {
        contract(&c, &r, cfg.beta)
    };
    let f_k = objective(&k)?;
    if f_k < f_r.min(f_worst) {
        *simplex.worst_mut() = Vertex { point: k, value: f_k };
        return Ok(StepReport { branch: Branch::ContractAccept, evaluations: 2 });
    }

    let shrunk = simplex.shrink(&mut objective)?;
    Ok(StepReport { branch: Branch::Shrink, evaluations: 2 + shrunk })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    Converged,
    BudgetExhausted,
    ExternalStop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerOutcome {
    pub best_point: ParameterVector,
    pub best_value: f64,
    pub evaluations_used: usize,
    pub iterations: usize,
    pub termination_reason: TerminationReason,
    /// Final polytope, sorted ascending. Feed it back into [`run`] to continue.
    pub simplex: Simplex,
}

/// Iterates [`step`] until the value spread falls to `epsilon`, the budget is
/// spent, or `stop` returns true. `stop` is consulted before every iteration.
///
/// The budget is checked between iterations, so the last iteration may
/// overshoot it by at most `1 + n` calls.
pub fn run<F, S>(initial: Simplex, cfg: &PolytopeConfig, mut objective: F, mut stop: S) -> Result<OptimizerOutcome>
where
    F: FnMut(&[f64]) -> Result<f64>,
    S: FnMut(&Simplex) -> bool,
{
    cfg.validate()?;
    let mut simplex = initial;
    let mut evaluations_used = 0;
    let mut iterations = 0;
    let termination_reason = loop {
        if stop(&simplex) {
            break TerminationReason::ExternalStop;
        }
        if evaluations_used >= cfg.max_evaluations {
            break TerminationReason::BudgetExhausted;
        }
        if simplex.termination_measure() <= cfg.epsilon {
            break TerminationReason::Converged;
        }
        evaluations_used += step(&mut simplex, cfg, &mut objective)?.evaluations;
        iterations += 1;
    };
    simplex.sort();
    let best = &simplex.vertices[0];
    Ok(OptimizerOutcome {
        best_point: best.point.clone(),
        best_value: best.value,
        evaluations_used,
        iterations,
        termination_reason,
        simplex,
    })
}
