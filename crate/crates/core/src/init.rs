//! Initial simplex construction by probing along each coordinate axis from a
//! starting vertex.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{Simplex, Vertex};
use crate::params::ParameterVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionSet {
    CoordinateAxes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LineSearchConfig {
    pub probes_per_direction: usize,
    pub step_magnitude: f64,
    pub direction_set: DirectionSet,
}

impl Default for LineSearchConfig {
    fn default() -> Self {
        Self {
            probes_per_direction: 4,
            step_magnitude: 0.5,
            direction_set: DirectionSet::CoordinateAxes,
        }
    }
}

impl LineSearchConfig {
    /// Two probes per axis at +-2: 71 evaluations for the 35-parameter
    /// network, inside a 100-evaluation probe phase.
    pub fn cart_pole() -> Self {
        Self { probes_per_direction: 2, step_magnitude: 2.0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.probes_per_direction < 2 {
            return Err(Error::InvalidConfig(format!(
                "probes_per_direction must be >= 2, got {}",
                self.probes_per_direction
            )));
        }
        if !(self.step_magnitude > 0.0) || !self.step_magnitude.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "step_magnitude must be finite and > 0, got {}",
                self.step_magnitude
            )));
        }
        Ok(())
    }

    /// Probe offsets in the order they are tried: `+s, -s, +s/2, -s/2, +s/4, ...`.
    pub fn offsets(&self) -> Vec<f64> {
        (0..self.probes_per_direction)
            .map(|k| {
                let magnitude = self.step_magnitude / f64::powi(2.0, (k / 2) as i32);
                if k % 2 == 0 {
                    magnitude
                } else {
                    -magnitude
                }
            })
            .collect()
    }
}

/// Builds `n + 1` vertices: `first_vertex` plus, per axis, the lowest-valued
/// probe along that axis. Ties keep the earlier probe.
///
/// Returns the simplex and the number of objective calls, which is always
/// `n * probes_per_direction + 1`.
pub fn build_initial_simplex<F>(
    first_vertex: ParameterVector,
    cfg: &LineSearchConfig,
    mut objective: F,
) -> Result<(Simplex, usize)>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    cfg.validate()?;
    let n = first_vertex.len();
    if n == 0 {
        return Err(Error::MalformedSimplex { vertices: 1, dimension: 0 });
    }
    let offsets = cfg.offsets();

    let first_value = objective(&first_vertex)?;
    let mut evaluations = 1;
    let mut vertices = Vec::with_capacity(n + 1);

    let mut probe = first_vertex.clone();
    for axis in 0..n {
        let origin = first_vertex[axis];
        let mut best: Option<(f64, f64)> = None;
        for &offset in &offsets {
            probe[axis] = origin + offset;
            let value = objective(&probe)?;
            evaluations += 1;
            if best.is_none_or(|(_, v)| value < v) {
                best = Some((probe[axis], value));
            }
        }
        let (coordinate, value) = best.expect("at least two probes per axis");
        probe[axis] = origin;

        let mut point = first_vertex.clone();
        point[axis] = coordinate;
        vertices.push(Vertex { point, value });
    }
    vertices.insert(0, Vertex { point: first_vertex, value: first_value });
    Ok((Simplex::new(vertices)?, evaluations))
}
