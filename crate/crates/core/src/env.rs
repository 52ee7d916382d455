//! Frictionless cart-pole simulated with explicit Euler steps.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CartPoleState {
    /// Cart position, m.
    pub x: f64,
    /// Cart velocity, m/s.
    pub x_dot: f64,
    /// Pole angle from vertical, rad.
    pub theta: f64,
    /// Pole angular velocity, rad/s.
    pub theta_dot: f64,
}

impl CartPoleState {
    pub fn new(x: f64, x_dot: f64, theta: f64, theta_dot: f64) -> Self {
        Self { x, x_dot, theta, theta_dot }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x, self.x_dot, self.theta, self.theta_dot]
    }

    pub fn negated(self) -> Self {
        Self::new(-self.x, -self.x_dot, -self.theta, -self.theta_dot)
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    /// Integration step, s.
    pub dt: f64,
    pub gravity: f64,
    pub cart_mass: f64,
    pub pole_mass: f64,
    /// Distance from hinge to the pole's centre of mass, m.
    pub pole_half_length: f64,
    /// Magnitude of the bang-bang push, N.
    pub force_magnitude: f64,
    /// Failure once `|theta|` exceeds this, rad.
    pub theta_fail: f64,
    /// Failure once `|x|` exceeds this, m.
    pub x_fail: f64,
    /// Initial states are drawn uniformly from `(-1, 1) * fraction * base`
    /// per component, with bases `(x_fail, 1 m/s, theta_fail, 1 rad/s)`.
    pub init_fractions: [f64; 4],
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            dt: 0.02,
            gravity: 9.8,
            cart_mass: 1.0,
            pole_mass: 0.1,
            pole_half_length: 0.5,
            force_magnitude: 10.0,
            theta_fail: 12.0_f64.to_radians(),
            x_fail: 2.4,
            init_fractions: [0.2, 0.5, 0.2, 0.5],
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("dt", self.dt),
            ("gravity", self.gravity),
            ("cart_mass", self.cart_mass),
            ("pole_mass", self.pole_mass),
            ("pole_half_length", self.pole_half_length),
            ("force_magnitude", self.force_magnitude),
            ("theta_fail", self.theta_fail),
            ("x_fail", self.x_fail),
        ];
        for (name, v) in named {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if self.init_fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(Error::InvalidConfig(format!(
                "init_fractions must lie in [0, 1], got {:?}",
                self.init_fractions
            )));
        }
        Ok(())
    }

    fn init_half_widths(&self) -> [f64; 4] {
        let base = [self.x_fail, 1.0, self.theta_fail, 1.0];
        std::array::from_fn(|i| base[i] * self.init_fractions[i])
    }
}

/// Advances one `dt` under a horizontal push `force` (N, positive toward +x).
///
/// Positions advance with the pre-step velocities.
pub fn step(s: &CartPoleState, force: f64, cfg: &EnvConfig) -> Result<CartPoleState> {
    let total_mass = cfg.cart_mass + cfg.pole_mass;
    let pole_moment = cfg.pole_mass * cfg.pole_half_length;
    let (sin, cos) = s.theta.sin_cos();

    let temp = (force + pole_moment * s.theta_dot * s.theta_dot * sin) / total_mass;
    let theta_acc = (cfg.gravity * sin - cos * temp)
        / (cfg.pole_half_length * (4.0 / 3.0 - cfg.pole_mass * cos * cos / total_mass));
    let x_acc = temp - pole_moment * theta_acc * cos / total_mass;

    let next = CartPoleState {
        x: s.x + cfg.dt * s.x_dot,
        x_dot: s.x_dot + cfg.dt * x_acc,
        theta: s.theta + cfg.dt * s.theta_dot,
        theta_dot: s.theta_dot + cfg.dt * theta_acc,
    };
    if !next.is_finite() {
        return Err(Error::NonFiniteState(next.to_array()));
    }
    Ok(next)
}

/// Strict bounds: sitting exactly on a limit is not a failure.
pub fn is_failure(s: &CartPoleState, cfg: &EnvConfig) -> bool {
    s.theta.abs() > cfg.theta_fail || s.x.abs() > cfg.x_fail
}

pub fn random_initial_state<R: Rng + ?Sized>(rng: &mut R, cfg: &EnvConfig) -> CartPoleState {
    let [hx, hv, ht, hw] = cfg.init_half_widths();
    let mut draw = |half: f64| if half > 0.0 { rng.gen_range(-half..half) } else { 0.0 };
    CartPoleState { x: draw(hx), x_dot: draw(hv), theta: draw(ht), theta_dot: draw(hw) }
}
