//! Naive reference implementations used only by the test suite. They are
//! written as straight-line transcriptions and share no code with the library.
#![allow(dead_code, clippy::needless_range_loop)]

/// Branch labels of the polytope iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleBranch {
    ReflectAccept,
    ExpandAccept,
    ReflectAfterExpand,
    ContractAccept,
    Shrink,
}

pub type Points = Vec<Vec<f64>>;

/// One polytope iteration on parallel `points` / `values` arrays.
/// Returns the new arrays, the branch label and the objective-call count.
pub fn oracle_polytope_step(
    points: &Points,
    values: &[f64],
    alpha: f64,
    gamma: f64,
    beta: f64,
    f: &mut dyn FnMut(&[f64]) -> f64,
) -> (Points, Vec<f64>, OracleBranch, usize) {
    let n = points.len() - 1;
    let dim = points[0].len();

    // Insertion sort on values, equal values keep their order.
    let mut w: Points = points.clone();
    let mut fv: Vec<f64> = values.to_vec();
    for i in 1..=n {
        let mut j = i;
        while j > 0 && fv[j - 1] > fv[j] {
            fv.swap(j - 1, j);
            w.swap(j - 1, j);
            j -= 1;
        }
    }

    // Centroid of the first n vertices.
    let mut c = vec![0.0; dim];
    for i in 0..n {
        for d in 0..dim {
            c[d] += w[i][d];
        }
    }
    for d in 0..dim {
        c[d] /= n as f64;
    }

    // Reflection.
    let mut r = vec![0.0; dim];
    for d in 0..dim {
        r[d] = c[d] + alpha * (c[d] - w[n][d]);
    }
    let fr = f(&r);
    let mut calls = 1;

    if fv[0] <= fr && fr <= fv[n - 1] {
        w[n] = r;
        fv[n] = fr;
        return (w, fv, OracleBranch::ReflectAccept, calls);
    }

    // Expansion.
    if fr < fv[0] {
        let mut e = vec![0.0; dim];
        for d in 0..dim {
            e[d] = c[d] + gamma * (r[d] - c[d]);
        }
        let fe = f(&e);
        calls += 1;
        if fe < fr {
            w[n] = e;
            fv[n] = fe;
            return (w, fv, OracleBranch::ExpandAccept, calls);
        }
        w[n] = r;
        fv[n] = fr;
        return (w, fv, OracleBranch::ReflectAfterExpand, calls);
    }

    // Contraction, then shrink.
    let mut k = vec![0.0; dim];
    if fr >= fv[n] {
        for d in 0..dim {
            k[d] = c[d] + beta * (w[n][d] - c[d]);
        }
    } else {
        for d in 0..dim {
            k[d] = c[d] + beta * (r[d] - c[d]);
        }
    }
    let fk = f(&k);
    calls += 1;
    let smaller = if fr < fv[n] { fr } else { fv[n] };
    if fk < smaller {
        w[n] = k;
        fv[n] = fk;
        return (w, fv, OracleBranch::ContractAccept, calls);
    }
    for i in 1..=n {
        for d in 0..dim {
            w[i][d] = 0.5 * (w[0][d] + w[i][d]);
        }
        fv[i] = f(&w[i]);
        calls += 1;
    }
    (w, fv, OracleBranch::Shrink, calls)
}

/// Two-pass mean absolute deviation of the values.
pub fn oracle_termination_measure(values: &[f64]) -> f64 {
    let mut total = 0.0;
    for v in values {
        total += v;
    }
    let mean = total / values.len() as f64;
    let mut dev = 0.0;
    for v in values {
        dev += (v - mean).abs();
    }
    dev / values.len() as f64
}

/// Two-pass mean and population standard deviation.
pub fn oracle_mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mut total = 0.0;
    for v in values {
        total += v;
    }
    let mean = total / n;
    let mut sq = 0.0;
    for v in values {
        sq += (v - mean) * (v - mean);
    }
    (mean, (sq / n).sqrt())
}

pub struct OraclePhysics {
    pub gravity: f64,
    pub cart_mass: f64,
    pub pole_mass: f64,
    pub half_length: f64,
    pub dt: f64,
}

pub const STANDARD_PHYSICS: OraclePhysics =
    OraclePhysics { gravity: 9.8, cart_mass: 1.0, pole_mass: 0.1, half_length: 0.5, dt: 0.02 };

/// `(theta_ddot, x_ddot)` from the textbook frictionless cart-pole equations.
pub fn oracle_cartpole_accel(state: [f64; 4], force: f64, p: &OraclePhysics) -> (f64, f64) {
    let [_, _, theta, theta_dot] = state;
    let m_total = p.cart_mass + p.pole_mass;
    let numerator = p.gravity * theta.sin()
        + theta.cos() * (-force - p.pole_mass * p.half_length * theta_dot * theta_dot * theta.sin()) / m_total;
    let denominator = p.half_length * (4.0 / 3.0 - p.pole_mass * theta.cos() * theta.cos() / m_total);
    let theta_ddot = numerator / denominator;
    let x_ddot = (force
        + p.pole_mass * p.half_length * (theta_dot * theta_dot * theta.sin() - theta_ddot * theta.cos()))
        / m_total;
    (theta_ddot, x_ddot)
}

/// Euler update with positions advanced by the pre-step velocities.
pub fn oracle_cartpole_step(state: [f64; 4], force: f64, p: &OraclePhysics) -> [f64; 4] {
    let (theta_ddot, x_ddot) = oracle_cartpole_accel(state, force, p);
    let [x, x_dot, theta, theta_dot] = state;
    [x + p.dt * x_dot, x_dot + p.dt * x_ddot, theta + p.dt * theta_dot, theta_dot + p.dt * theta_ddot]
}

/// Network output from explicit weight matrices, for a 4-5-1 layout with
/// shortcut connections.
pub fn oracle_forward(params: &[f64], inputs: [f64; 4]) -> f64 {
    let sig = |z: f64| 1.0 / (1.0 + (-z).exp());
    let mut w = [[0.0; 4]; 5];
    for j in 0..5 {
        for i in 0..4 {
            w[j][i] = params[j * 4 + i];
        }
    }
    let b: Vec<f64> = params[20..25].to_vec();
    let v: Vec<f64> = params[25..30].to_vec();
    let s: Vec<f64> = params[30..34].to_vec();
    let b_out = params[34];
    let mut h = [0.0; 5];
    for j in 0..5 {
        let mut z = b[j];
        for i in 0..4 {
            z += w[j][i] * inputs[i];
        }
        h[j] = sig(z);
    }
    let mut z = b_out;
    for j in 0..5 {
        z += v[j] * h[j];
    }
    for i in 0..4 {
        z += s[i] * inputs[i];
    }
    sig(z)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn rosenbrock(x: &[f64]) -> f64 {
    (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
}
