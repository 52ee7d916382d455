//! Fixed-topology feedforward action network with optional direct
//! input-to-output connections.
//!
//! Parameters are stored flat, in this order:
//! input->hidden weights (row-major, one row per hidden unit), hidden biases,
//! hidden->output weights, input->output shortcut weights, output biases.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ParameterVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkTopology {
    pub inputs: usize,
    pub hidden: usize,
    pub outputs: usize,
    pub shortcut_connections: bool,
}

impl Default for NetworkTopology {
    /// Four state inputs, five hidden sigmoids, one output, with shortcuts.
    fn default() -> Self {
        Self { inputs: 4, hidden: 5, outputs: 1, shortcut_connections: true }
    }
}

impl NetworkTopology {
    pub fn parameter_count(&self) -> usize {
        let shortcut = if self.shortcut_connections { self.inputs * self.outputs } else { 0 };
        self.inputs * self.hidden + self.hidden + self.hidden * self.outputs + shortcut + self.outputs
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs == 0 || self.hidden == 0 || self.outputs == 0 {
            return Err(Error::InvalidConfig(format!("every layer needs at least one unit, got {self:?}")));
        }
        Ok(())
    }

    fn header(&self) -> String {
        let shortcut = if self.shortcut_connections { "shortcut" } else { "noshortcut" };
        format!("topology {} {} {} {}", self.inputs, self.hidden, self.outputs, shortcut)
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Structured view of a flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkWeights {
    /// `hidden x inputs`, row-major.
    pub input_hidden: Vec<f64>,
    pub hidden_bias: Vec<f64>,
    /// `outputs x hidden`, row-major.
    pub hidden_output: Vec<f64>,
    /// `outputs x inputs`, row-major; empty without shortcut connections.
    pub shortcut: Vec<f64>,
    pub output_bias: Vec<f64>,
}

impl NetworkWeights {
    pub fn unflatten(topology: &NetworkTopology, params: &[f64]) -> Result<Self> {
        check_len(topology, params)?;
        let t = topology;
        let mut rest = params;
        let mut take = |k: usize| {
            let (head, tail) = rest.split_at(k);
            rest = tail;
            head.to_vec()
        };
        Ok(Self {
            input_hidden: take(t.inputs * t.hidden),
            hidden_bias: take(t.hidden),
            hidden_output: take(t.hidden * t.outputs),
            shortcut: take(if t.shortcut_connections { t.inputs * t.outputs } else { 0 }),
            output_bias: take(t.outputs),
        })
    }

    pub fn flatten(&self) -> ParameterVector {
        [&self.input_hidden, &self.hidden_bias, &self.hidden_output, &self.shortcut, &self.output_bias]
            .into_iter()
            .flatten()
            .copied()
            .collect::<Vec<_>>()
            .into()
    }
}

fn check_len(topology: &NetworkTopology, params: &[f64]) -> Result<()> {
    let expected = topology.parameter_count();
    if params.len() != expected {
        return Err(Error::DimensionMismatch { expected, found: params.len() });
    }
    Ok(())
}

/// Output of the single output unit, strictly inside `(0, 1)` for finite
/// parameters and inputs.
pub fn forward(topology: &NetworkTopology, params: &[f64], inputs: &[f64]) -> Result<f64> {
    check_len(topology, params)?;
    if topology.outputs != 1 {
        return Err(Error::UnsupportedTopology(format!(
            "forward produces one action probability, topology has {} outputs",
            topology.outputs
        )));
    }
    if inputs.len() != topology.inputs {
        return Err(Error::DimensionMismatch { expected: topology.inputs, found: inputs.len() });
    }
    if let Some((index, &value)) = inputs.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFiniteInput { index, value });
    }

    let (ni, nh) = (topology.inputs, topology.hidden);
    let (input_hidden, rest) = params.split_at(ni * nh);
    let (hidden_bias, rest) = rest.split_at(nh);
    let (hidden_output, rest) = rest.split_at(nh);
    let (shortcut, output_bias) = rest.split_at(if topology.shortcut_connections { ni } else { 0 });

    let mut z = output_bias[0];
    for ((row, b), v) in input_hidden.chunks_exact(ni).zip(hidden_bias).zip(hidden_output) {
        let pre = row.iter().zip(inputs).fold(*b, |acc, (w, x)| acc + w * x);
        z += v * sigmoid(pre);
    }
    for (s, x) in shortcut.iter().zip(inputs) {
        z += s * x;
    }
    Ok(sigmoid(z))
}

/// A topology together with a matching parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionNetwork {
    topology: NetworkTopology,
    params: ParameterVector,
}

impl ActionNetwork {
    pub fn new(topology: NetworkTopology, params: ParameterVector) -> Result<Self> {
        topology.validate()?;
        check_len(&topology, &params)?;
        Ok(Self { topology, params })
    }

    pub fn topology(&self) -> &NetworkTopology {
        &self.topology
    }

    pub fn params(&self) -> &ParameterVector {
        &self.params
    }

    pub fn forward(&self, inputs: &[f64]) -> Result<f64> {
        forward(&self.topology, &self.params, inputs)
    }

    /// Renders the weight-file text: a topology line, the parameter count, then
    /// one shortest round-trip decimal per line.
    pub fn to_weight_file(&self) -> String {
        let mut out = self.topology.header();
        out.push('\n');
        let _ = writeln!(out, "{}", self.params.len());
        for p in self.params.iter() {
            let _ = writeln!(out, "{p:?}");
        }
        out
    }

    pub fn from_weight_file(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::WeightFile { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

        let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let topology = match fields.as_slice() {
            ["topology", i, h, o, s] => {
                let count = |v: &str| v.parse::<usize>().map_err(|e| err(1, format!("bad layer size {v:?}: {e}")));
                let shortcut_connections = match *s {
                    "shortcut" => true,
                    "noshortcut" => false,
                    other => return Err(err(1, format!("expected shortcut or noshortcut, found {other:?}"))),
                };
                NetworkTopology { inputs: count(i)?, hidden: count(h)?, outputs: count(o)?, shortcut_connections }
            }
            _ => return Err(err(1, format!("expected `topology <in> <hidden> <out> <shortcut|noshortcut>`, found {header:?}"))),
        };
        topology.validate().map_err(|e| err(1, e.to_string()))?;

        let (_, count_line) = lines.next().ok_or_else(|| err(2, "missing parameter count".into()))?;
        let declared: usize = count_line
            .parse()
            .map_err(|e| err(2, format!("bad parameter count {count_line:?}: {e}")))?;
        let expected = topology.parameter_count();
        if declared != expected {
            return Err(err(2, format!("topology needs {expected} parameters, file declares {declared}")));
        }

        let mut params = Vec::with_capacity(expected);
        let mut first_extra = None;
        for (line, value) in lines {
            if value.is_empty() {
                continue;
            }
            let p: f64 = value.parse().map_err(|e| err(line, format!("bad parameter {value:?}: {e}")))?;
            if !p.is_finite() {
                return Err(err(line, format!("parameter is not finite: {value}")));
            }
            if params.len() == expected {
                first_extra.get_or_insert(line);
            }
            params.push(p);
        }
        if params.len() != expected {
            let line = first_extra.unwrap_or(text.lines().count() + 1);
            return Err(err(line, format!("expected {expected} parameters, found {}", params.len())));
        }
        Self::new(topology, params.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_counts() {
        assert_eq!(NetworkTopology::default().parameter_count(), 35);
        let tiny = NetworkTopology { inputs: 1, hidden: 1, outputs: 1, shortcut_connections: false };
        assert_eq!(tiny.parameter_count(), 4);
        let small = NetworkTopology { inputs: 2, hidden: 3, outputs: 1, shortcut_connections: true };
        assert_eq!(small.parameter_count(), 15);
    }

    #[test]
    fn zero_weights_give_one_half() {
        let t = NetworkTopology::default();
        let y = forward(&t, &vec![0.0; 35], &[0.3, -1.0, 2.0, 0.1]).unwrap();
        assert_eq!(y, 0.5);
    }

    #[test]
    fn output_bias_saturates() {
        let t = NetworkTopology::default();
        let mut p = vec![0.0; 35];
        p[34] = 20.0;
        let y = forward(&t, &p, &[0.0; 4]).unwrap();
        let expected = 1.0 / (1.0 + (-20.0f64).exp());
        assert_eq!(y, expected);
        assert!((y - (1.0 - 2.061_153_6e-9)).abs() < 1e-15);
        assert!(y < 1.0);
    }

    #[test]
    fn tiny_network_by_hand() {
        // h = sigma(0) = 0.5, y = sigma(0.5 * 1 + 0 * 1 + 0)
        let t = NetworkTopology { inputs: 1, hidden: 1, outputs: 1, shortcut_connections: true };
        let y = forward(&t, &[1.0, 0.0, 1.0, 1.0, 0.0], &[0.0]).unwrap();
        assert!((y - 0.622_459_331_201_854_6).abs() < 1e-15, "{y}");
    }

    #[test]
    fn shortcut_path_is_used() {
        let t = NetworkTopology { inputs: 1, hidden: 1, outputs: 1, shortcut_connections: true };
        let y = forward(&t, &[0.0, 0.0, 0.0, 2.0, 0.0], &[1.0]).unwrap();
        assert_eq!(y, sigmoid(2.0));
    }

    #[test]
    fn negated_output_layer_mirrors_output() {
        let t = NetworkTopology::default();
        let mut p: Vec<f64> = (0..35).map(|i| (i as f64 * 0.37).sin()).collect();
        // Zero inputs and zero hidden biases: every hidden unit sits at 0.5.
        p[20..25].fill(0.0);
        let y = forward(&t, &p, &[0.0; 4]).unwrap();
        for v in &mut p[25..35] {
            *v = -*v;
        }
        let y_neg = forward(&t, &p, &[0.0; 4]).unwrap();
        assert!((y + y_neg - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let t = NetworkTopology::default();
        let p = vec![0.0; 35];
        assert!(matches!(
            forward(&t, &p, &[0.0, f64::NAN, 0.0, 0.0]),
            Err(Error::NonFiniteInput { index: 1, .. })
        ));
        assert!(forward(&t, &p, &[0.0; 3]).is_err());
        assert!(forward(&t, &p[..34], &[0.0; 4]).is_err());
        let two = NetworkTopology { outputs: 2, ..t };
        assert!(matches!(
            forward(&two, &vec![0.0; two.parameter_count()], &[0.0; 4]),
            Err(Error::UnsupportedTopology(_))
        ));
    }

    #[test]
    fn weights_layout() {
        let t = NetworkTopology::default();
        let p: Vec<f64> = (0..35).map(f64::from).collect();
        let w = NetworkWeights::unflatten(&t, &p).unwrap();
        assert_eq!(w.input_hidden.len(), 20);
        assert_eq!(w.hidden_bias, vec![20.0, 21.0, 22.0, 23.0, 24.0]);
        assert_eq!(w.hidden_output, vec![25.0, 26.0, 27.0, 28.0, 29.0]);
        assert_eq!(w.shortcut, vec![30.0, 31.0, 32.0, 33.0]);
        assert_eq!(w.output_bias, vec![34.0]);
        assert_eq!(w.flatten().as_slice(), p.as_slice());
    }

    #[test]
    fn weight_file_text() {
        let t = NetworkTopology { inputs: 1, hidden: 1, outputs: 1, shortcut_connections: false };
        let net = ActionNetwork::new(t, vec![0.1, -2.0, 1e-300, 3.0].into()).unwrap();
        let text = net.to_weight_file();
        assert_eq!(text, "topology 1 1 1 noshortcut\n4\n0.1\n-2.0\n1e-300\n3.0\n");
        assert_eq!(ActionNetwork::from_weight_file(&text).unwrap(), net);
    }

    #[test]
    fn weight_file_errors_name_the_line() {
        let bad_count = "topology 4 5 1 shortcut\n34\n";
        match ActionNetwork::from_weight_file(bad_count) {
            Err(Error::WeightFile { line: 2, message }) => {
                assert!(message.contains("35") && message.contains("34"), "{message}")
            }
            other => panic!("{other:?}"),
        }
        let bad_value = "topology 1 1 1 noshortcut\n4\n0.1\nabc\n0\n0\n";
        assert!(matches!(ActionNetwork::from_weight_file(bad_value), Err(Error::WeightFile { line: 4, .. })));
        let short = "topology 1 1 1 noshortcut\n4\n0.1\n";
        match ActionNetwork::from_weight_file(short) {
            Err(Error::WeightFile { message, .. }) => assert!(message.contains("expected 4 parameters, found 1")),
            other => panic!("{other:?}"),
        }
        let long = "topology 1 1 1 noshortcut\n4\n1\n2\n3\n4\n5\n";
        assert!(matches!(ActionNetwork::from_weight_file(long), Err(Error::WeightFile { line: 7, .. })));
        assert!(matches!(ActionNetwork::from_weight_file("weights\n"), Err(Error::WeightFile { line: 1, .. })));
        assert!(matches!(ActionNetwork::from_weight_file(""), Err(Error::WeightFile { line: 1, .. })));
    }
}
