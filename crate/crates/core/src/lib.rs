//! Derivative-free training of cart-pole neurocontrollers.
//!
//! A fixed-topology action network is trained by maximizing cycle length
//! (steps until the pole falls or the cart leaves the track) with the
//! Nelder-Mead polytope method and random restarts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod env;
pub mod error;
pub mod evaluator;
pub mod experiment;
pub mod init;
pub mod net;
pub mod optimizer;
pub mod params;
pub mod seeding;
pub mod trainer;

pub use env::{CartPoleState, EnvConfig};
pub use error::{Error, Result};
pub use evaluator::{batch_stats, generalization_test, BatchStats, GeneralizationResult, Orientation};
pub use experiment::{ExperimentConfig, Profile};
pub use init::{build_initial_simplex, LineSearchConfig};
pub use net::{ActionNetwork, NetworkTopology};
pub use optimizer::{OptimizerOutcome, PolytopeConfig, Simplex, TerminationReason, Vertex};
pub use params::ParameterVector;
pub use trainer::{run_training, CartPoleTask, CycleEnd, CycleOutcome, StrategyConfig, TrainingReport};
