//! A from-scratch spiking neural network library built around discrete-time
//! leaky integrate-and-fire neurons, with three learning rules (surrogate
//! gradient, tempotron, bio-inspired active learning), Poisson and rate
//! spike encoders, dataset tooling, seeded hyperparameter search, and a
//! benchmark CLI.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod cli;
pub mod data;
pub mod encoding;
pub mod error;
pub mod hpo;
pub mod learning;
pub mod lif;
pub mod network;
pub mod runner;
pub mod spike;

pub use error::{Error, Result};
pub use lif::{decay_factor, lif_step, LayerState, LifParams};
pub use network::{
    forward, forward_hidden, predict, ForwardRecord, NetworkConfig, NetworkWeights, ReadoutMode,
    WeightMatrix,
};
pub use spike::SpikeTrain;
