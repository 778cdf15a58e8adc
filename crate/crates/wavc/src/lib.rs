//! Experiment harness for windowed arbitrarily varying channels: JSON configs,
//! parallel Monte Carlo trials, parameter sweeps and the `wavc` command line.

pub mod cli;
pub mod config;
pub mod error;
pub mod harness;
pub mod output;
pub mod selftest;
pub mod sweep;

pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use harness::{run_trials, RunReport, RunStats, Simulation};
pub use sweep::sweep;
