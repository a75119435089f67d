//! Experiment harness for the `qjd` command-line tool.

pub mod app;
pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod scenarios;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
