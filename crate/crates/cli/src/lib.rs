//! Experiment driver for `slitsim`: config files, the four subcommands and
//! their CSV/SVG outputs.

pub mod app;
pub mod commands;
pub mod config;
mod error;
pub mod output;

pub use config::{EmissionKind, ExperimentConfig};
pub use error::{CliError, Result};
