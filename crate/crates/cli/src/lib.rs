//! Experiment harness: configuration, sweeps and table output.

pub mod config;
pub mod error;
pub mod experiments;
pub mod table;

pub use config::{Experiment, ExperimentConfig};
pub use error::{CliError, CliResult};
pub use experiments::{run, Report};
pub use table::{emit, Format, Table};
