//! Command-line plumbing for `ouwedge`: field CSV files, config parsing,
//! the replicated estimator study and the subcommand surface.

pub mod commands;
pub mod csvio;
pub mod error;
pub mod experiment;
pub mod parse;

pub use csvio::{read_field_csv, write_field_csv};
pub use error::{CliError, CliResult};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentOutput};
