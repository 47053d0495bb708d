//! Library surface of the `casimir` command-line tool: configuration
//! parsing, task execution with CSV output, and the cosine-amplitude fit.

pub mod config;
pub mod fit;
pub mod runner;

pub use config::{parse_config, ConfigError, RunConfig};
pub use fit::{fit_amplitude, FitError, FitResult};
pub use runner::{execute, RunError, RunOptions, RunOutcome};
