//! Command-line experiment runner for `dynframe`: parses a run description
//! from flags and/or a JSON file, computes one table, and writes it as CSV or
//! JSON.
//!
//! Exit codes: 2 for configuration errors, 3 for computation errors, 4 for
//! I/O errors.

pub mod config;
pub mod runner;
pub mod table;

pub use config::{parse_config, Command, ExperimentConfig, Format};
pub use runner::run;
pub use table::{emit, Cell, ReportTable};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(clap::Error),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Computation(#[from] dynframe::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) if !e.use_stderr() => 0,
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Computation(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}
