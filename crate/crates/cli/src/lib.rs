//! Library side of the `copw` command-line tool: file formats, the example
//! registry and the `d = 3` scanner.

pub mod io;
pub mod registry;
pub mod scan;

use thiserror::Error;

/// Exit code for a reproduced or successful run.
pub const EXIT_OK: u8 = 0;
/// Exit code when a verdict differs from the expected one.
pub const EXIT_MISMATCH: u8 = 1;
/// Exit code for unreadable or invalid input.
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("invalid JSON in {0}: {1}")]
    Json(String, #[source] serde_json::Error),
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] copw_core::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("unknown example {name:?}; valid names: {valid}")]
    UnknownExample { name: String, valid: String },
}
