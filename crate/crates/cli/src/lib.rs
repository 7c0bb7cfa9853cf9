//! Configuration, reports, the line/verify/sweep pipeline and SVG output for
//! the `isoline` command.

use std::path::PathBuf;

use thiserror::Error;

pub mod config;
pub mod pipeline;
pub mod plot;
pub mod report;

pub use config::{OutputFormat, RunConfig};
pub use report::{ReportBlock, VerificationReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] isoline::Error),
}

impl CliError {
    /// 1 for usage, config and precondition errors; 2 for general-position
    /// failures; 3 for numerical disagreements.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Core(e) => match e {
                isoline::Error::GeneralPosition(_) => 2,
                isoline::Error::MethodDisagreement(_)
                | isoline::Error::QuadratureResolution { .. }
                | isoline::Error::RegularValueNotFound { .. } => 3,
                _ => 1,
            },
        }
    }
}
