//! Command-line front end: configuration, report generation and rendering.

pub mod config;
pub mod reference;
pub mod render;
pub mod report;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Numerical(#[from] wente_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 verification failure, 2 usage, 3 numerical or i/o failure.
    pub fn exit_code(&self) -> i32 {
        use wente_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Verification(_) => 1,
            CliError::Numerical(E::UnknownSurface(_) | E::Config(_)) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}
