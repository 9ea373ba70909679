use thiserror::Error;

use troplog_core::dimension::DimError;
use troplog_core::{CurveError, FormError, TropMapError, WsError};

/// Exit status for a run whose checks found a mismatch.
pub const EXIT_MISMATCH: i32 = 1;
/// Exit status for unreadable or inconsistent input.
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: format_version {found} is not supported (expected {supported})")]
    Version {
        path: String,
        found: u32,
        supported: u32,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Map(#[from] TropMapError),
    #[error(transparent)]
    WellSpaced(#[from] WsError),
    #[error(transparent)]
    Dim(#[from] DimError),
    #[error(transparent)]
    Contact(#[from] troplog_core::contact::ContactShapeError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_INPUT
    }
}
