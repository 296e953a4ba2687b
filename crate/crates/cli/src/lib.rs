//! Front-end for `qcorr`: correlation reports for state files, parameter
//! sweeps written as CSV, and a seeded verification suite.

use std::fmt;

pub mod compute;
pub mod sweep;
pub mod verify;

/// A command failure, split by the exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// Bad input: unreadable or invalid state, bad flags, unsupported shape.
    Validation(String),
    /// The computation ran but an invariant check failed.
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Verification(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(msg) => write!(f, "error: {msg}"),
            Failure::Verification(msg) => write!(f, "verification failed: {msg}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<qcorr::Error> for Failure {
    fn from(e: qcorr::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;
