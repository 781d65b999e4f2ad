//! Process exit codes and the error type they are derived from.
//!
//! 0 success, 1 usage, 2 verification failure, 3 infeasible request,
//! 4 I/O or parse failure.

use std::fmt;

use capgen_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    /// A generated or loaded measure failed verification.
    Verification(String),
    /// The request cannot be satisfied (bad class parameters, impossible
    /// strictness, unsupported n).
    Infeasible(String),
    /// Reading, writing or decoding data failed.
    IoParse(String),
}

impl CliError {
    pub fn parse(msg: impl Into<String>) -> CliError {
        CliError::IoParse(msg.into())
    }

    pub fn io(e: std::io::Error) -> CliError {
        CliError::IoParse(e.to_string())
    }

    pub fn json(e: serde_json::Error) -> CliError {
        CliError::IoParse(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::IoParse(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible request: {m}"),
            CliError::IoParse(m) => write!(f, "i/o or parse failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> CliError {
        match e {
            CoreError::VerificationFailed(m) => CliError::Verification(m),
            CoreError::Infeasible(_)
            | CoreError::InvalidParameter(_)
            | CoreError::InvalidPartition(_)
            | CoreError::ElementCount(_)
            | CoreError::EnumerationUnsupported(_)
            | CoreError::Degenerate(_) => CliError::Infeasible(e.to_string()),
            other => CliError::IoParse(other.to_string()),
        }
    }
}
