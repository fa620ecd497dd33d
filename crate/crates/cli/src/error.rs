//! CLI-level failures and the exit codes they map to.

use std::fmt;

/// What went wrong before or while running a command.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable file, malformed JSON, schema violation, unknown suite (exit 2).
    Parse(String),
    /// Input violates a command precondition (exit 3).
    Precondition(String),
    /// Output plumbing failed (exit 1).
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(msg) | CliError::Precondition(msg) | CliError::Other(msg) => {
                f.write_str(msg)
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<interlace_core::Error> for CliError {
    fn from(err: interlace_core::Error) -> Self {
        CliError::Precondition(err.to_string())
    }
}
