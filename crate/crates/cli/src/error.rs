//! CLI-level errors mapped onto process exit codes.

use std::fmt;

/// Failure classes; the process exit code is 1 for configuration problems,
/// 2 for I/O problems, and 3 when the solver failed on every segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Config(String),
    Io(String),
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) => 2,
            CliError::Solver(_) => 3,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        CliError::Io(msg.into())
    }

    pub fn solver(msg: impl Into<String>) -> Self {
        CliError::Solver(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
            CliError::Solver(msg) => write!(f, "solver error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<desr_core::Error> for CliError {
    fn from(err: desr_core::Error) -> Self {
        use desr_core::Error::*;
        match err {
            DegenerateModel | AllRestartsDegenerate | Singular(_) => {
                CliError::Solver(err.to_string())
            }
            _ => CliError::Config(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}
