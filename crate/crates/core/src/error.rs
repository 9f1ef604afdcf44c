//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

/// Errors reported by the restoration routines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A vector or matrix had a size inconsistent with the expected geometry.
    Dimension {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    /// An invalid scalar parameter (negative weight, zero clip level, ...).
    Parameter(String),
    /// The observation mask has no observed entries.
    EmptyMask,
    /// Too few observed samples for the requested operation.
    TooFewObserved { needed: usize, actual: usize },
    /// The current factors reconstruct to zero on every observed sample, so
    /// the scale update is undefined.
    DegenerateModel,
    /// Every Monte-Carlo restart was abandoned as degenerate.
    AllRestartsDegenerate,
    /// A linear system could not be solved.
    Singular(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension {
                what,
                expected,
                actual,
            } => write!(f, "dimension mismatch for {what}: expected {expected}, got {actual}"),
            Error::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::EmptyMask => write!(f, "observation mask has no observed entries"),
            Error::TooFewObserved { needed, actual } => {
                write!(f, "too few observed samples: need {needed}, have {actual}")
            }
            Error::DegenerateModel => {
                write!(f, "model reconstructs to zero on the observed set")
            }
            Error::AllRestartsDegenerate => {
                write!(f, "every restart was abandoned as degenerate")
            }
            Error::Singular(what) => write!(f, "singular linear system: {what}"),
        }
    }
}

impl core::error::Error for Error {}
