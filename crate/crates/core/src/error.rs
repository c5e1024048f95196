use thiserror::Error;

/// Errors produced by the optimizer library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A numeric parameter was outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// Two vectors (or a vector and an objective) disagree on dimension.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    /// Inconsistent run configuration (roster, population size, ...).
    #[error("configuration error: {0}")]
    Config(String),
    /// A communication scheme was applied to an empty team.
    #[error("empty team snapshot")]
    EmptySnapshot,
    /// Malformed input file.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub(crate) fn check_dimension(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
