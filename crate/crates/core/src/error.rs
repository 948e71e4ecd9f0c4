use thiserror::Error;

/// Everything that can go wrong while building problems, planning or
/// benchmarking.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },

    #[error("vertex id {0} is already present in the index")]
    DuplicateId(usize),

    #[error("state is not in free space: {0}")]
    NotFree(&'static str),

    #[error("repulsive force is singular at zero obstacle distance")]
    Singularity,

    #[error("no free sample found after {attempts} rejection attempts")]
    DegenerateEnvironment { attempts: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("grid resolution {resolution} leaves the {which} cell blocked")]
    Resolution { resolution: f64, which: &'static str },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
