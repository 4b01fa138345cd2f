use thiserror::Error;

/// Errors raised by library operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("self-loop")]
    SelfLoop,
    #[error("vertex out of range")]
    VertexOutOfRange,
    #[error("malformed family file: {0}")]
    Malformed(String),
    #[error("inconsistent family: {0}")]
    Inconsistent(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("size {n} exceeds the exact-mode cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),
    #[error("rejection budget exhausted after {0} attempts")]
    RejectionBudget(usize),
    #[error("retry budget exhausted in stage '{stage}': {reason}")]
    RetriesExhausted { stage: String, reason: String },
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("invalid rotation: {0}")]
    InvalidRotation(String),
    #[error("structural obstruction: {0}")]
    Obstruction(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("replay mismatch: {0}")]
    Replay(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Malformed(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn retries(stage: &str, reason: impl Into<String>) -> Error {
    Error::RetriesExhausted { stage: stage.into(), reason: reason.into() }
}
