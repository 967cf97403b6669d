use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not a group: {0}")]
    InvalidGroup(String),
    #[error("subgroup {0} is not normal: witness g={1}")]
    NotNormal(String, usize),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("capacity exceeded: {what} needs more than the limit of {limit}")]
    Capacity { what: String, limit: u64 },
    #[error("inverse-system axiom ({axiom}) violated: {witness}")]
    AxiomViolation { axiom: usize, witness: String },
    #[error("unbound variable: {0}")]
    UnboundVariable(String),
    #[error("variable {0} has no rank bound")]
    UnrankedVariable(String),
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn capacity(what: impl Into<String>, limit: u64) -> Self {
        Error::Capacity { what: what.into(), limit }
    }

    pub fn pre(msg: impl Into<String>) -> Self {
        Error::PreconditionFailed(msg.into())
    }
}
