use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum StapError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("vertex `{0}` is not a terminal")]
    NotATerminal(String),

    #[error("operation requires the {expected} variant, instance is {actual}")]
    WrongVariant { expected: &'static str, actual: &'static str },

    #[error("tree edge {0} cannot be covered by any link")]
    UncoverableEdge(String),

    #[error("infeasible instance: {0}")]
    Infeasible(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("oracle budget exceeded: {0}")]
    OracleBudget(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, StapError>;
