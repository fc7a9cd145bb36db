use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),

    #[error("element belongs to a different minion")]
    ForeignElement,

    #[error("arity {arity} not materializable: {reason}")]
    Cutoff { arity: usize, reason: String },

    #[error("element budget exceeded at arity {arity}: needs {needed}, budget {budget}")]
    Budget {
        arity: usize,
        needed: usize,
        budget: usize,
    },

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("verdict unknown (search bound {bound}): {context}")]
    Unknown { bound: usize, context: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
