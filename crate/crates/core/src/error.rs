use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid potential file: {0}")]
    Format(String),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("argument out of range: {0}")]
    Domain(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("no such state: {0}")]
    NoSuchState(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("factorization breakdown: {0}")]
    Breakdown(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
