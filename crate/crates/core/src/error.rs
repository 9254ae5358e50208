use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponent {0}: must be >= 1 or infinite")]
    InvalidExponent(f64),

    #[error("cannot parse exponent from {0:?}")]
    ParseExponent(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degenerate operator: {rows}x{cols} matrices are not allowed")]
    Degenerate { rows: usize, cols: usize },

    #[error("enumeration of 2^{bits} sign patterns exceeds the cap of 2^{cap}")]
    CapExceeded { bits: usize, cap: usize },

    #[error("{op} requires {requirement}")]
    Precondition { op: &'static str, requirement: String },

    #[error("no Pietsch certificate: {0}")]
    NoCertificate(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn precondition(op: &'static str, requirement: impl Into<String>) -> Self {
        Error::Precondition { op, requirement: requirement.into() }
    }
}
