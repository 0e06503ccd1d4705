use thiserror::Error;

/// Errors raised by the library and the file parser.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("frame is not orthonormal (defect {defect:e})")]
    NonOrthonormal { defect: f64 },

    #[error("vector is not of unit length (norm {norm})")]
    NonUnit { norm: f64 },

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("invalid polynomial system: {0}")]
    InvalidSystem(String),

    #[error("path parameter {t} outside [0, {length}]")]
    OutOfRange { t: f64, length: f64 },

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("singular Newton system (rcond {rcond:e})")]
    SingularNewton { rcond: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
