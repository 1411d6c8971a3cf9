use thiserror::Error;

/// Error type shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("inversion of zero at working precision")]
    InversionOfZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("series does not converge: {0}")]
    ConvergenceError(String),
    #[error("Laurent exponent {exp} outside window [{min}, {max}]")]
    LaurentOverflow { exp: i64, min: i64, max: i64 },
    #[error("Witt vector length {0} exceeds configured maximum {1}")]
    LengthTooLarge(usize, usize),
    #[error("element is not in the kernel of theta at effective precision")]
    NotInKernel,
    #[error("tilt division failure: {0}")]
    TiltDivisionFailure(String),
    #[error("operation not supported on ring tag {0}")]
    UnsupportedRing(String),
    #[error("rank deficient: {0}")]
    RankDeficient(String),
    #[error("truncation too shallow: {0}")]
    TruncationTooShallow(String),
    #[error("generator data is not cocycle-consistent: {0}")]
    NonCocycle(String),
    #[error("filtration window exceeded: {0}")]
    WindowExceeded(String),
    #[error("connection is not integrable (variables {0} and {1})")]
    NotIntegrable(usize, usize),
    #[error("representation is not admissible at truncation: {0}")]
    NotAdmissible(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    ParseError { line: usize, col: usize, msg: String },
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
