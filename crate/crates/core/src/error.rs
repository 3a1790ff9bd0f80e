use thiserror::Error;

/// Errors raised by sequence evaluation and the estimators built on it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("truncation must hold at least one value")]
    EmptyTruncation,

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("sequence is not nonincreasing at index {index}")]
    NotDecreasing { index: usize },

    #[error("length {len} does not cover whole dyadic blocks (need 2^B - 1)")]
    IncompleteBlock { len: usize },

    #[error("pointwise evaluation of block {block} exceeds the 2^30-index range; supply block aggregates")]
    PointwiseRangeExceeded { block: usize },

    #[error("block {block} is beyond the available horizon of {available} blocks")]
    InsufficientBlocks { block: usize, available: usize },

    #[error("index {index} is not pointwise-evaluable for this sequence")]
    NotPointwise { index: u64 },

    #[error("window length {k_max} too large for a truncation of length {len}")]
    WindowTooLarge { k_max: usize, len: usize },

    #[error("iterate count {m} exceeds the supported maximum of {max}")]
    TooManyIterates { m: usize, max: usize },

    #[error("complex input: split into real and imaginary parts first")]
    ComplexInput,

    #[error("argument {t} outside the function domain ({lo}, {hi}]")]
    OutsideDomain { t: f64, lo: f64, hi: f64 },

    #[error("breakpoints must be strictly increasing")]
    BadBreakpoints,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("quadrature on [{a}, {b}] did not reach tolerance {tol:e}")]
    QuadratureNonConvergence { a: f64, b: f64, tol: f64 },

    #[error("tail integral diverges")]
    TailDivergent,

    #[error("Newton iteration did not converge after {iterations} steps")]
    NewtonNonConvergence { iterations: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
