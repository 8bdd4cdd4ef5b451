use thiserror::Error;

/// Errors raised by the library. Verdicts (inconclusive, not PSD, ...) are
/// not errors; they live in [`crate::certify::Verdict`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    ShapeMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("matrix is not Hermitian (||A - A^H||_2 = {asymmetry:e}, threshold {threshold:e})")]
    NotHermitian { asymmetry: f64, threshold: f64 },

    #[error("matrix dimension {dim} exceeds the materialization cap {cap}")]
    TooLarge { dim: usize, cap: usize },

    #[error("invalid dimension profile: {0}")]
    InvalidDims(String),

    #[error("subsystem index {index} out of range for {parties} parties")]
    IndexOutOfRange { index: usize, parties: usize },

    #[error("eigensolver did not converge")]
    NotConverged,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("premise violated: {0}")]
    PremiseViolated(String),

    #[error("trace is {trace}, expected 1")]
    NotNormalized { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("exact simplex solver is limited to n <= {cap}, got {n}; use the sampling oracle")]
    SolverCap { n: usize, cap: usize },

    #[error("threshold scan reached its cap of {cap} without leaving the certified region")]
    ScanCapReached { cap: usize },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
