use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid system shape: {0}")]
    InvalidShape(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("operator is not Hermitian (max |M - M^dag| = {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not unitary (max |U^dag U - 1| = {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("invalid subsystem index {index} for a {factors}-factor system")]
    InvalidSubsystem { index: usize, factors: usize },

    #[error("expected unit trace, found {trace}")]
    NonUnitTrace { trace: f64 },

    #[error("operator is not positive on product tests (min product expectation {min_value:e})")]
    NotPopt { min_value: f64 },

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("a state cannot be distinguished from itself")]
    SameState,

    #[error("no parity row separates {0} from {1}")]
    NoSeparatingRow(String, String),

    #[error("strategy has no decoder for the pair ({0}, {1})")]
    UndefinedPair(usize, usize),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("count mismatch: {0}")]
    CountMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
