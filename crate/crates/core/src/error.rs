use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("dimension {dim} is not divisible by the required {required}")]
    Divisibility { dim: usize, required: usize },

    #[error("dimension {requested} exceeds the configured limit {limit}")]
    DimensionLimit { requested: usize, limit: usize },

    #[error("operator does not commute with the given family (deviation {0:e})")]
    NotCommuting(f64),

    #[error("not a masker: {0}")]
    NotAMasker(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
