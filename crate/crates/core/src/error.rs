use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("invalid Schmidt weights: {0}")]
    BadWeights(String),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("not a Choi state: A-marginal deviates from I/d by {0:e}")]
    NotAChoiState(f64),
    #[error("not a valid density matrix: {0}")]
    NotADensityMatrix(String),
    #[error("product state: eta factors undefined")]
    ProductState,
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
