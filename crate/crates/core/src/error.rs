use thiserror::Error;

#[derive(Debug, Error)]
pub enum TodaError {
    #[error("unsupported Lie type: {0}")]
    UnsupportedType(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("no catalog match for generalized Cartan matrix {0:?}")]
    NoCatalogMatch(Vec<Vec<i64>>),

    #[error("invalid input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, TodaError>;
