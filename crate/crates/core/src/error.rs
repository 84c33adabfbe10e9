use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid quantum object: {0}")]
    InvalidQuantum(String),

    #[error("invalid correlators: {0}")]
    InvalidCorrelator(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("semantic error: {0}")]
    Semantic(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("LP solver failed: {0}")]
    Lp(String),

    #[error("monotonicity violated while bracketing: {0}")]
    Monotonicity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
