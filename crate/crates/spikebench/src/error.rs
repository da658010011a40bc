use thiserror::Error;

/// Errors surfaced by the library. The CLI maps these onto exit codes:
/// configuration problems exit 1, data problems exit 2, runtime failures 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("csv parse error at row {row}: {msg}")]
    CsvParse { row: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("study failed: {0}")]
    Study(String),
}

pub type Result<T> = std::result::Result<T, Error>;
