use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("history row {row}: {message}")]
    Record { row: usize, message: String },

    #[error("training error: {0}")]
    Training(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("no model could be fitted for: {}", .0.join(", "))]
    Targets(Vec<String>),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
