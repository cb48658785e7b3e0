use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An instance refers to something it does not contain, or violates a field invariant.
    #[error("inconsistent instance: {0}")]
    InstanceConsistency(String),

    #[error("customer {customer} cannot be served: {reason}")]
    InfeasibleCustomer { customer: String, reason: String },

    #[error("time window of customer {customer} collapses ({start} > {end}) after service-time transform")]
    WindowCollapse { customer: String, start: f64, end: f64 },

    #[error("solution is not a partition of the customers: {0}")]
    Partition(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("no best-known entry for instance {0}")]
    UnknownInstance(String),

    #[error("invalid parameter {name}: {message}")]
    InvalidParam { name: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
