//! Learns solver control parameters from the history of past runs: only runs that met every
//! constraint are used, inputs are min-max scaled, and for each tunable parameter a linear
//! and a Gaussian kernel regressor compete on held-out rows.

pub mod error;
pub mod history;
pub mod linalg;
pub mod models;
pub mod rank;
pub mod select;
pub mod synthetic;
pub mod table;

pub use error::{Error, Result};
pub use history::{load_history, read_history, write_history, TuningRecord};
pub use models::{fit_kernel, fit_linear, predictive_confidence, FittedModel, ModelBody, ModelKind};
pub use rank::{rank_attributes, AttributeImportance};
pub use select::{overlay_json, predict_params, select_models, ModelStore, Prediction, SPLIT_SEED};
pub use table::{build_training_table, TrainingTable};
