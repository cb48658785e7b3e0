//! Per-target model selection, the persisted model store and parameter prediction.

use hfvrp::features::InstanceFeatures;
use hfvrp::params::TUNABLE_PARAMS;
use hfvrp::ControlParams;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::{INPUT_COLUMNS, TARGET_COLUMNS};
use crate::models::{fit_kernel, fit_linear, FittedModel, ModelKind};
use crate::rank::{rank_attributes, AttributeImportance, RANK_MIN_ROWS};
use crate::table::{Normalizer, TrainingTable};

pub const SPLIT_SEED: u64 = 2020;
pub const HOLDOUT_SHARE: f64 = 0.2;
/// Predictions are clamped to `[0, CLAMP_FACTOR · largest observed value]`.
pub const CLAMP_FACTOR: f64 = 1.5;
/// Normalised features outside this range trigger an extrapolation warning.
pub const EXTRAPOLATION_RANGE: (f64, f64) = (-0.5, 1.5);

/// Seeded shuffle of row indices, split into training and held-out parts. At least one row
/// is held out and at least one kept for training.
pub fn split_rows(n: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let hold = ((n as f64 * HOLDOUT_SHARE).round() as usize).clamp(1.min(n), n.saturating_sub(1).max(1.min(n)));
    let train = idx.split_off(hold);
    (train, idx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetReport {
    pub target: String,
    pub linear_confidence: Option<f64>,
    pub kernel_confidence: Option<f64>,
    pub chosen: ModelKind,
    pub ranking: Vec<AttributeImportance>,
}

/// Everything needed to predict parameters for a new instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelStore {
    pub inputs: Vec<String>,
    pub normalizer: Option<Normalizer>,
    /// Largest observed value per target, in model order.
    pub target_max: Vec<f64>,
    pub models: Vec<FittedModel>,
    pub report: Vec<TargetReport>,
}

impl ModelStore {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn model(&self, target: &str) -> Option<&FittedModel> {
        self.models.iter().find(|m| m.target == target)
    }
}

/// Fits both regressors per target on a seeded 80/20 split and keeps the one with the
/// higher held-out confidence; the linear model wins ties.
pub fn select_models(table: &TrainingTable, seed: u64) -> Result<ModelStore> {
    if table.rows() < 2 {
        return Err(Error::Precondition(format!("model selection needs at least 2 rows, got {}", table.rows())));
    }
    let (train_rows, hold_rows) = split_rows(table.rows(), seed);
    let train = table.subset(&train_rows);
    let hold = table.subset(&hold_rows);
    let mut models = Vec::new();
    let mut report = Vec::new();
    let mut failed = Vec::new();
    for (t, name) in table.targets.iter().enumerate() {
        let score = |fit: Result<FittedModel>| -> Option<(FittedModel, f64)> {
            let mut m = fit.ok()?;
            let c = m.evaluate(&hold, t).ok()?;
            Some((m, c))
        };
        let lin = score(fit_linear(&train, t));
        let ker = score(fit_kernel(&train, t));
        let (lc, kc) = (lin.as_ref().map(|m| m.1), ker.as_ref().map(|m| m.1));
        let chosen = match (lin, ker) {
            (Some(l), Some(k)) => {
                if k.1 > l.1 {
                    k.0
                } else {
                    l.0
                }
            }
            (Some(l), None) => l.0,
            (None, Some(k)) => k.0,
            (None, None) => {
                failed.push(name.clone());
                continue;
            }
        };
        let ranking = if table.rows() >= RANK_MIN_ROWS { rank_attributes(table, t)? } else { Vec::new() };
        report.push(TargetReport {
            target: name.clone(),
            linear_confidence: lc,
            kernel_confidence: kc,
            chosen: chosen.kind(),
            ranking,
        });
        models.push(chosen);
    }
    if !failed.is_empty() {
        return Err(Error::Targets(failed));
    }
    let target_max = (0..table.targets.len())
        .map(|t| table.y.iter().map(|r| r[t]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    Ok(ModelStore { inputs: table.inputs.clone(), normalizer: table.normalizer.clone(), target_max, models, report })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub params: ControlParams,
    /// Predicted value per tunable parameter name.
    pub predicted: Vec<(String, f64)>,
    pub warnings: Vec<String>,
}

/// Overlays the predicted tunables on `base`. Models whose target is not a known history
/// column are ignored.
pub fn predict_params(store: &ModelStore, features: &InstanceFeatures, base: &ControlParams) -> Prediction {
    let mut params = base.clone();
    let mut predicted = Vec::new();
    let mut warnings = Vec::new();
    if store.models.is_empty() {
        return Prediction { params, predicted, warnings };
    }
    let raw = features.to_array();
    let x = match &store.normalizer {
        Some(n) => {
            for &c in &n.kept {
                let v = n.scale(c, raw[c]);
                if v < EXTRAPOLATION_RANGE.0 || v > EXTRAPOLATION_RANGE.1 {
                    warnings.push(format!(
                        "{} = {} lies outside the training range [{}, {}] (normalised {v:.2}); prediction extrapolates",
                        INPUT_COLUMNS[c], raw[c], n.min[c], n.max[c]
                    ));
                }
            }
            n.apply(&raw)
        }
        None => raw.to_vec(),
    };
    for (i, m) in store.models.iter().enumerate() {
        let Some(k) = TARGET_COLUMNS.iter().position(|c| *c == m.target) else { continue };
        let hi = store.target_max.get(i).copied().unwrap_or(f64::INFINITY).max(0.0) * CLAMP_FACTOR;
        let v = m.predict(&x).clamp(0.0, hi);
        let v = if v.is_finite() { v } else { 0.0 };
        params.set_tunable(TUNABLE_PARAMS[k], v);
        predicted.push((TUNABLE_PARAMS[k].to_string(), v));
    }
    Prediction { params, predicted, warnings }
}

/// A JSON object holding only the predicted tunables, usable as a parameter overlay.
pub fn overlay_json(prediction: &Prediction) -> serde_json::Value {
    serde_json::Value::Object(
        prediction.predicted.iter().map(|(k, v)| (k.clone(), serde_json::json!(v))).collect(),
    )
}
