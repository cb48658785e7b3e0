//! The two regressors fitted per target: ridge-damped least squares and Gaussian kernel
//! ridge regression, plus the predictive-confidence score that decides between them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::solve_spd;
use crate::table::TrainingTable;

pub const LINEAR_RIDGE: f64 = 1e-6;
pub const KERNEL_RIDGE: f64 = 1e-3;
pub const KERNEL_MIN_ROWS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ModelKind {
    Linear,
    Kernel,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Linear => "LINEAR",
            ModelKind::Kernel => "KERNEL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ModelBody {
    Linear {
        intercept: f64,
        coefficients: Vec<f64>,
    },
    /// Prediction is `offset + Σ weights[i]·exp(-|x - support[i]|² / (2·bandwidth²))`.
    Kernel {
        support: Vec<Vec<f64>>,
        weights: Vec<f64>,
        bandwidth: f64,
        offset: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub target: String,
    pub body: ModelBody,
    /// Mean target over the training rows; the baseline predictor for confidence.
    pub train_mean: f64,
    /// Percent in [0, 100]; zero until the model is scored on held-out rows.
    pub predictive_confidence: f64,
    pub holdout_rmse: f64,
}

impl FittedModel {
    pub fn kind(&self) -> ModelKind {
        match self.body {
            ModelBody::Linear { .. } => ModelKind::Linear,
            ModelBody::Kernel { .. } => ModelKind::Kernel,
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        match &self.body {
            ModelBody::Linear { intercept, coefficients } => {
                intercept + coefficients.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
            }
            ModelBody::Kernel { support, weights, bandwidth, offset } => {
                offset
                    + support
                        .iter()
                        .zip(weights)
                        .map(|(s, w)| w * gaussian(sq_dist(s, x), *bandwidth))
                        .sum::<f64>()
            }
        }
    }

    /// Scores the model on held-out rows and stores the result.
    pub fn evaluate(&mut self, holdout: &TrainingTable, target: usize) -> Result<f64> {
        let c = predictive_confidence(self, holdout, target)?;
        self.holdout_rmse = rmse(self, holdout, target);
        self.predictive_confidence = c;
        Ok(c)
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn gaussian(d2: f64, h: f64) -> f64 {
    (-d2 / (2.0 * h * h)).exp()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn rmse(model: &FittedModel, table: &TrainingTable, target: usize) -> f64 {
    let se: f64 = table.x.iter().zip(&table.y).map(|(x, y)| (model.predict(x) - y[target]).powi(2)).sum();
    (se / table.rows() as f64).sqrt()
}

/// `max(0, 1 - model / baseline) · 100`. A zero baseline scores 100 only for a perfect model.
pub fn confidence_from_rmse(model_rmse: f64, baseline_rmse: f64) -> f64 {
    if baseline_rmse <= 0.0 {
        return if model_rmse <= 1e-12 { 100.0 } else { 0.0 };
    }
    ((1.0 - model_rmse / baseline_rmse).max(0.0) * 100.0).min(100.0)
}

/// Confidence against a baseline that always predicts the training mean.
pub fn predictive_confidence(model: &FittedModel, holdout: &TrainingTable, target: usize) -> Result<f64> {
    if holdout.rows() == 0 {
        return Err(Error::Precondition("holdout set is empty".into()));
    }
    let base = (holdout.y.iter().map(|y| (y[target] - model.train_mean).powi(2)).sum::<f64>() / holdout.rows() as f64).sqrt();
    Ok(confidence_from_rmse(rmse(model, holdout, target), base))
}

fn model(table: &TrainingTable, target: usize, body: ModelBody, train_mean: f64) -> FittedModel {
    FittedModel { target: table.targets[target].clone(), body, train_mean, predictive_confidence: 0.0, holdout_rmse: 0.0 }
}

/// Least squares with an intercept, damped by `LINEAR_RIDGE` on the normal equations.
pub fn fit_linear(table: &TrainingTable, target: usize) -> Result<FittedModel> {
    let n = table.rows();
    let k = table.inputs.len();
    if n < k + 1 {
        return Err(Error::Precondition(format!("linear fit of {} needs at least {} rows, got {n}", table.targets[target], k + 1)));
    }
    let y = table.target(target);
    let ym = mean(&y);
    if y.iter().all(|&v| v == y[0]) {
        return Ok(model(table, target, ModelBody::Linear { intercept: ym, coefficients: vec![0.0; k] }, ym));
    }
    let d = k + 1;
    let mut a = vec![0.0; d * d];
    let mut b = vec![0.0; d];
    for (x, yi) in table.x.iter().zip(&y) {
        let row: Vec<f64> = std::iter::once(1.0).chain(x.iter().copied()).collect();
        for i in 0..d {
            b[i] += row[i] * yi;
            for j in 0..d {
                a[i * d + j] += row[i] * row[j];
            }
        }
    }
    for i in 0..d {
        a[i * d + i] += LINEAR_RIDGE;
    }
    let beta = solve_spd(&a, &b).ok_or_else(|| Error::Fit(format!("{}: singular design", table.targets[target])))?;
    if beta.iter().any(|v| !v.is_finite()) {
        return Err(Error::Fit(format!("{}: non-finite coefficients", table.targets[target])));
    }
    Ok(model(table, target, ModelBody::Linear { intercept: beta[0], coefficients: beta[1..].to_vec() }, ym))
}

/// Median of the non-zero pairwise input distances.
pub fn median_bandwidth(x: &[Vec<f64>]) -> Option<f64> {
    let mut d: Vec<f64> = Vec::new();
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let v = sq_dist(&x[i], &x[j]).sqrt();
            if v > 0.0 {
                d.push(v);
            }
        }
    }
    if d.is_empty() {
        return None;
    }
    d.sort_by(f64::total_cmp);
    let m = d.len() / 2;
    Some(if d.len() % 2 == 1 { d[m] } else { 0.5 * (d[m - 1] + d[m]) })
}

/// Kernel ridge regression on the centred target with a Gaussian kernel whose bandwidth is
/// the median pairwise input distance.
pub fn fit_kernel(table: &TrainingTable, target: usize) -> Result<FittedModel> {
    let n = table.rows();
    let name = &table.targets[target];
    if n < KERNEL_MIN_ROWS {
        return Err(Error::Precondition(format!("kernel fit of {name} needs at least {KERNEL_MIN_ROWS} rows, got {n}")));
    }
    let h = median_bandwidth(&table.x).ok_or_else(|| Error::Fit(format!("{name}: all input rows are identical")))?;
    let y = table.target(target);
    let ym = mean(&y);
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = gaussian(sq_dist(&table.x[i], &table.x[j]), h);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
        k[i * n + i] += KERNEL_RIDGE;
    }
    let centred: Vec<f64> = y.iter().map(|v| v - ym).collect();
    let weights = solve_spd(&k, &centred).ok_or_else(|| Error::Fit(format!("{name}: kernel system not positive definite")))?;
    let body = ModelBody::Kernel { support: table.x.clone(), weights, bandwidth: h, offset: ym };
    Ok(model(table, target, body, ym))
}
