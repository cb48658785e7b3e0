//! Training table: feasible history rows with min-max normalised inputs rounded to one
//! decimal and constant columns removed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::{TuningRecord, INPUT_COLUMNS, TARGET_COLUMNS};

/// Min-max bounds of the raw inputs, kept so new instances are scaled like the training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    /// Indices into `INPUT_COLUMNS` of the columns that survived.
    pub kept: Vec<usize>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

/// Half-away-from-zero rounding to one decimal.
pub fn round1(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}

impl Normalizer {
    /// Unrounded normalised value of raw input `col`.
    pub fn scale(&self, col: usize, v: f64) -> f64 {
        (v - self.min[col]) / (self.max[col] - self.min[col])
    }

    /// Normalised, rounded values of the kept columns.
    pub fn apply(&self, raw: &[f64; 9]) -> Vec<f64> {
        self.kept.iter().map(|&c| round1(self.scale(c, raw[c]))).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTable {
    pub inputs: Vec<String>,
    pub targets: Vec<String>,
    /// Row-major inputs.
    pub x: Vec<Vec<f64>>,
    /// Row-major targets.
    pub y: Vec<Vec<f64>>,
    /// Present when the table was built from history.
    pub normalizer: Option<Normalizer>,
}

impl TrainingTable {
    /// A table from already prepared columns.
    pub fn new(inputs: Vec<String>, targets: Vec<String>, x: Vec<Vec<f64>>, y: Vec<Vec<f64>>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Training(format!("{} input rows but {} target rows", x.len(), y.len())));
        }
        if let Some(i) = x.iter().position(|r| r.len() != inputs.len()) {
            return Err(Error::Training(format!("input row {i} has {} values, expected {}", x[i].len(), inputs.len())));
        }
        if let Some(i) = y.iter().position(|r| r.len() != targets.len()) {
            return Err(Error::Training(format!("target row {i} has {} values, expected {}", y[i].len(), targets.len())));
        }
        Ok(Self { inputs, targets, x, y, normalizer: None })
    }

    pub fn rows(&self) -> usize {
        self.x.len()
    }

    pub fn target(&self, t: usize) -> Vec<f64> {
        self.y.iter().map(|r| r[t]).collect()
    }

    pub fn target_index(&self, name: &str) -> Option<usize> {
        self.targets.iter().position(|t| t == name)
    }

    pub fn subset(&self, rows: &[usize]) -> Self {
        Self {
            inputs: self.inputs.clone(),
            targets: self.targets.clone(),
            x: rows.iter().map(|&i| self.x[i].clone()).collect(),
            y: rows.iter().map(|&i| self.y[i].clone()).collect(),
            normalizer: self.normalizer.clone(),
        }
    }
}

/// Keeps the rows whose run met every constraint, scales each input to [0, 1] by its
/// min and max over those rows, rounds to one decimal and drops constant inputs.
pub fn build_training_table(records: &[TuningRecord]) -> Result<TrainingTable> {
    let rows: Vec<&TuningRecord> = records.iter().filter(|r| r.feasible).collect();
    if rows.is_empty() {
        return Err(Error::Training("no history row met all constraints".into()));
    }
    let raw: Vec<[f64; 9]> = rows.iter().map(|r| r.features.to_array()).collect();
    let mut min = vec![f64::INFINITY; 9];
    let mut max = vec![f64::NEG_INFINITY; 9];
    for r in &raw {
        for c in 0..9 {
            min[c] = min[c].min(r[c]);
            max[c] = max[c].max(r[c]);
        }
    }
    let kept: Vec<usize> = (0..9).filter(|&c| max[c] > min[c]).collect();
    let norm = Normalizer { kept, min, max };
    let mut table = TrainingTable::new(
        norm.kept.iter().map(|&c| INPUT_COLUMNS[c].to_string()).collect(),
        TARGET_COLUMNS.iter().map(|s| s.to_string()).collect(),
        raw.iter().map(|r| norm.apply(r)).collect(),
        rows.iter().map(|r| r.targets.to_vec()).collect(),
    )?;
    table.normalizer = Some(norm);
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hfvrp::features::InstanceFeatures;

    fn rec(customers: f64, weight: f64, feasible: bool) -> TuningRecord {
        TuningRecord {
            features: InstanceFeatures {
                customer_count: customers,
                available_vehicle_count: 8.0,
                vehicle_type_count: 7.0,
                city_count: 3.0,
                sdvrp_constraint_total: 0.0,
                article_total: 10.0,
                volume_total: 1.0,
                weight_total: weight,
                time_window_sum: 100.0,
            },
            feasible,
            targets: [50.0, 0.1, 0.5, 400.0, 0.2, 400.0, 400.0],
        }
    }

    #[test]
    fn infeasible_rows_and_constant_columns_dropped() {
        let t = build_training_table(&[rec(10.0, 1.0, true), rec(20.0, 3.0, false), rec(30.0, 2.0, true)]).unwrap();
        assert_eq!(t.rows(), 2);
        assert_eq!(t.inputs, vec!["NUMBER_OF_CUSTOMERS_TOTAL", "WEIGHT_TOTAL"]);
        assert_eq!(t.x, vec![vec![0.0, 0.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn normalised_values_round_to_one_decimal() {
        // (13.456 - 10) / 10 = 0.3456
        let t = build_training_table(&[rec(10.0, 1.0, true), rec(13.456, 1.0, true), rec(20.0, 1.0, true)]).unwrap();
        assert_eq!(t.x[1], vec![0.3]);
        assert_eq!(round1(0.3456), 0.3);
        assert_eq!(round1(0.35), 0.4);
    }

    #[test]
    fn no_feasible_rows_is_an_error() {
        assert!(matches!(build_training_table(&[rec(1.0, 1.0, false)]), Err(Error::Training(_))));
        assert!(build_training_table(&[]).is_err());
    }
}
