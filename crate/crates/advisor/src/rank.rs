//! Attribute importance: the share of target variance a single-input linear fit explains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::TrainingTable;

pub const RANK_MIN_ROWS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeImportance {
    pub attribute: String,
    /// R² in [0, 1].
    pub importance: f64,
}

/// R² of `y ~ a + b·x`; zero when either side is constant.
pub fn r_squared(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return 0.0;
    }
    (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
}

/// Inputs ordered by importance for `target`, most important first; ties keep column order.
pub fn rank_attributes(table: &TrainingTable, target: usize) -> Result<Vec<AttributeImportance>> {
    if table.rows() < RANK_MIN_ROWS {
        return Err(Error::Precondition(format!("ranking needs at least {RANK_MIN_ROWS} rows, got {}", table.rows())));
    }
    let y = table.target(target);
    let mut out: Vec<AttributeImportance> = table
        .inputs
        .iter()
        .enumerate()
        .map(|(c, name)| {
            let x: Vec<f64> = table.x.iter().map(|r| r[c]).collect();
            AttributeImportance { attribute: name.clone(), importance: r_squared(&x, &y) }
        })
        .collect();
    out.sort_by(|a, b| b.importance.total_cmp(&a.importance));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn table(x: Vec<Vec<f64>>, y: Vec<f64>, names: &[&str]) -> TrainingTable {
        TrainingTable::new(
            names.iter().map(|s| s.to_string()).collect(),
            vec!["t".into()],
            x,
            y.into_iter().map(|v| vec![v]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn copied_input_ranks_first() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let x: Vec<Vec<f64>> = (0..40).map(|_| (0..3).map(|_| rng.gen::<f64>()).collect()).collect();
        let y = x.iter().map(|r| r[1]).collect();
        let r = rank_attributes(&table(x, y, &["a", "b", "c"]), 0).unwrap();
        assert_eq!(r[0].attribute, "b");
        assert!((r[0].importance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noise_target_scores_low() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let x: Vec<Vec<f64>> = (0..200).map(|_| (0..4).map(|_| rng.gen::<f64>()).collect()).collect();
        let y = (0..200).map(|_| rng.gen::<f64>()).collect();
        let r = rank_attributes(&table(x, y, &["a", "b", "c", "d"]), 0).unwrap();
        assert!(r.iter().all(|a| a.importance < 0.2), "{r:?}");
    }

    #[test]
    fn single_column() {
        let x = (0..10).map(|i| vec![i as f64]).collect();
        let y = (0..10).map(|i| (i * i) as f64).collect();
        let r = rank_attributes(&table(x, y, &["only"]), 0).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].attribute, "only");
    }

    #[test]
    fn too_few_rows() {
        let t = table(vec![vec![1.0]; 9], vec![1.0; 9], &["a"]);
        assert!(rank_attributes(&t, 0).is_err());
    }
}
