//! Synthetic run histories for demonstrations and tests. Every attribute takes one of eleven
//! evenly spaced values, so its normalised form is exactly a multiple of 0.1 and survives
//! the one-decimal rounding.

use hfvrp::features::InstanceFeatures;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::history::TuningRecord;

/// Raw lower bound and step per attribute, in `INPUT_COLUMNS` order.
const LEVELS: [(f64, f64); 9] = [
    (40.0, 8.0),
    (3.0, 1.0),
    (1.0, 1.0),
    (2.0, 3.0),
    (0.0, 15.0),
    (200.0, 120.0),
    (5.0, 4.0),
    (1500.0, 900.0),
    (6000.0, 3000.0),
];

/// A linear rule for each tunable, over normalised attributes in [0, 1].
pub fn linear_targets(x: &[f64; 9]) -> [f64; 7] {
    [
        20.0 + 40.0 * x[2] + 15.0 * x[1] - 5.0 * x[4],
        0.05 + 0.1 * x[6] + 0.05 * x[2],
        0.3 + 0.8 * x[8] + 0.4 * x[0],
        250.0 + 200.0 * x[4] + 100.0 * x[1],
        0.1 + 0.2 * x[7] - 0.05 * x[3],
        300.0 + 150.0 * x[6] + 50.0 * x[5],
        300.0 + 150.0 * x[7] + 60.0 * x[0],
    ]
}

/// `linear_targets` with the penalty-delay rule replaced by a full sine period over the
/// time-window attribute.
pub fn nonlinear_targets(x: &[f64; 9]) -> [f64; 7] {
    let mut t = linear_targets(x);
    t[2] = 1.0 + 0.8 * (2.0 * std::f64::consts::PI * x[8]).sin();
    t
}

/// `rows` feasible records with attributes on the level grid and targets from `rule` plus
/// uniform noise of relative size `noise`, followed by `rows / 10` infeasible
/// records whose targets are garbage. The first two rows pin every attribute to its lowest
/// and highest level.
pub fn grid_history(rows: usize, seed: u64, noise: f64, rule: impl Fn(&[f64; 9]) -> [f64; 7]) -> Vec<TuningRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(rows + rows / 10);
    for i in 0..rows + rows / 10 {
        let levels: [usize; 9] = std::array::from_fn(|_| match i {
            0 => 0,
            1 => 10,
            _ => rng.gen_range(0..=10),
        });
        let x = levels.map(|k| k as f64 / 10.0);
        let raw: [f64; 9] = std::array::from_fn(|c| LEVELS[c].0 + levels[c] as f64 * LEVELS[c].1);
        let feasible = i < rows;
        let targets = if feasible {
            rule(&x).map(|t| t * (1.0 + noise * rng.gen_range(-1.0..=1.0)))
        } else {
            std::array::from_fn(|_| rng.gen_range(0.0..1000.0))
        };
        out.push(TuningRecord { features: features_from_array(raw), feasible, targets });
    }
    out
}

pub fn features_from_array(a: [f64; 9]) -> InstanceFeatures {
    InstanceFeatures {
        customer_count: a[0],
        available_vehicle_count: a[1],
        vehicle_type_count: a[2],
        city_count: a[3],
        sdvrp_constraint_total: a[4],
        article_total: a[5],
        volume_total: a[6],
        weight_total: a[7],
        time_window_sum: a[8],
    }
}
