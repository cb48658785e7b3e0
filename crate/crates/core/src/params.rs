//! Solver control parameters and their customary default values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which tabu pairs may be overridden.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Aspiration {
    /// Tabu moves are never evaluated.
    None,
    /// A tabu move is admitted when the resulting solution beats the best
    /// solution cost ever recorded with the forbidden (customer, route) pair.
    #[default]
    PairBest,
}

/// How the service time of a split-delivery residual is derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ResidualService {
    /// `s * frac(r) / r`: the residual share of the order carries the same share of unloading.
    #[default]
    Proportional,
    /// `frac(s / r)`: literal fractional part of the per-trip service time.
    FractionalPart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlParams {
    /// Route weight ceiling during construction. `None` means the largest fleet capacity.
    pub biggest_capacity_weight: Option<f64>,
    /// Route volume ceiling during construction. `None` means the largest fleet capacity.
    pub biggest_capacity_volume: Option<f64>,
    /// Per-km cost of the fictitious vehicle.
    pub additional_vehicle_cost: f64,
    /// Tabu search iterations.
    pub number_of_iterations: usize,
    pub tolerance_weight: f64,
    pub tolerance_volume: f64,
    pub tabu_tenure: usize,
    /// Currency per minute of delay past a window end.
    pub penalty_delay: f64,
    /// Diversification weight.
    pub lambda: f64,
    pub penalty_customers_vehicles: f64,
    pub cost_increasing: f64,
    pub penalty_percentage_volume: f64,
    pub penalty_percentage_weight: f64,
    pub elimination_iterations: usize,
    /// Every this many tabu iterations the vehicle assignment is solved exactly.
    pub reassign_period: usize,
    /// Exact assignment is used only for fleets smaller than this.
    pub brute_force_fleet_limit: usize,
    pub savings_similarity_factor: f64,
    /// Add each vehicle's fixed daily cost to its route.
    pub include_fixed_costs: bool,
    /// Flat charge per non-empty route; a large value makes the search minimise route count first.
    pub route_charge: f64,
    pub aspiration: Aspiration,
    pub residual_service: ResidualService,
}

impl Default for ControlParams {
    fn default() -> Self {
        Self {
            biggest_capacity_weight: None,
            biggest_capacity_volume: None,
            additional_vehicle_cost: 2.0,
            number_of_iterations: 25_000,
            tolerance_weight: 50.0,
            tolerance_volume: 0.1,
            tabu_tenure: 30,
            penalty_delay: 0.5,
            lambda: 0.001,
            penalty_customers_vehicles: 400.0,
            cost_increasing: 0.2,
            penalty_percentage_volume: 400.0,
            penalty_percentage_weight: 400.0,
            elimination_iterations: 100,
            reassign_period: 1000,
            brute_force_fleet_limit: 10,
            savings_similarity_factor: 3.0,
            include_fixed_costs: false,
            route_charge: 0.0,
            aspiration: Aspiration::PairBest,
            residual_service: ResidualService::Proportional,
        }
    }
}

pub const BENCHMARK_PENALTY_DELAY: f64 = 20.0;

/// Names of the seven parameters learned from run history, in their canonical order.
pub const TUNABLE_PARAMS: [&str; 7] = [
    "tolerance_weight",
    "tolerance_volume",
    "penalty_delay",
    "penalty_customers_vehicles",
    "cost_increasing",
    "penalty_percentage_volume",
    "penalty_percentage_weight",
];

impl ControlParams {
    /// Distance-only objective used for the classic benchmark sets, where load-dependent
    /// running cost is not modelled. Windows there are hard and one time unit is worth one
    /// distance unit, so half a unit per late minute lets the search settle on late routes.
    pub fn benchmark() -> Self {
        Self { cost_increasing: 0.0, penalty_delay: BENCHMARK_PENALTY_DELAY, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let reals = [
            ("additional_vehicle_cost", self.additional_vehicle_cost),
            ("tolerance_weight", self.tolerance_weight),
            ("tolerance_volume", self.tolerance_volume),
            ("penalty_delay", self.penalty_delay),
            ("lambda", self.lambda),
            ("penalty_customers_vehicles", self.penalty_customers_vehicles),
            ("cost_increasing", self.cost_increasing),
            ("penalty_percentage_volume", self.penalty_percentage_volume),
            ("penalty_percentage_weight", self.penalty_percentage_weight),
            ("savings_similarity_factor", self.savings_similarity_factor),
            ("route_charge", self.route_charge),
            ("biggest_capacity_weight", self.biggest_capacity_weight.unwrap_or(0.0)),
            ("biggest_capacity_volume", self.biggest_capacity_volume.unwrap_or(0.0)),
        ];
        for (name, value) in reals {
            if !(value >= 0.0) || (value.is_infinite() && !name.starts_with("biggest")) {
                return Err(Error::InvalidParam {
                    name: name.into(),
                    message: format!("must be a finite non-negative number, got {value}"),
                });
            }
        }
        if self.number_of_iterations < 1 {
            return Err(Error::InvalidParam {
                name: "number_of_iterations".into(),
                message: "must be at least 1".into(),
            });
        }
        Ok(())
    }

    /// Overwrites the fields present in `overlay` (a JSON object with a subset of the
    /// parameter names). Unknown names are rejected.
    pub fn apply_overlay(&mut self, overlay: &serde_json::Value) -> Result<()> {
        let serde_json::Value::Object(fields) = overlay else {
            return Err(Error::Schema { path: "$".into(), message: "parameter overlay must be an object".into() });
        };
        let mut merged = serde_json::to_value(&*self)?;
        let target = merged.as_object_mut().expect("params serialize to an object");
        for (key, value) in fields {
            if !target.contains_key(key) {
                return Err(Error::Schema { path: format!("$.{key}"), message: "unknown parameter".into() });
            }
            target.insert(key.clone(), value.clone());
        }
        *self = serde_path_to_error::deserialize(merged)
            .map_err(|e| Error::Schema { path: format!("$.{}", e.path()), message: e.inner().to_string() })?;
        self.validate()
    }

    pub fn get_tunable(&self, name: &str) -> Option<f64> {
        Some(match name {
            "tolerance_weight" => self.tolerance_weight,
            "tolerance_volume" => self.tolerance_volume,
            "penalty_delay" => self.penalty_delay,
            "penalty_customers_vehicles" => self.penalty_customers_vehicles,
            "cost_increasing" => self.cost_increasing,
            "penalty_percentage_volume" => self.penalty_percentage_volume,
            "penalty_percentage_weight" => self.penalty_percentage_weight,
            _ => return None,
        })
    }

    pub fn set_tunable(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "tolerance_weight" => &mut self.tolerance_weight,
            "tolerance_volume" => &mut self.tolerance_volume,
            "penalty_delay" => &mut self.penalty_delay,
            "penalty_customers_vehicles" => &mut self.penalty_customers_vehicles,
            "cost_increasing" => &mut self.cost_increasing,
            "penalty_percentage_volume" => &mut self.penalty_percentage_volume,
            "penalty_percentage_weight" => &mut self.penalty_percentage_weight,
            _ => return false,
        };
        *slot = value;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_customary_values() {
        let p = ControlParams::default();
        assert_eq!(p.number_of_iterations, 25_000);
        assert_eq!(p.tolerance_weight, 50.0);
        assert_eq!(p.tolerance_volume, 0.1);
        assert_eq!(p.tabu_tenure, 30);
        assert_eq!(p.penalty_delay, 0.5);
        assert_eq!(p.lambda, 0.001);
        assert_eq!(p.penalty_customers_vehicles, 400.0);
        assert_eq!(p.cost_increasing, 0.2);
        assert_eq!(p.penalty_percentage_volume, 400.0);
        assert_eq!(p.penalty_percentage_weight, 400.0);
        assert_eq!(p.additional_vehicle_cost, 2.0);
        assert_eq!(p.reassign_period, 1000);
        assert_eq!(p.brute_force_fleet_limit, 10);
        assert_eq!(p.savings_similarity_factor, 3.0);
        p.validate().unwrap();
    }

    #[test]
    fn overlay_replaces_only_named_fields() {
        let mut p = ControlParams::default();
        p.apply_overlay(&serde_json::json!({"penalty_delay": 1.5, "tabu_tenure": 12})).unwrap();
        assert_eq!(p.penalty_delay, 1.5);
        assert_eq!(p.tabu_tenure, 12);
        assert_eq!(p.lambda, 0.001);
    }

    #[test]
    fn overlay_rejects_unknown_and_negative() {
        let mut p = ControlParams::default();
        assert!(p.apply_overlay(&serde_json::json!({"nope": 1})).is_err());
        assert!(p.apply_overlay(&serde_json::json!({"lambda": -1.0})).is_err());
    }

    #[test]
    fn zero_iterations_rejected() {
        let p = ControlParams { number_of_iterations: 0, ..Default::default() };
        assert!(p.validate().is_err());
    }
}
