//! The nine instance attributes the parameter advisor learns from.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::ProblemInstance;

/// Grid resolution used to count cities when customers carry no city name.
pub const CITY_GRID: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceFeatures {
    pub customer_count: f64,
    pub available_vehicle_count: f64,
    pub vehicle_type_count: f64,
    pub city_count: f64,
    /// Σ over customers of the vehicles that may not serve them.
    pub sdvrp_constraint_total: f64,
    pub article_total: f64,
    pub volume_total: f64,
    pub weight_total: f64,
    /// Σ of finite window widths.
    pub time_window_sum: f64,
}

impl InstanceFeatures {
    pub fn to_array(&self) -> [f64; 9] {
        [
            self.customer_count,
            self.available_vehicle_count,
            self.vehicle_type_count,
            self.city_count,
            self.sdvrp_constraint_total,
            self.article_total,
            self.volume_total,
            self.weight_total,
            self.time_window_sum,
        ]
    }
}

/// Distinct cities: named cities when every customer has one, otherwise occupied cells of a
/// `CITY_GRID`×`CITY_GRID` grid over the customers' bounding box.
pub fn city_count(inst: &ProblemInstance) -> usize {
    let cs = &inst.customers;
    if cs.is_empty() {
        return 0;
    }
    if cs.iter().all(|c| c.city.is_some()) {
        return cs.iter().filter_map(|c| c.city.as_deref()).collect::<BTreeSet<_>>().len();
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for c in cs {
        x0 = x0.min(c.x);
        x1 = x1.max(c.x);
        y0 = y0.min(c.y);
        y1 = y1.max(c.y);
    }
    let cell = |v: f64, lo: f64, hi: f64| -> usize {
        if hi <= lo {
            0
        } else {
            (((v - lo) / (hi - lo) * CITY_GRID as f64) as usize).min(CITY_GRID - 1)
        }
    };
    cs.iter().map(|c| (cell(c.x, x0, x1), cell(c.y, y0, y1))).collect::<BTreeSet<_>>().len()
}

pub fn instance_features(inst: &ProblemInstance) -> InstanceFeatures {
    let mut types: Vec<&crate::model::Vehicle> = Vec::new();
    for v in &inst.fleet {
        if !types.iter().any(|t| t.same_profile(v)) {
            types.push(v);
        }
    }
    let nf = inst.fleet.len();
    InstanceFeatures {
        customer_count: inst.customers.len() as f64,
        available_vehicle_count: nf as f64,
        vehicle_type_count: types.len() as f64,
        city_count: city_count(inst) as f64,
        sdvrp_constraint_total: inst.customers.iter().map(|c| (nf - c.admissible_vehicles.len()) as f64).sum(),
        article_total: inst.customers.iter().map(|c| c.articles).sum(),
        volume_total: inst.customers.iter().map(|c| c.demand_volume).sum(),
        weight_total: inst.customers.iter().map(|c| c.demand_weight).sum(),
        time_window_sum: inst
            .customers
            .iter()
            .map(|c| c.window_end - c.window_start)
            .filter(|w| w.is_finite())
            .sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_time_matrix, Customer, Depot, Vehicle};

    fn vehicle(id: &str, cap: f64) -> Vehicle {
        Vehicle {
            id: id.into(),
            max_weight: cap,
            max_volume: 10.0,
            variable_cost: 1.0,
            fixed_cost: 0.0,
            shift_start: 0.0,
            shift_end: 600.0,
        }
    }

    #[test]
    fn counts_and_totals() {
        let mut a = Customer::new("a", 0.0, 0.0);
        a.admissible_vehicles = [0].into();
        a.demand_weight = 10.0;
        a.demand_volume = 1.5;
        a.articles = 3.0;
        a.window_start = 10.0;
        a.window_end = 40.0;
        let mut b = Customer::new("b", 100.0, 100.0);
        b.admissible_vehicles = [0, 1, 2].into();
        b.demand_weight = 5.0;
        let cs = vec![a, b];
        let depot = Depot { x: 0.0, y: 0.0, open: 0.0, close: 1e3 };
        let m = build_time_matrix(&cs, &depot);
        let inst = ProblemInstance::new("f", depot, cs, vec![vehicle("x", 100.0), vehicle("y", 100.0), vehicle("z", 50.0)], m)
            .unwrap();
        let f = instance_features(&inst);
        assert_eq!(f.customer_count, 2.0);
        assert_eq!(f.available_vehicle_count, 3.0);
        assert_eq!(f.vehicle_type_count, 2.0);
        assert_eq!(f.city_count, 2.0);
        assert_eq!(f.sdvrp_constraint_total, 2.0);
        assert_eq!(f.article_total, 3.0);
        assert_eq!(f.volume_total, 1.5);
        assert_eq!(f.weight_total, 15.0);
        assert_eq!(f.time_window_sum, 30.0);
    }

    #[test]
    fn named_cities_win_over_grid() {
        let mut cs: Vec<Customer> = (0..4).map(|i| Customer::new(format!("c{i}"), i as f64 * 50.0, 0.0)).collect();
        for (i, c) in cs.iter_mut().enumerate() {
            c.city = Some(if i < 3 { "Zagreb".into() } else { "Split".into() });
        }
        let depot = Depot { x: 0.0, y: 0.0, open: 0.0, close: 1e3 };
        let m = build_time_matrix(&cs, &depot);
        let inst = ProblemInstance::new("f", depot, cs, vec![], m).unwrap();
        assert_eq!(city_count(&inst), 2);
    }
}
