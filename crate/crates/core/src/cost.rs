//! Penalty cost model: real route cost plus delay, overload, site-dependency and
//! load-distance penalties.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{schedule_route, ProblemInstance, Route, RouteSchedule, Solution, VehicleProfile};
use crate::params::ControlParams;

/// Which terms enter the total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CostMode {
    /// Every term.
    Full,
    /// Construction: real cost and load-distance only.
    Step1,
    /// Route elimination: real cost, site-dependency and load-distance.
    Step2,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostComponents {
    /// Real route cost.
    pub rrc: f64,
    /// Delay penalty.
    pub pd: f64,
    /// Volume overload penalty.
    pub pv: f64,
    /// Weight overload penalty.
    pub pw: f64,
    /// Wrong-vehicle penalty.
    pub pcv: f64,
    /// Load-distance running cost.
    pub ppw: f64,
    pub total: f64,
}

impl CostComponents {
    /// Sum of the constraint-violation terms (load-distance cost is not a violation).
    pub fn violation(&self) -> f64 {
        self.pd + self.pv + self.pw + self.pcv
    }

    pub fn add(&mut self, other: &CostComponents) {
        self.rrc += other.rrc;
        self.pd += other.pd;
        self.pv += other.pv;
        self.pw += other.pw;
        self.pcv += other.pcv;
        self.ppw += other.ppw;
        self.total += other.total;
    }
}

/// Aggregates of one route that fully determine its cost for a given vehicle.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RouteTotals {
    pub stops: usize,
    pub distance: f64,
    pub weight: f64,
    pub volume: f64,
    /// Stops the vehicle is not allowed to serve.
    pub inadmissible: usize,
    /// Σ cumulative distance to stop × stop weight.
    pub load_distance: f64,
    /// Σ minutes by which service ends after the window end.
    pub delay: f64,
    /// Arrival back at the depot.
    pub return_time: f64,
}

pub fn price(t: &RouteTotals, vehicle: &VehicleProfile, params: &ControlParams, mode: CostMode) -> CostComponents {
    if t.stops == 0 {
        return CostComponents::default();
    }
    let mut rrc = t.distance * vehicle.variable_cost + params.route_charge;
    if params.include_fixed_costs {
        rrc += vehicle.fixed_cost;
    }
    let ppw = if vehicle.max_weight.is_finite() {
        params.cost_increasing * vehicle.variable_cost * t.load_distance / vehicle.max_weight
    } else {
        0.0
    };
    let (mut pd, mut pv, mut pw, mut pcv) = (0.0, 0.0, 0.0, 0.0);
    if mode != CostMode::Step1 {
        pcv = t.inadmissible as f64 * params.penalty_customers_vehicles;
    }
    if mode == CostMode::Full {
        pd = params.penalty_delay * t.delay;
        pv = relative_excess(t.volume, vehicle.max_volume) * params.penalty_percentage_volume;
        pw = relative_excess(t.weight, vehicle.max_weight) * params.penalty_percentage_weight;
    }
    CostComponents { rrc, pd, pv, pw, pcv, ppw, total: rrc + pd + pv + pw + pcv + ppw }
}

#[inline]
fn relative_excess(load: f64, capacity: f64) -> f64 {
    if capacity.is_finite() {
        (load - capacity).max(0.0) / capacity
    } else {
        0.0
    }
}

pub fn totals_from_schedule(
    route: &Route,
    schedule: &RouteSchedule,
    instance: &ProblemInstance,
    vehicle: &VehicleProfile,
) -> Result<RouteTotals> {
    if schedule.stops.len() != route.len() || schedule.cumulative_distance.len() != route.len() {
        return Err(Error::Contract("route schedule does not match the route".into()));
    }
    let mut t = RouteTotals {
        stops: route.len(),
        distance: schedule.total_distance,
        weight: schedule.total_weight,
        volume: schedule.total_volume,
        return_time: schedule.return_time,
        ..Default::default()
    };
    for ((&c, stop), cum) in route.customers.iter().zip(&schedule.stops).zip(&schedule.cumulative_distance) {
        let cust = &instance.customers[c];
        t.load_distance += cum * cust.demand_weight;
        t.delay += (stop.service_end - cust.window_end).max(0.0);
        if !instance.admits(vehicle.fleet_index, c) {
            t.inadmissible += 1;
        }
    }
    Ok(t)
}

/// Cost of a scheduled route.
pub fn route_cost_components(
    route: &Route,
    schedule: &RouteSchedule,
    instance: &ProblemInstance,
    params: &ControlParams,
    mode: CostMode,
) -> Result<CostComponents> {
    let vehicle = instance.profile(route.vehicle, params);
    let totals = totals_from_schedule(route, schedule, instance, &vehicle)?;
    Ok(price(&totals, &vehicle, params, mode))
}

/// Schedules and prices a route in one go.
pub fn route_cost(route: &Route, instance: &ProblemInstance, params: &ControlParams, mode: CostMode) -> Result<CostComponents> {
    let schedule = schedule_route(route, instance)?;
    route_cost_components(route, &schedule, instance, params, mode)
}

/// Sum of all route costs, pre-planned split trips included.
pub fn solution_cost(solution: &Solution, instance: &ProblemInstance, params: &ControlParams, mode: CostMode) -> Result<f64> {
    Ok(solution_components(solution, instance, params, mode)?.total)
}

pub fn solution_components(
    solution: &Solution,
    instance: &ProblemInstance,
    params: &ControlParams,
    mode: CostMode,
) -> Result<CostComponents> {
    let mut sum = CostComponents::default();
    for r in solution.all_routes() {
        sum.add(&route_cost(r, instance, params, mode)?);
    }
    Ok(sum)
}
