//! Domain model: customers, fleet, depot, travel matrices, routes and solutions,
//! plus earliest-start scheduling and feasibility validation.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ControlParams;

/// Reserved id of the artificial vehicle that absorbs routes the real fleet cannot cover.
pub const FICTITIOUS_ID: &str = "FICTITIOUS";

/// Matrix node of the depot. Customer `i` lives at node `i + 1`.
pub const DEPOT: usize = 0;

#[inline]
pub fn node(customer: usize) -> usize {
    customer + 1
}

#[derive(Debug, Clone, PartialEq)]
pub struct Customer {
    pub id: String,
    pub x: f64,
    pub y: f64,
    /// kg
    pub demand_weight: f64,
    /// m³
    pub demand_volume: f64,
    /// Earliest service start, minutes.
    pub window_start: f64,
    /// Latest service completion, minutes.
    pub window_end: f64,
    /// Unloading duration, minutes.
    pub service_time: f64,
    /// Indices into the fleet of the vehicles allowed to serve this customer.
    pub admissible_vehicles: BTreeSet<usize>,
    /// Number of ordered articles (items).
    pub articles: f64,
    pub city: Option<String>,
}

impl Customer {
    pub fn new(id: impl Into<String>, x: f64, y: f64) -> Self {
        Self {
            id: id.into(),
            x,
            y,
            demand_weight: 0.0,
            demand_volume: 0.0,
            window_start: 0.0,
            window_end: f64::INFINITY,
            service_time: 0.0,
            admissible_vehicles: BTreeSet::new(),
            articles: 0.0,
            city: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vehicle {
    pub id: String,
    /// kg
    pub max_weight: f64,
    /// m³
    pub max_volume: f64,
    /// currency per km
    pub variable_cost: f64,
    /// currency per day
    pub fixed_cost: f64,
    pub shift_start: f64,
    pub shift_end: f64,
}

impl Vehicle {
    /// Two vehicles with the same profile are interchangeable for costing and scheduling.
    pub fn same_profile(&self, other: &Vehicle) -> bool {
        self.max_weight == other.max_weight
            && self.max_volume == other.max_volume
            && self.variable_cost == other.variable_cost
            && self.fixed_cost == other.fixed_cost
            && self.shift_start == other.shift_start
            && self.shift_end == other.shift_end
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Depot {
    pub x: f64,
    pub y: f64,
    pub open: f64,
    pub close: f64,
}

/// Square travel-time and distance tables over `n + 1` nodes, node 0 being the depot.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeMatrix {
    nodes: usize,
    time: Vec<f64>,
    distance: Vec<f64>,
}

impl TimeMatrix {
    pub fn from_tables(nodes: usize, time: Vec<f64>, distance: Vec<f64>) -> Result<Self> {
        if time.len() != nodes * nodes || distance.len() != nodes * nodes {
            return Err(Error::InstanceConsistency(format!(
                "matrix tables must have {} entries",
                nodes * nodes
            )));
        }
        if let Some(bad) = time.iter().chain(&distance).find(|v| !(**v >= 0.0) || v.is_infinite()) {
            return Err(Error::InstanceConsistency(format!("matrix entry {bad} is not a finite non-negative value")));
        }
        Ok(Self { nodes, time, distance })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    #[inline]
    pub fn time(&self, from: usize, to: usize) -> f64 {
        self.time[from * self.nodes + to]
    }

    #[inline]
    pub fn distance(&self, from: usize, to: usize) -> f64 {
        self.distance[from * self.nodes + to]
    }

    pub fn set_time(&mut self, from: usize, to: usize, value: f64) {
        self.time[from * self.nodes + to] = value;
    }

    /// Travel time depot → customer `i`.
    pub fn depot_to(&self, i: usize) -> f64 {
        self.time(DEPOT, node(i))
    }

    /// Travel time customer `i` → depot.
    pub fn to_depot(&self, i: usize) -> f64 {
        self.time(node(i), DEPOT)
    }

    /// Travel time customer `i` → customer `j`.
    pub fn between(&self, i: usize, j: usize) -> f64 {
        self.time(node(i), node(j))
    }

    pub fn time_table(&self) -> &[f64] {
        &self.time
    }

    pub fn distance_table(&self) -> &[f64] {
        &self.distance
    }
}

/// Euclidean distances in full double precision; travel times equal distances.
pub fn build_time_matrix(customers: &[Customer], depot: &Depot) -> TimeMatrix {
    let coords: Vec<(f64, f64)> =
        std::iter::once((depot.x, depot.y)).chain(customers.iter().map(|c| (c.x, c.y))).collect();
    let n = coords.len();
    let mut distance = vec![0.0; n * n];
    for (i, a) in coords.iter().enumerate() {
        for (j, b) in coords.iter().enumerate() {
            if i != j {
                distance[i * n + j] = (a.0 - b.0).hypot(a.1 - b.1);
            }
        }
    }
    TimeMatrix { nodes: n, time: distance.clone(), distance }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub name: String,
    pub depot: Depot,
    pub customers: Vec<Customer>,
    pub fleet: Vec<Vehicle>,
    pub matrix: TimeMatrix,
}

/// Vehicle slot of a route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VehicleRef {
    Fleet(usize),
    Fictitious,
}

/// Everything the cost model and scheduler need to know about whoever drives a route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleProfile {
    pub fleet_index: Option<usize>,
    pub variable_cost: f64,
    pub fixed_cost: f64,
    pub max_weight: f64,
    pub max_volume: f64,
    pub departure: f64,
}

impl ProblemInstance {
    pub fn new(
        name: impl Into<String>,
        depot: Depot,
        customers: Vec<Customer>,
        fleet: Vec<Vehicle>,
        matrix: TimeMatrix,
    ) -> Result<Self> {
        let instance = Self { name: name.into(), depot, customers, fleet, matrix };
        instance.check()?;
        Ok(instance)
    }

    /// Checks every field invariant of the model.
    pub fn check(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InstanceConsistency(msg));
        if !(self.depot.open <= self.depot.close) {
            return fail("depot opens after it closes".into());
        }
        if self.matrix.nodes() != self.customers.len() + 1 {
            return fail(format!(
                "matrix has {} nodes, expected {}",
                self.matrix.nodes(),
                self.customers.len() + 1
            ));
        }
        let mut ids = BTreeSet::new();
        for c in &self.customers {
            if !ids.insert(c.id.as_str()) {
                return fail(format!("duplicate customer id {}", c.id));
            }
            if !(c.window_start <= c.window_end) {
                return fail(format!("customer {} has window start after window end", c.id));
            }
            if !(c.service_time >= 0.0 && c.demand_weight >= 0.0 && c.demand_volume >= 0.0) {
                return fail(format!("customer {} has a negative service time or demand", c.id));
            }
            if let Some(v) = c.admissible_vehicles.iter().find(|v| **v >= self.fleet.len()) {
                return fail(format!("customer {} admits unknown vehicle index {v}", c.id));
            }
        }
        let mut vids = BTreeSet::new();
        for v in &self.fleet {
            if v.id == FICTITIOUS_ID || !vids.insert(v.id.as_str()) {
                return fail(format!("vehicle id {} is reserved or duplicated", v.id));
            }
            if !(v.max_weight > 0.0 && v.max_volume > 0.0 && v.variable_cost > 0.0) {
                return fail(format!("vehicle {} needs positive capacities and variable cost", v.id));
            }
            if !(v.shift_start <= v.shift_end) || !(v.fixed_cost >= 0.0) {
                return fail(format!("vehicle {} has an invalid shift or fixed cost", v.id));
            }
        }
        Ok(())
    }

    pub fn customer_index(&self) -> HashMap<&str, usize> {
        self.customers.iter().enumerate().map(|(i, c)| (c.id.as_str(), i)).collect()
    }

    pub fn vehicle_index(&self, id: &str) -> Option<VehicleRef> {
        if id == FICTITIOUS_ID {
            return Some(VehicleRef::Fictitious);
        }
        self.fleet.iter().position(|v| v.id == id).map(VehicleRef::Fleet)
    }

    pub fn vehicle_id(&self, v: VehicleRef) -> &str {
        match v {
            VehicleRef::Fleet(i) => &self.fleet[i].id,
            VehicleRef::Fictitious => FICTITIOUS_ID,
        }
    }

    pub fn biggest_weight(&self, params: &ControlParams) -> f64 {
        params.biggest_capacity_weight.unwrap_or_else(|| {
            self.fleet.iter().map(|v| v.max_weight).reduce(f64::max).unwrap_or(f64::INFINITY)
        })
    }

    pub fn biggest_volume(&self, params: &ControlParams) -> f64 {
        params.biggest_capacity_volume.unwrap_or_else(|| {
            self.fleet.iter().map(|v| v.max_volume).reduce(f64::max).unwrap_or(f64::INFINITY)
        })
    }

    /// Earliest depot departure for a vehicle; unassigned and fictitious routes leave at opening.
    pub fn departure_time(&self, vehicle: Option<VehicleRef>) -> f64 {
        match vehicle {
            Some(VehicleRef::Fleet(i)) => self.depot.open.max(self.fleet[i].shift_start),
            _ => self.depot.open,
        }
    }

    pub fn profile(&self, vehicle: Option<VehicleRef>, params: &ControlParams) -> VehicleProfile {
        match vehicle {
            Some(VehicleRef::Fleet(i)) => {
                let v = &self.fleet[i];
                VehicleProfile {
                    fleet_index: Some(i),
                    variable_cost: v.variable_cost,
                    fixed_cost: v.fixed_cost,
                    max_weight: v.max_weight,
                    max_volume: v.max_volume,
                    departure: self.departure_time(vehicle),
                }
            }
            _ => VehicleProfile {
                fleet_index: None,
                variable_cost: params.additional_vehicle_cost,
                fixed_cost: 0.0,
                max_weight: self.biggest_weight(params),
                max_volume: self.biggest_volume(params),
                departure: self.depot.open,
            },
        }
    }

    /// Site-dependency check. The fictitious vehicle and unassigned routes admit everyone.
    #[inline]
    pub fn admits(&self, fleet_index: Option<usize>, customer: usize) -> bool {
        match fleet_index {
            Some(v) => self.customers[customer].admissible_vehicles.contains(&v),
            None => true,
        }
    }
}

/// An ordered customer sequence (indices into `ProblemInstance::customers`) and its vehicle.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Route {
    pub customers: Vec<usize>,
    pub vehicle: Option<VehicleRef>,
}

impl Route {
    pub fn new(customers: Vec<usize>, vehicle: Option<VehicleRef>) -> Self {
        Self { customers, vehicle }
    }

    pub fn singleton(customer: usize) -> Self {
        Self { customers: vec![customer], vehicle: None }
    }

    pub fn is_empty(&self) -> bool {
        self.customers.is_empty()
    }

    pub fn len(&self) -> usize {
        self.customers.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopTimes {
    pub arrival: f64,
    pub service_start: f64,
    pub service_end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteSchedule {
    pub departure: f64,
    pub stops: Vec<StopTimes>,
    pub return_time: f64,
    /// km
    pub total_distance: f64,
    /// Distance from the depot to each stop along the route.
    pub cumulative_distance: Vec<f64>,
    pub total_weight: f64,
    pub total_volume: f64,
}

/// Earliest-start schedule: leave the depot as soon as depot and shift allow, wait for
/// window openings, never idle otherwise.
pub fn schedule_route(route: &Route, instance: &ProblemInstance) -> Result<RouteSchedule> {
    let n = instance.customers.len();
    if let Some(bad) = route.customers.iter().find(|c| **c >= n) {
        return Err(Error::InstanceConsistency(format!("route refers to unknown customer index {bad}")));
    }
    if let Some(VehicleRef::Fleet(v)) = route.vehicle {
        if v >= instance.fleet.len() {
            return Err(Error::InstanceConsistency(format!("route refers to unknown vehicle index {v}")));
        }
    }
    let m = &instance.matrix;
    let departure = instance.departure_time(route.vehicle);
    let mut stops = Vec::with_capacity(route.len());
    let mut cumulative_distance = Vec::with_capacity(route.len());
    let (mut t, mut dist, mut prev) = (departure, 0.0, DEPOT);
    let (mut weight, mut volume) = (0.0, 0.0);
    for &c in &route.customers {
        let cust = &instance.customers[c];
        let arrival = t + m.time(prev, node(c));
        let service_start = arrival.max(cust.window_start);
        let service_end = service_start + cust.service_time;
        dist += m.distance(prev, node(c));
        stops.push(StopTimes { arrival, service_start, service_end });
        cumulative_distance.push(dist);
        weight += cust.demand_weight;
        volume += cust.demand_volume;
        t = service_end;
        prev = node(c);
    }
    let (return_time, total_distance) = if route.is_empty() {
        (departure, 0.0)
    } else {
        (t + m.time(prev, DEPOT), dist + m.distance(prev, DEPOT))
    };
    Ok(RouteSchedule {
        departure,
        stops,
        return_time,
        total_distance,
        cumulative_distance,
        total_weight: weight,
        total_volume: volume,
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Solution {
    pub routes: Vec<Route>,
    /// Full-load split-delivery trips fixed before optimisation.
    pub pre_routes: Vec<Route>,
}

impl Solution {
    pub fn all_routes(&self) -> impl Iterator<Item = &Route> {
        self.pre_routes.iter().chain(&self.routes)
    }

    /// Checks that every customer appears in exactly one route.
    pub fn check_partition(&self, instance: &ProblemInstance) -> Result<()> {
        let n = instance.customers.len();
        let mut seen = vec![false; n];
        for c in self.all_routes().flat_map(|r| r.customers.iter().copied()) {
            if c >= n {
                return Err(Error::Partition(format!("unknown customer index {c}")));
            }
            if std::mem::replace(&mut seen[c], true) {
                return Err(Error::Partition(format!("customer {} is routed twice", instance.customers[c].id)));
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Partition(format!("customer {} is not routed", instance.customers[missing].id)));
        }
        Ok(())
    }
}

const EPS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Delay {
    pub customer: String,
    pub minutes: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RouteViolations {
    pub route: usize,
    pub vehicle: String,
    pub pre_route: bool,
    pub weight_overload: f64,
    pub volume_overload: f64,
    pub delays: Vec<Delay>,
    /// Customers served by a vehicle they do not admit.
    pub sdvrp: Vec<String>,
    /// Minutes past depot closing at return.
    pub depot_late: f64,
    /// Minutes past the vehicle's shift end at return.
    pub shift_late: f64,
    pub fictitious: bool,
}

impl RouteViolations {
    pub fn is_clean(&self) -> bool {
        self.weight_overload <= EPS
            && self.volume_overload <= EPS
            && self.delays.is_empty()
            && self.sdvrp.is_empty()
            && self.depot_late <= EPS
            && self.shift_late <= EPS
            && !self.fictitious
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// Only routes with at least one violation.
    pub routes: Vec<RouteViolations>,
    /// Real vehicles driving more than one regular route.
    pub reused_vehicles: Vec<String>,
}

impl std::fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.feasible {
            return writeln!(f, "feasible: all constraints met");
        }
        writeln!(f, "infeasible:")?;
        for r in &self.routes {
            let kind = if r.pre_route { "pre-route" } else { "route" };
            write!(f, "  {kind} {} ({}):", r.route, r.vehicle)?;
            if r.fictitious {
                write!(f, " fictitious vehicle;")?;
            }
            if r.weight_overload > EPS {
                write!(f, " weight overload {:.3} kg;", r.weight_overload)?;
            }
            if r.volume_overload > EPS {
                write!(f, " volume overload {:.4} m3;", r.volume_overload)?;
            }
            for d in &r.delays {
                write!(f, " customer {} late by {:.2} min;", d.customer, d.minutes)?;
            }
            for c in &r.sdvrp {
                write!(f, " customer {c} not admissible;")?;
            }
            if r.depot_late > EPS {
                write!(f, " returns {:.2} min after depot close;", r.depot_late)?;
            }
            if r.shift_late > EPS {
                write!(f, " returns {:.2} min after shift end;", r.shift_late)?;
            }
            writeln!(f)?;
        }
        for v in &self.reused_vehicles {
            writeln!(f, "  vehicle {v} drives more than one route")?;
        }
        Ok(())
    }
}

/// Audits a solution against every hard constraint of the model.
pub fn validate_solution(
    solution: &Solution,
    instance: &ProblemInstance,
    params: &ControlParams,
) -> Result<FeasibilityReport> {
    solution.check_partition(instance)?;
    let mut report = FeasibilityReport::default();
    let tagged = solution.pre_routes.iter().map(|r| (true, r)).chain(solution.routes.iter().map(|r| (false, r)));
    let mut usage: HashMap<usize, usize> = HashMap::new();
    for (idx, (pre_route, route)) in tagged.enumerate() {
        if route.is_empty() {
            continue;
        }
        let schedule = schedule_route(route, instance)?;
        let profile = instance.profile(route.vehicle, params);
        let mut v = RouteViolations {
            route: idx,
            vehicle: route.vehicle.map_or("UNASSIGNED", |r| instance.vehicle_id(r)).to_string(),
            pre_route,
            fictitious: profile.fleet_index.is_none(),
            ..Default::default()
        };
        v.weight_overload = (schedule.total_weight - profile.max_weight).max(0.0);
        v.volume_overload = (schedule.total_volume - profile.max_volume).max(0.0);
        for (stop, &c) in schedule.stops.iter().zip(&route.customers) {
            let late = stop.service_end - instance.customers[c].window_end;
            if late > EPS {
                v.delays.push(Delay { customer: instance.customers[c].id.clone(), minutes: late });
            }
            if !instance.admits(profile.fleet_index, c) {
                v.sdvrp.push(instance.customers[c].id.clone());
            }
        }
        v.depot_late = (schedule.return_time - instance.depot.close).max(0.0);
        if let Some(i) = profile.fleet_index {
            v.shift_late = (schedule.return_time - instance.fleet[i].shift_end).max(0.0);
            if !pre_route {
                *usage.entry(i).or_default() += 1;
            }
        }
        if !v.is_clean() {
            report.routes.push(v);
        }
    }
    let mut reused: Vec<usize> = usage.into_iter().filter(|(_, n)| *n > 1).map(|(i, _)| i).collect();
    reused.sort_unstable();
    report.reused_vehicles = reused.into_iter().map(|i| instance.fleet[i].id.clone()).collect();
    report.feasible = report.routes.is_empty() && report.reused_vehicles.is_empty();
    Ok(report)
}
