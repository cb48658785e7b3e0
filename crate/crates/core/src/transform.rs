//! Data preparation before routing: depot-window clipping, split-delivery planning for
//! orders no admissible vehicle can carry at once, and the service-time transformation
//! that folds unloading into travel times (with its exact inverse).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{node, Customer, ProblemInstance, Route, Solution, TimeMatrix, VehicleRef, DEPOT};
use crate::params::{ControlParams, ResidualService};

/// Tightens customer windows so that service can start after the depot opens and the
/// vehicle is back before it closes.
pub fn clip_windows_to_depot(inst: &ProblemInstance) -> Result<ProblemInstance> {
    let mut out = inst.clone();
    let (open, close) = (inst.depot.open, inst.depot.close);
    for (i, c) in out.customers.iter_mut().enumerate() {
        let (t0i, ti0) = (inst.matrix.depot_to(i), inst.matrix.to_depot(i));
        if c.window_start - t0i < open {
            c.window_start = open + t0i;
        }
        if ti0 + c.window_end > close {
            c.window_end = close - ti0;
        }
        if c.window_start > c.window_end {
            return Err(Error::InfeasibleCustomer {
                customer: c.id.clone(),
                reason: format!(
                    "time window [{}, {}] cannot be reached from the depot and returned from before it closes",
                    c.window_start, c.window_end
                ),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub customer: String,
    /// Fleet index of the vehicle that drives the full trips.
    pub vehicle: usize,
    pub full_trip_count: usize,
    /// Indices of the full-trip customer records in the prepared instance.
    pub trips: Vec<usize>,
    /// Load ratio `max(v / mV, w / mW)` for the chosen vehicle.
    pub ratio: f64,
    pub residual_weight: f64,
    pub residual_volume: f64,
    pub residual_service: f64,
    /// Shift start of the chosen vehicle after the full trips.
    pub shift_start: f64,
}

#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub plans: Vec<SplitPlan>,
    /// Original customers (residuals in place) followed by one record per full trip;
    /// the fleet carries the advanced shift starts.
    pub instance: ProblemInstance,
}

impl SplitOutcome {
    /// One single-customer route per full trip.
    pub fn pre_routes(&self) -> Vec<Route> {
        self.plans
            .iter()
            .flat_map(|p| p.trips.iter().map(move |&t| Route::new(vec![t], Some(VehicleRef::Fleet(p.vehicle)))))
            .collect()
    }

    pub fn is_trip(&self, customer: usize) -> bool {
        self.plans.iter().any(|p| p.trips.contains(&customer))
    }
}

/// Plans full-load trips for every order that no admissible vehicle can carry in one go.
pub fn plan_split_deliveries(inst: &ProblemInstance, params: &ControlParams) -> Result<SplitOutcome> {
    let mut customers = inst.customers.clone();
    let mut fleet = inst.fleet.clone();
    let mut plans = Vec::new();
    let mut trips: Vec<(usize, Customer)> = Vec::new();
    let m = &inst.matrix;
    for (i, c) in inst.customers.iter().enumerate() {
        if inst.fleet.is_empty() {
            break;
        }
        if c.admissible_vehicles.is_empty() {
            return Err(Error::InfeasibleCustomer {
                customer: c.id.clone(),
                reason: "no vehicle of the fleet is allowed to serve it".into(),
            });
        }
        let fits = c.admissible_vehicles.iter().any(|&v| {
            let v = &inst.fleet[v];
            c.demand_weight <= v.max_weight && c.demand_volume <= v.max_volume
        });
        if fits {
            continue;
        }
        let round_trip = m.distance(DEPOT, node(i)) + m.distance(node(i), DEPOT);
        let ratio_of = |v: usize| {
            let v = &inst.fleet[v];
            (c.demand_volume / v.max_volume).max(c.demand_weight / v.max_weight)
        };
        let mut best: Option<(usize, f64)> = None;
        for &v in &c.admissible_vehicles {
            let cost = ratio_of(v).ceil() * round_trip * inst.fleet[v].variable_cost;
            if best.map_or(true, |(_, b)| cost < b) {
                best = Some((v, cost));
            }
        }
        let (v, _) = best.expect("admissible set is non-empty");
        let r = ratio_of(v);
        let mut full = r.floor();
        let mut frac = r - full;
        if frac <= 0.0 {
            // exact multiple: the last full load stays routable
            full -= 1.0;
            frac = 1.0;
        }
        let full_trips = full as usize;
        let share = frac / r;
        let per_trip_service = c.service_time / r;
        let residual_service = match params.residual_service {
            ResidualService::Proportional => c.service_time * share,
            ResidualService::FractionalPart => per_trip_service.fract(),
        };
        let vehicle = &mut fleet[v];
        vehicle.shift_start += full * (m.to_depot(i) + per_trip_service + m.depot_to(i));
        let shift_start = vehicle.shift_start;
        let residual = &mut customers[i];
        residual.demand_weight = c.demand_weight * share;
        residual.demand_volume = c.demand_volume * share;
        residual.articles = c.articles * share;
        residual.service_time = residual_service;
        residual.window_start = c.window_start.max(shift_start);
        residual.window_end = c.window_end.min(vehicle.shift_end);
        if residual.window_start > residual.window_end {
            return Err(Error::InfeasibleCustomer {
                customer: c.id.clone(),
                reason: format!(
                    "after {full_trips} full trips of vehicle {} the remaining window [{}, {}] is empty",
                    vehicle.id, residual.window_start, residual.window_end
                ),
            });
        }
        let mut plan = SplitPlan {
            customer: c.id.clone(),
            vehicle: v,
            full_trip_count: full_trips,
            trips: Vec::new(),
            ratio: r,
            residual_weight: residual.demand_weight,
            residual_volume: residual.demand_volume,
            residual_service,
            shift_start,
        };
        for k in 1..=full_trips {
            let mut trip = c.clone();
            trip.id = format!("{}#trip{k}", c.id);
            trip.demand_weight = c.demand_weight / r;
            trip.demand_volume = c.demand_volume / r;
            trip.articles = c.articles / r;
            trip.service_time = per_trip_service;
            trip.window_start = inst.depot.open;
            trip.window_end = inst.fleet[v].shift_end;
            plan.trips.push(inst.customers.len() + trips.len());
            trips.push((i, trip));
        }
        plans.push(plan);
    }
    if plans.is_empty() {
        return Ok(SplitOutcome { plans, instance: inst.clone() });
    }
    // trip records sit at the location of their source customer
    let source: Vec<usize> = std::iter::once(DEPOT)
        .chain((0..inst.customers.len()).map(node))
        .chain(trips.iter().map(|(i, _)| node(*i)))
        .collect();
    let n = source.len();
    let mut time = Vec::with_capacity(n * n);
    let mut distance = Vec::with_capacity(n * n);
    for &a in &source {
        for &b in &source {
            time.push(m.time(a, b));
            distance.push(m.distance(a, b));
        }
    }
    customers.extend(trips.into_iter().map(|(_, t)| t));
    let matrix = TimeMatrix::from_tables(n, time, distance)?;
    let instance = ProblemInstance::new(inst.name.clone(), inst.depot, customers, fleet, matrix)?;
    Ok(SplitOutcome { plans, instance })
}

/// Original values needed to undo the service-time transformation exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformRecord {
    /// Per customer: window start, window end, service time.
    pub customers: Vec<(f64, f64, f64)>,
    pub times: Vec<f64>,
}

/// Moves half of every service time onto each incident travel time and narrows the
/// windows by the same amount, leaving zero service times.
pub fn apply_service_time_transform(inst: &ProblemInstance) -> Result<(ProblemInstance, TransformRecord)> {
    let record = TransformRecord {
        customers: inst.customers.iter().map(|c| (c.window_start, c.window_end, c.service_time)).collect(),
        times: inst.matrix.time_table().to_vec(),
    };
    let mut out = inst.clone();
    for c in &mut out.customers {
        let half = c.service_time / 2.0;
        let (a, b) = (c.window_start + half, c.window_end - half);
        if b < a {
            return Err(Error::WindowCollapse { customer: c.id.clone(), start: a, end: b });
        }
        c.window_start = a;
        c.window_end = b;
        c.service_time = 0.0;
    }
    let half: Vec<f64> = std::iter::once(0.0).chain(inst.customers.iter().map(|c| c.service_time / 2.0)).collect();
    let n = inst.matrix.nodes();
    for from in 0..n {
        for to in 0..n {
            if from != to {
                let t = inst.matrix.time(from, to) + half[from] + half[to];
                out.matrix.set_time(from, to, t);
            }
        }
    }
    Ok((out, record))
}

impl TransformRecord {
    /// Puts back the original windows, service times and travel times.
    pub fn restore(&self, transformed: &ProblemInstance) -> Result<ProblemInstance> {
        if transformed.customers.len() != self.customers.len() || transformed.matrix.time_table().len() != self.times.len()
        {
            return Err(Error::Contract("transform record does not belong to this instance".into()));
        }
        let mut out = transformed.clone();
        for (c, &(a, b, s)) in out.customers.iter_mut().zip(&self.customers) {
            c.window_start = a;
            c.window_end = b;
            c.service_time = s;
        }
        out.matrix = TimeMatrix::from_tables(
            transformed.matrix.nodes(),
            self.times.clone(),
            transformed.matrix.distance_table().to_vec(),
        )?;
        Ok(out)
    }
}

/// Returns the solution together with the instance in the original time frame. Routes
/// carry no times of their own, so only the instance changes.
pub fn invert_service_time_transform(
    solution: &Solution,
    transformed: &ProblemInstance,
    record: &TransformRecord,
) -> Result<(Solution, ProblemInstance)> {
    let n = record.customers.len();
    if let Some(c) = solution.all_routes().flat_map(|r| r.customers.iter()).find(|c| **c >= n) {
        return Err(Error::Contract(format!("solution refers to customer index {c} unknown to the transform record")));
    }
    Ok((solution.clone(), record.restore(transformed)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{route_cost, CostMode};
    use crate::model::{build_time_matrix, Depot, Vehicle};

    fn vehicle(id: &str, w: f64, v: f64, cost: f64) -> Vehicle {
        Vehicle {
            id: id.into(),
            max_weight: w,
            max_volume: v,
            variable_cost: cost,
            fixed_cost: 0.0,
            shift_start: 0.0,
            shift_end: 1e4,
        }
    }

    fn inst(mut customers: Vec<Customer>, depot: Depot, fleet: Vec<Vehicle>) -> ProblemInstance {
        for c in &mut customers {
            c.admissible_vehicles.retain(|&v| v < fleet.len());
        }
        let m = build_time_matrix(&customers, &depot);
        ProblemInstance::new("t", depot, customers, fleet, m).unwrap()
    }

    fn cust(id: &str, x: f64, y: f64) -> Customer {
        let mut c = Customer::new(id, x, y);
        c.admissible_vehicles = [0].into_iter().collect();
        c
    }

    #[test]
    fn clipping_moves_window_start_after_depot_opening() {
        let mut a = cust("A", 3.0, 4.0);
        a.window_end = 500.0;
        let out =
            clip_windows_to_depot(&inst(vec![a], Depot { x: 0.0, y: 0.0, open: 60.0, close: 1e6 }, vec![])).unwrap();
        assert_eq!(out.customers[0].window_start, 65.0);
        assert_eq!(out.customers[0].window_end, 500.0);
    }

    #[test]
    fn clipping_moves_window_end_before_depot_closing() {
        let mut b = cust("B", 6.0, 8.0);
        b.window_end = 200.0;
        let out = clip_windows_to_depot(&inst(vec![b], Depot { x: 0.0, y: 0.0, open: 0.0, close: 100.0 }, vec![]))
            .unwrap();
        assert_eq!(out.customers[0].window_end, 90.0);
    }

    #[test]
    fn clipping_without_triggers_is_identity() {
        let mut a = cust("A", 3.0, 4.0);
        a.window_start = 10.0;
        a.window_end = 50.0;
        let i = inst(vec![a], Depot { x: 0.0, y: 0.0, open: 0.0, close: 1e12 }, vec![]);
        assert_eq!(clip_windows_to_depot(&i).unwrap(), i);
    }

    #[test]
    fn clipping_collapse_names_customer() {
        let mut a = cust("far", 30.0, 40.0);
        a.window_end = 60.0;
        let i = inst(vec![a], Depot { x: 0.0, y: 0.0, open: 20.0, close: 1e6 }, vec![]);
        match clip_windows_to_depot(&i) {
            Err(Error::InfeasibleCustomer { customer, .. }) => assert_eq!(customer, "far"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn oversized_order_becomes_full_trips_plus_residual() {
        let mut a = cust("A", 3.0, 4.0);
        a.demand_volume = 25.0;
        a.demand_weight = 100.0;
        a.service_time = 30.0;
        a.window_end = 1e4;
        let i = inst(vec![a], Depot { x: 0.0, y: 0.0, open: 0.0, close: 1e4 }, vec![vehicle("V", 1000.0, 10.0, 1.0)]);
        let out = plan_split_deliveries(&i, &ControlParams::default()).unwrap();
        let p = &out.plans[0];
        assert_eq!(p.ratio, 2.5);
        assert_eq!(p.full_trip_count, 2);
        assert!((p.residual_volume - 5.0).abs() < 1e-12);
        assert!((p.residual_service - 6.0).abs() < 1e-12);
        // shift advances by 2 trips of (5 + 12 + 5)
        assert!((p.shift_start - 44.0).abs() < 1e-12);
        assert_eq!(out.instance.customers[0].window_start, 44.0);
        assert_eq!(out.instance.customers.len(), 3);
        assert_eq!(out.instance.customers[1].id, "A#trip1");
        assert_eq!(out.pre_routes().len(), 2);
        let delivered: f64 = out.instance.customers.iter().map(|c| c.demand_volume).sum();
        assert!((delivered - 25.0).abs() < 1e-12);
        // trip records sit on the customer's location
        assert_eq!(out.instance.matrix.between(0, 1), 0.0);
        assert_eq!(out.instance.matrix.depot_to(2), 5.0);
    }

    #[test]
    fn fractional_part_residual_service_switch() {
        let mut a = cust("A", 3.0, 4.0);
        a.demand_volume = 25.0;
        a.service_time = 30.0;
        let i = inst(vec![a], Depot { x: 0.0, y: 0.0, open: 0.0, close: 1e4 }, vec![vehicle("V", 1000.0, 10.0, 1.0)]);
        let p = ControlParams { residual_service: ResidualService::FractionalPart, ..Default::default() };
        let out = plan_split_deliveries(&i, &p).unwrap();
        assert_eq!(out.plans[0].residual_service, 0.0);
    }

    #[test]
    fn cheapest_full_trip_vehicle_is_chosen() {
        let mut a = cust("A", 3.0, 4.0);
        a.demand_volume = 25.0;
        a.admissible_vehicles = [0, 1].into_iter().collect();
        // V0: 3 trips at cost 1 = 30; V1: 2 trips at cost 2 = 40
        let i = inst(
            vec![a],
            Depot { x: 0.0, y: 0.0, open: 0.0, close: 1e4 },
            vec![vehicle("V0", 1000.0, 10.0, 1.0), vehicle("V1", 1000.0, 20.0, 2.0)],
        );
        let out = plan_split_deliveries(&i, &ControlParams::default()).unwrap();
        assert_eq!(out.plans[0].vehicle, 0);
    }

    #[test]
    fn fitting_orders_are_untouched() {
        let mut a = cust("A", 3.0, 4.0);
        a.demand_volume = 5.0;
        let i = inst(vec![a], Depot { x: 0.0, y: 0.0, open: 0.0, close: 1e4 }, vec![vehicle("V", 1000.0, 10.0, 1.0)]);
        let out = plan_split_deliveries(&i, &ControlParams::default()).unwrap();
        assert!(out.plans.is_empty());
        assert_eq!(out.instance, i);
    }

    #[test]
    fn exact_multiple_keeps_one_load_routable() {
        let mut a = cust("A", 3.0, 4.0);
        a.demand_volume = 20.0;
        let i = inst(vec![a], Depot { x: 0.0, y: 0.0, open: 0.0, close: 1e4 }, vec![vehicle("V", 1000.0, 10.0, 1.0)]);
        let out = plan_split_deliveries(&i, &ControlParams::default()).unwrap();
        assert_eq!(out.plans[0].full_trip_count, 1);
        assert_eq!(out.plans[0].residual_volume, 10.0);
    }

    #[test]
    fn no_admissible_vehicle_is_an_error() {
        let mut a = Customer::new("A", 3.0, 4.0);
        a.demand_volume = 25.0;
        let i = inst(vec![a], Depot { x: 0.0, y: 0.0, open: 0.0, close: 1e4 }, vec![vehicle("V", 1000.0, 10.0, 1.0)]);
        assert!(matches!(plan_split_deliveries(&i, &ControlParams::default()), Err(Error::InfeasibleCustomer { .. })));
    }

    #[test]
    fn service_transform_arithmetic() {
        let mut a = cust("A", 3.0, 4.0);
        a.service_time = 10.0;
        a.window_start = 20.0;
        a.window_end = 100.0;
        let mut b = cust("B", 6.0, 8.0);
        b.service_time = 10.0;
        let i = inst(vec![a, b], Depot { x: 0.0, y: 0.0, open: 0.0, close: 1e4 }, vec![vehicle("V", 1.0, 1.0, 1.0)]);
        let (t, rec) = apply_service_time_transform(&i).unwrap();
        assert_eq!(t.matrix.between(0, 1), 15.0);
        assert_eq!(t.matrix.depot_to(0), 10.0);
        assert_eq!(t.matrix.to_depot(1), 15.0);
        assert_eq!((t.customers[0].window_start, t.customers[0].window_end), (25.0, 95.0));
        assert_eq!(t.customers[0].service_time, 0.0);
        assert_eq!(t.matrix.distance_table(), i.matrix.distance_table());
        assert_eq!(rec.restore(&t).unwrap(), i);
    }

    #[test]
    fn zero_service_transform_is_identity() {
        let i = inst(
            vec![cust("A", 3.0, 4.0), cust("B", 6.0, 8.0)],
            Depot { x: 0.0, y: 0.0, open: 0.0, close: 1e4 },
            vec![vehicle("V", 1.0, 1.0, 1.0)],
        );
        let (t, rec) = apply_service_time_transform(&i).unwrap();
        assert_eq!(t, i);
        let (_, back) = invert_service_time_transform(&Solution::default(), &t, &rec).unwrap();
        assert_eq!(back, i);
    }

    #[test]
    fn narrow_window_collapses() {
        let mut a = cust("A", 3.0, 4.0);
        a.service_time = 10.0;
        a.window_start = 20.0;
        a.window_end = 25.0;
        let i = inst(vec![a], Depot { x: 0.0, y: 0.0, open: 0.0, close: 1e4 }, vec![]);
        assert!(matches!(apply_service_time_transform(&i), Err(Error::WindowCollapse { .. })));
    }

    #[test]
    fn transformed_route_costs_match_original() {
        let mut a = cust("A", 3.0, 4.0);
        a.service_time = 10.0;
        a.window_start = 20.0;
        a.window_end = 36.0;
        a.demand_weight = 300.0;
        let mut b = cust("B", 6.0, 8.0);
        b.service_time = 4.0;
        b.window_end = 30.0;
        let i = inst(vec![a, b], Depot { x: 0.0, y: 0.0, open: 0.0, close: 1e4 }, vec![vehicle("V", 100.0, 1.0, 1.0)]);
        let (t, rec) = apply_service_time_transform(&i).unwrap();
        let route = Route::new(vec![0, 1], Some(VehicleRef::Fleet(0)));
        let p = ControlParams::default();
        let before = route_cost(&route, &t, &p, CostMode::Full).unwrap();
        let after = route_cost(&route, &rec.restore(&t).unwrap(), &p, CostMode::Full).unwrap();
        assert!(before.pd > 0.0);
        assert!((before.total - after.total).abs() < 1e-9);
        let sol = Solution { routes: vec![Route::new(vec![5], None)], pre_routes: vec![] };
        assert!(matches!(invert_service_time_transform(&sol, &t, &rec), Err(Error::Contract(_))));
    }
}
