//! Solution output: plain text, a JSON document that parses back, and GeoJSON.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cost::{route_cost_components, CostComponents, CostMode};
use crate::error::{Error, Result};
use crate::model::{schedule_route, ProblemInstance, Route, Solution};
use crate::params::ControlParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopDoc {
    pub customer: String,
    pub arrival: f64,
    pub service_start: f64,
    pub service_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteDoc {
    pub vehicle: String,
    /// Split-delivery trip fixed before optimisation.
    pub pre_route: bool,
    pub departure: f64,
    pub stops: Vec<StopDoc>,
    pub return_time: f64,
    pub distance: f64,
    pub weight: f64,
    pub volume: f64,
    pub cost: CostComponents,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub instance: String,
    pub total: CostComponents,
    pub vehicles_used: usize,
    pub routes: Vec<RouteDoc>,
}

fn route_doc(route: &Route, pre_route: bool, inst: &ProblemInstance, params: &ControlParams) -> Result<RouteDoc> {
    let s = schedule_route(route, inst)?;
    let cost = route_cost_components(route, &s, inst, params, CostMode::Full)?;
    Ok(RouteDoc {
        vehicle: route.vehicle.map_or("UNASSIGNED", |v| inst.vehicle_id(v)).to_string(),
        pre_route,
        departure: s.departure,
        stops: route
            .customers
            .iter()
            .zip(&s.stops)
            .map(|(&c, t)| StopDoc {
                customer: inst.customers[c].id.clone(),
                arrival: t.arrival,
                service_start: t.service_start,
                service_end: t.service_end,
            })
            .collect(),
        return_time: s.return_time,
        distance: s.total_distance,
        weight: s.total_weight,
        volume: s.total_volume,
        cost,
    })
}

pub fn solution_doc(solution: &Solution, inst: &ProblemInstance, params: &ControlParams) -> Result<SolutionDoc> {
    let mut routes = Vec::new();
    for r in solution.pre_routes.iter().filter(|r| !r.is_empty()) {
        routes.push(route_doc(r, true, inst, params)?);
    }
    for r in solution.routes.iter().filter(|r| !r.is_empty()) {
        routes.push(route_doc(r, false, inst, params)?);
    }
    let mut total = CostComponents::default();
    for r in &routes {
        total.add(&r.cost);
    }
    let vehicles_used = solution.routes.iter().filter(|r| !r.is_empty()).count();
    Ok(SolutionDoc { instance: inst.name.clone(), total, vehicles_used, routes })
}

/// Rebuilds a solution from its document against the instance it was solved on.
pub fn solution_from_doc(doc: &SolutionDoc, inst: &ProblemInstance) -> Result<Solution> {
    let ids = inst.customer_index();
    let mut out = Solution::default();
    for (i, r) in doc.routes.iter().enumerate() {
        let vehicle = inst
            .vehicle_index(&r.vehicle)
            .ok_or_else(|| Error::Schema { path: format!("routes[{i}].vehicle"), message: format!("unknown vehicle {:?}", r.vehicle) })?;
        let customers = r
            .stops
            .iter()
            .enumerate()
            .map(|(j, s)| {
                ids.get(s.customer.as_str()).copied().ok_or_else(|| Error::Schema {
                    path: format!("routes[{i}].stops[{j}].customer"),
                    message: format!("unknown customer {:?}", s.customer),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let route = Route::new(customers, Some(vehicle));
        if r.pre_route {
            out.pre_routes.push(route);
        } else {
            out.routes.push(route);
        }
    }
    Ok(out)
}

pub fn write_solution_json(solution: &Solution, inst: &ProblemInstance, params: &ControlParams) -> Result<String> {
    Ok(serde_json::to_string_pretty(&solution_doc(solution, inst, params)?)?)
}

pub fn parse_solution_json(text: &str) -> Result<SolutionDoc> {
    Ok(serde_json::from_str(text)?)
}

pub fn write_solution_text(solution: &Solution, inst: &ProblemInstance, params: &ControlParams) -> Result<String> {
    let doc = solution_doc(solution, inst, params)?;
    let mut s = String::new();
    let _ = writeln!(s, "instance {}", doc.instance);
    for (i, r) in doc.routes.iter().enumerate() {
        let kind = if r.pre_route { " (split trip)" } else { "" };
        let _ = writeln!(s, "route {} vehicle {}{kind}: {:.2} km, {:.2} kg, {:.4} m3", i + 1, r.vehicle, r.distance, r.weight, r.volume);
        let _ = writeln!(s, "  depart {:.2}", r.departure);
        for st in &r.stops {
            let _ = writeln!(
                s,
                "  {} arrive {:.2} start {:.2} end {:.2}",
                st.customer, st.arrival, st.service_start, st.service_end
            );
        }
        let _ = writeln!(s, "  return {:.2}", r.return_time);
        let c = &r.cost;
        let _ = writeln!(
            s,
            "  cost {:.4} (rrc {:.4} pd {:.4} pv {:.4} pw {:.4} pcv {:.4} ppw {:.4})",
            c.total, c.rrc, c.pd, c.pv, c.pw, c.pcv, c.ppw
        );
    }
    let t = &doc.total;
    let _ = writeln!(s, "routes {} vehicles {}", doc.routes.len(), doc.vehicles_used);
    let _ = writeln!(
        s,
        "total {:.4} (rrc {:.4} pd {:.4} pv {:.4} pw {:.4} pcv {:.4} ppw {:.4})",
        t.total, t.rrc, t.pd, t.pv, t.pw, t.pcv, t.ppw
    );
    Ok(s)
}

/// GeoJSON FeatureCollection: one LineString per route (depot to depot) and one Point per
/// stop labelled with its position in the route. Coordinates are written as-is.
pub fn write_solution_geojson(solution: &Solution, inst: &ProblemInstance) -> Result<String> {
    let depot = [inst.depot.x, inst.depot.y];
    let mut features: Vec<Value> = Vec::new();
    let tagged = solution.pre_routes.iter().map(|r| (true, r)).chain(solution.routes.iter().map(|r| (false, r)));
    for (i, (pre, r)) in tagged.filter(|(_, r)| !r.is_empty()).enumerate() {
        let vehicle = r.vehicle.map_or("UNASSIGNED", |v| inst.vehicle_id(v));
        let mut line = vec![depot];
        for &c in &r.customers {
            let cust = inst
                .customers
                .get(c)
                .ok_or_else(|| Error::InstanceConsistency(format!("unknown customer index {c}")))?;
            line.push([cust.x, cust.y]);
        }
        line.push(depot);
        features.push(json!({
            "type": "Feature",
            "geometry": { "type": "LineString", "coordinates": line },
            "properties": { "route": i + 1, "vehicle": vehicle, "pre_route": pre }
        }));
        for (seq, &c) in r.customers.iter().enumerate() {
            let cust = &inst.customers[c];
            features.push(json!({
                "type": "Feature",
                "geometry": { "type": "Point", "coordinates": [cust.x, cust.y] },
                "properties": { "route": i + 1, "sequence": seq + 1, "label": (seq + 1).to_string(), "customer": cust.id }
            }));
        }
    }
    features.push(json!({
        "type": "Feature",
        "geometry": { "type": "Point", "coordinates": depot },
        "properties": { "depot": true, "label": "depot" }
    }));
    Ok(serde_json::to_string_pretty(&json!({ "type": "FeatureCollection", "features": features }))?)
}
