//! Extended instance format: one JSON document with declared units, a heterogeneous
//! fleet, site-dependency lists and optional explicit matrices.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "name": "depot-north",
//!   "units": { "time": "min", "distance": "km", "weight": "kg", "volume": "m3" },
//!   "depot": { "x": 0, "y": 0, "open": 360, "close": 1080 },
//!   "fleet": [ { "id": "T1", "max_weight": 3500, "max_volume": 18, "variable_cost": 1.2,
//!                "fixed_cost": 80, "shift_start": 360, "shift_end": 960 } ],
//!   "customers": [ { "id": "K17", "x": 4.2, "y": -1.5, "demand_weight": 320,
//!                    "demand_volume": 1.4, "window_start": 420, "window_end": 600,
//!                    "service_time": 15, "admissible_vehicles": ["T1"],
//!                    "articles": 12, "city": "Zagreb" } ],
//!   "distance_matrix": [[0, 4.5], [4.5, 0]],
//!   "time_matrix": [[0, 9], [11, 0]]
//! }
//! ```
//!
//! `null` (or an absent field) stands for an unbounded `window_end`, `max_volume`,
//! `max_weight` or `shift_end`. Absent `admissible_vehicles` admits the whole fleet.
//! Matrices are indexed depot first, then customers in document order; a missing time
//! matrix copies the distance matrix, and missing matrices are Euclidean.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_time_matrix, Customer, Depot, ProblemInstance, TimeMatrix, Vehicle};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub time: String,
    pub distance: String,
    pub weight: String,
    pub volume: String,
}

impl Units {
    pub fn canonical() -> Self {
        Units { time: "min".into(), distance: "km".into(), weight: "kg".into(), volume: "m3".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepotDoc {
    pub x: f64,
    pub y: f64,
    pub open: f64,
    pub close: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleDoc {
    pub id: String,
    #[serde(default)]
    pub max_weight: Option<f64>,
    #[serde(default)]
    pub max_volume: Option<f64>,
    pub variable_cost: f64,
    #[serde(default)]
    pub fixed_cost: f64,
    #[serde(default)]
    pub shift_start: f64,
    #[serde(default)]
    pub shift_end: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomerDoc {
    pub id: String,
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub demand_weight: f64,
    #[serde(default)]
    pub demand_volume: f64,
    #[serde(default)]
    pub window_start: f64,
    #[serde(default)]
    pub window_end: Option<f64>,
    #[serde(default)]
    pub service_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub admissible_vehicles: Option<Vec<String>>,
    #[serde(default)]
    pub articles: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub city: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtendedInstance {
    pub format_version: u32,
    pub name: String,
    pub units: Units,
    pub depot: DepotDoc,
    pub fleet: Vec<VehicleDoc>,
    pub customers: Vec<CustomerDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_matrix: Option<Vec<Vec<f64>>>,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), message: message.into() }
}

fn factor(path: &str, unit: &str, table: &[(&str, f64)]) -> Result<f64> {
    table
        .iter()
        .find(|(name, _)| *name == unit)
        .map(|(_, f)| *f)
        .ok_or_else(|| {
            let known: Vec<&str> = table.iter().map(|(n, _)| *n).collect();
            schema(path, format!("unknown unit {unit:?}, expected one of {known:?}"))
        })
}

fn unit_factors(u: &Units) -> Result<(f64, f64, f64, f64)> {
    Ok((
        factor("units.time", &u.time, &[("min", 1.0), ("s", 1.0 / 60.0), ("h", 60.0)])?,
        factor("units.distance", &u.distance, &[("km", 1.0), ("m", 0.001), ("mi", 1.609344)])?,
        factor("units.weight", &u.weight, &[("kg", 1.0), ("t", 1000.0), ("lb", 0.45359237)])?,
        factor("units.volume", &u.volume, &[("m3", 1.0), ("l", 0.001)])?,
    ))
}

fn matrix(path: &str, rows: &[Vec<f64>], nodes: usize, scale: f64) -> Result<Vec<f64>> {
    if rows.len() != nodes {
        return Err(schema(path, format!("expected {nodes} rows, found {}", rows.len())));
    }
    let mut out = Vec::with_capacity(nodes * nodes);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != nodes {
            return Err(schema(format!("{path}[{i}]"), format!("expected {nodes} entries, found {}", row.len())));
        }
        for (j, &v) in row.iter().enumerate() {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(schema(format!("{path}[{i}][{j}]"), "entries must be finite and non-negative"));
            }
            out.push(v * scale);
        }
    }
    Ok(out)
}

impl ExtendedInstance {
    /// Converts to the in-memory model in minutes, km, kg and m³.
    pub fn to_instance(&self) -> Result<ProblemInstance> {
        if self.format_version != FORMAT_VERSION {
            return Err(schema("format_version", format!("unsupported version {}", self.format_version)));
        }
        let (ft, fd, fw, fv) = unit_factors(&self.units)?;
        let inf = |v: Option<f64>| v.unwrap_or(f64::INFINITY);
        let depot = Depot {
            x: self.depot.x * fd,
            y: self.depot.y * fd,
            open: self.depot.open * ft,
            close: self.depot.close * ft,
        };
        let fleet: Vec<Vehicle> = self
            .fleet
            .iter()
            .map(|v| Vehicle {
                id: v.id.clone(),
                max_weight: inf(v.max_weight) * fw,
                max_volume: inf(v.max_volume) * fv,
                variable_cost: v.variable_cost / fd,
                fixed_cost: v.fixed_cost,
                shift_start: v.shift_start * ft,
                shift_end: inf(v.shift_end) * ft,
            })
            .collect();
        let by_id: HashMap<&str, usize> = fleet.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
        let mut customers = Vec::with_capacity(self.customers.len());
        for (i, c) in self.customers.iter().enumerate() {
            let admissible: BTreeSet<usize> = match &c.admissible_vehicles {
                None => (0..fleet.len()).collect(),
                Some(ids) => ids
                    .iter()
                    .enumerate()
                    .map(|(j, id)| {
                        by_id.get(id.as_str()).copied().ok_or_else(|| {
                            schema(format!("customers[{i}].admissible_vehicles[{j}]"), format!("unknown vehicle {id:?}"))
                        })
                    })
                    .collect::<Result<_>>()?,
            };
            customers.push(Customer {
                id: c.id.clone(),
                x: c.x * fd,
                y: c.y * fd,
                demand_weight: c.demand_weight * fw,
                demand_volume: c.demand_volume * fv,
                window_start: c.window_start * ft,
                window_end: inf(c.window_end) * ft,
                service_time: c.service_time * ft,
                admissible_vehicles: admissible,
                articles: c.articles,
                city: c.city.clone(),
            });
        }
        let nodes = customers.len() + 1;
        let m = match (&self.distance_matrix, &self.time_matrix) {
            (None, None) => build_time_matrix(&customers, &depot),
            (dist, time) => {
                let euclid = build_time_matrix(&customers, &depot);
                let d = match dist {
                    Some(rows) => matrix("distance_matrix", rows, nodes, fd)?,
                    None => euclid.distance_table().to_vec(),
                };
                let t = match time {
                    Some(rows) => matrix("time_matrix", rows, nodes, ft)?,
                    None => d.clone(),
                };
                TimeMatrix::from_tables(nodes, t, d)?
            }
        };
        ProblemInstance::new(self.name.clone(), depot, customers, fleet, m)
    }

    /// Document form of an instance in canonical units with explicit matrices.
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        let fin = |v: f64| v.is_finite().then_some(v);
        let n = inst.matrix.nodes();
        let rows = |t: &[f64]| t.chunks(n).map(<[f64]>::to_vec).collect::<Vec<_>>();
        ExtendedInstance {
            format_version: FORMAT_VERSION,
            name: inst.name.clone(),
            units: Units::canonical(),
            depot: DepotDoc { x: inst.depot.x, y: inst.depot.y, open: inst.depot.open, close: inst.depot.close },
            fleet: inst
                .fleet
                .iter()
                .map(|v| VehicleDoc {
                    id: v.id.clone(),
                    max_weight: fin(v.max_weight),
                    max_volume: fin(v.max_volume),
                    variable_cost: v.variable_cost,
                    fixed_cost: v.fixed_cost,
                    shift_start: v.shift_start,
                    shift_end: fin(v.shift_end),
                })
                .collect(),
            customers: inst
                .customers
                .iter()
                .map(|c| CustomerDoc {
                    id: c.id.clone(),
                    x: c.x,
                    y: c.y,
                    demand_weight: c.demand_weight,
                    demand_volume: c.demand_volume,
                    window_start: c.window_start,
                    window_end: fin(c.window_end),
                    service_time: c.service_time,
                    admissible_vehicles: Some(
                        c.admissible_vehicles.iter().map(|&v| inst.fleet[v].id.clone()).collect(),
                    ),
                    articles: c.articles,
                    city: c.city.clone(),
                })
                .collect(),
            distance_matrix: Some(rows(inst.matrix.distance_table())),
            time_matrix: Some(rows(inst.matrix.time_table())),
        }
    }
}

pub fn parse_extended(text: &str) -> Result<ProblemInstance> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: ExtendedInstance = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(if path == "." { "$".to_string() } else { path }, e.into_inner().to_string())
    })?;
    doc.to_instance()
}

pub fn write_extended(inst: &ProblemInstance) -> String {
    serde_json::to_string_pretty(&ExtendedInstance::from_instance(inst)).expect("document serializes")
}

pub fn load_extended(path: impl AsRef<Path>) -> Result<ProblemInstance> {
    parse_extended(&std::fs::read_to_string(path)?)
}
