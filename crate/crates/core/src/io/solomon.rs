//! Solomon and Homberger benchmark files.

use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{build_time_matrix, Customer, Depot, ProblemInstance, Vehicle};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn numbers(line: usize, text: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| parse_err(line, format!("expected a number, found {t:?}"))))
        .collect()
}

/// Parses the whitespace-delimited layout: name line, `VEHICLE` section with vehicle count
/// and capacity, `CUSTOMER` section with one `id x y demand ready due service` row per
/// node, node 0 being the depot.
///
/// A row's due date is the latest service start, so the customer's window end (latest
/// completion) is due date plus service time.
pub fn parse_solomon(text: &str) -> Result<ProblemInstance> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (_, name) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let expect = |got: Option<(usize, &str)>, what: &str| -> Result<usize> {
        match got {
            Some((n, l)) if l.to_ascii_uppercase().starts_with(what) => Ok(n),
            Some((n, l)) => Err(parse_err(n, format!("expected {what} section, found {l:?}"))),
            None => Err(parse_err(0, format!("missing {what} section"))),
        }
    };
    expect(lines.next(), "VEHICLE")?;
    expect(lines.next(), "NUMBER")?;
    let (vl, vtext) = lines.next().ok_or_else(|| parse_err(0, "missing vehicle count and capacity"))?;
    let vrow = numbers(vl, vtext)?;
    if vrow.len() != 2 || vrow[0] < 0.0 || vrow[0].fract() != 0.0 || !(vrow[1] > 0.0) {
        return Err(parse_err(vl, "expected vehicle count and positive capacity"));
    }
    expect(lines.next(), "CUSTOMER")?;
    expect(lines.next(), "CUST")?;
    let mut rows = Vec::new();
    for (n, l) in lines {
        let r = numbers(n, l)?;
        if r.len() != 7 {
            return Err(parse_err(n, format!("customer row has {} fields, expected 7", r.len())));
        }
        rows.push((n, l.split_whitespace().next().unwrap_or_default().to_string(), r));
    }
    let Some(((dl, _, d), rest)) = rows.split_first() else {
        return Err(parse_err(0, "missing depot row"));
    };
    if !(d[4] <= d[5]) {
        return Err(parse_err(*dl, "depot opens after it closes"));
    }
    let depot = Depot { x: d[1], y: d[2], open: d[4], close: d[5] };
    let count = vrow[0] as usize;
    let fleet: Vec<Vehicle> = (1..=count)
        .map(|i| Vehicle {
            id: format!("V{i}"),
            max_weight: vrow[1],
            max_volume: f64::INFINITY,
            variable_cost: 1.0,
            fixed_cost: 0.0,
            shift_start: 0.0,
            shift_end: f64::INFINITY,
        })
        .collect();
    let all: BTreeSet<usize> = (0..count).collect();
    let mut customers = Vec::with_capacity(rest.len());
    for (n, id, r) in rest {
        if r[3] < 0.0 || r[6] < 0.0 || r[4] > r[5] {
            return Err(parse_err(*n, "negative demand or service, or ready time after due date"));
        }
        let mut c = Customer::new(id.clone(), r[1], r[2]);
        c.demand_weight = r[3];
        c.window_start = r[4];
        c.window_end = r[5] + r[6];
        c.service_time = r[6];
        c.admissible_vehicles = all.clone();
        customers.push(c);
    }
    let matrix = build_time_matrix(&customers, &depot);
    ProblemInstance::new(name, depot, customers, fleet, matrix)
}

pub fn load_solomon(path: impl AsRef<Path>) -> Result<ProblemInstance> {
    parse_solomon(&std::fs::read_to_string(path)?)
}
