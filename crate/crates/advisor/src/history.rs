//! The run-history table: one row per past solve with the instance attributes, whether every
//! constraint was met, and the control parameters that were used.

use std::io::{Read, Write};

use hfvrp::features::InstanceFeatures;
use hfvrp::params::TUNABLE_PARAMS;
use hfvrp::ControlParams;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Input column headers, in `InstanceFeatures::to_array` order.
pub const INPUT_COLUMNS: [&str; 9] = [
    "NUMBER_OF_CUSTOMERS_TOTAL",
    "NUMBER_AVAILABLE_VEHICLES",
    "NUMBER_VEHICLE_TYPES",
    "NUMBER_OF_DIFFERENT_CITIES",
    "NUM_CONST_CUST_VEH_TOTAL",
    "NUMBER_OF_ARTICLES_TOTAL",
    "VOLUME_TOTAL",
    "WEIGHT_TOTAL",
    "SUM_TIME_WINDOWS_TOTAL",
];

pub const FEASIBLE_COLUMN: &str = "ALL_CONSTRAINTS_MET";

/// Target column headers, in `TUNABLE_PARAMS` order.
pub const TARGET_COLUMNS: [&str; 7] = [
    "ToleranceWeight",
    "ToleranceVolume",
    "PenaltyDelay",
    "PenaltyCustomersVehicles",
    "CostIncreasing",
    "PenaltyPercentageVolume",
    "PenaltyPercentageWeight",
];

#[derive(Debug, Clone, PartialEq)]
pub struct TuningRecord {
    pub features: InstanceFeatures,
    pub feasible: bool,
    /// In `TUNABLE_PARAMS` order.
    pub targets: [f64; 7],
}

impl TuningRecord {
    pub fn new(features: InstanceFeatures, feasible: bool, params: &ControlParams) -> Self {
        let targets = TUNABLE_PARAMS.map(|name| params.get_tunable(name).unwrap_or(0.0));
        Self { features, feasible, targets }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    #[serde(rename = "NUMBER_OF_CUSTOMERS_TOTAL")]
    customer_count: f64,
    #[serde(rename = "NUMBER_AVAILABLE_VEHICLES")]
    available_vehicle_count: f64,
    #[serde(rename = "NUMBER_VEHICLE_TYPES")]
    vehicle_type_count: f64,
    #[serde(rename = "NUMBER_OF_DIFFERENT_CITIES")]
    city_count: f64,
    #[serde(rename = "NUM_CONST_CUST_VEH_TOTAL")]
    sdvrp_constraint_total: f64,
    #[serde(rename = "NUMBER_OF_ARTICLES_TOTAL")]
    article_total: f64,
    #[serde(rename = "VOLUME_TOTAL")]
    volume_total: f64,
    #[serde(rename = "WEIGHT_TOTAL")]
    weight_total: f64,
    #[serde(rename = "SUM_TIME_WINDOWS_TOTAL")]
    time_window_sum: f64,
    #[serde(rename = "ALL_CONSTRAINTS_MET")]
    feasible: u8,
    #[serde(rename = "ToleranceWeight")]
    tolerance_weight: f64,
    #[serde(rename = "ToleranceVolume")]
    tolerance_volume: f64,
    #[serde(rename = "PenaltyDelay")]
    penalty_delay: f64,
    #[serde(rename = "PenaltyCustomersVehicles")]
    penalty_customers_vehicles: f64,
    #[serde(rename = "CostIncreasing")]
    cost_increasing: f64,
    #[serde(rename = "PenaltyPercentageVolume")]
    penalty_percentage_volume: f64,
    #[serde(rename = "PenaltyPercentageWeight")]
    penalty_percentage_weight: f64,
}

impl Row {
    fn into_record(self, row: usize) -> Result<TuningRecord> {
        let bad = |message: String| Error::Record { row, message };
        let feasible = match self.feasible {
            0 => false,
            1 => true,
            v => return Err(bad(format!("{FEASIBLE_COLUMN} must be 0 or 1, got {v}"))),
        };
        let features = InstanceFeatures {
            customer_count: self.customer_count,
            available_vehicle_count: self.available_vehicle_count,
            vehicle_type_count: self.vehicle_type_count,
            city_count: self.city_count,
            sdvrp_constraint_total: self.sdvrp_constraint_total,
            article_total: self.article_total,
            volume_total: self.volume_total,
            weight_total: self.weight_total,
            time_window_sum: self.time_window_sum,
        };
        for (name, v) in INPUT_COLUMNS.iter().zip(features.to_array()) {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(bad(format!("{name} must be a finite non-negative number, got {v}")));
            }
        }
        let targets = [
            self.tolerance_weight,
            self.tolerance_volume,
            self.penalty_delay,
            self.penalty_customers_vehicles,
            self.cost_increasing,
            self.penalty_percentage_volume,
            self.penalty_percentage_weight,
        ];
        if let Some((name, v)) = TARGET_COLUMNS.iter().zip(targets).find(|(_, v)| !v.is_finite()) {
            return Err(bad(format!("{name} must be finite, got {v}")));
        }
        Ok(TuningRecord { features, feasible, targets })
    }

    fn from_record(r: &TuningRecord) -> Self {
        let f = &r.features;
        let t = &r.targets;
        Row {
            customer_count: f.customer_count,
            available_vehicle_count: f.available_vehicle_count,
            vehicle_type_count: f.vehicle_type_count,
            city_count: f.city_count,
            sdvrp_constraint_total: f.sdvrp_constraint_total,
            article_total: f.article_total,
            volume_total: f.volume_total,
            weight_total: f.weight_total,
            time_window_sum: f.time_window_sum,
            feasible: u8::from(r.feasible),
            tolerance_weight: t[0],
            tolerance_volume: t[1],
            penalty_delay: t[2],
            penalty_customers_vehicles: t[3],
            cost_increasing: t[4],
            penalty_percentage_volume: t[5],
            penalty_percentage_weight: t[6],
        }
    }
}

/// Reads a comma-separated history with a header row. Rows are numbered from 1 after the header.
pub fn read_history<R: Read>(reader: R) -> Result<Vec<TuningRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| Error::Record { row: i + 1, message: e.to_string() })?;
        out.push(row.into_record(i + 1)?);
    }
    Ok(out)
}

pub fn load_history(path: impl AsRef<std::path::Path>) -> Result<Vec<TuningRecord>> {
    read_history(std::fs::File::open(path)?)
}

pub fn write_history<W: Write>(writer: W, records: &[TuningRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(Row::from_record(r))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(feasible: bool) -> TuningRecord {
        TuningRecord {
            features: InstanceFeatures {
                customer_count: 100.0,
                available_vehicle_count: 8.0,
                vehicle_type_count: 7.0,
                city_count: 12.0,
                sdvrp_constraint_total: 40.0,
                article_total: 900.0,
                volume_total: 31.5,
                weight_total: 7400.0,
                time_window_sum: 36000.0,
            },
            feasible,
            targets: [50.0, 0.1, 0.5, 400.0, 0.2, 400.0, 400.0],
        }
    }

    #[test]
    fn round_trip_with_exact_headers() {
        let rs = vec![record(true), record(false)];
        let mut buf = Vec::new();
        write_history(&mut buf, &rs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        let expected: Vec<&str> =
            INPUT_COLUMNS.iter().copied().chain([FEASIBLE_COLUMN]).chain(TARGET_COLUMNS).collect();
        assert_eq!(header, expected.join(","));
        assert_eq!(read_history(text.as_bytes()).unwrap(), rs);
    }

    #[test]
    fn rejects_bad_flag_with_row_number() {
        let mut buf = Vec::new();
        write_history(&mut buf, &[record(true), record(true)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[2] = lines[2].replacen(",1,50", ",2,50", 1);
        let err = read_history(lines.join("\n").as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Record { row: 2, .. }), "{err}");
    }

    #[test]
    fn rejects_negative_count() {
        let mut buf = Vec::new();
        write_history(&mut buf, &[record(true)]).unwrap();
        let text = String::from_utf8(buf).unwrap().replacen("\n100.0,", "\n-1,", 1);
        assert!(matches!(read_history(text.as_bytes()), Err(Error::Record { row: 1, .. })));
    }

    #[test]
    fn record_from_params_uses_tunable_order() {
        let p = ControlParams { penalty_delay: 3.0, ..ControlParams::default() };
        let r = TuningRecord::new(record(true).features, true, &p);
        assert_eq!(r.targets[2], 3.0);
        assert_eq!(r.targets[0], p.tolerance_weight);
    }
}
