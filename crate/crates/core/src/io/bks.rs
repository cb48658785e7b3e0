//! Best-known solutions of the classic benchmark instances.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BksEntry {
    pub name: String,
    pub cost: f64,
    pub vehicles: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapReport {
    /// (ours − best) / best · 100.
    pub gap_percent: f64,
    /// Our vehicles minus the best-known count.
    pub vehicle_delta: i64,
}

/// Lines of `name cost vehicles`; blank lines and `#` comments are skipped.
pub fn parse_bks(text: &str) -> Result<Vec<BksEntry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| Error::Parse { line: i + 1, message: m.to_string() };
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(err("expected: name cost vehicles"));
        }
        let cost: f64 = f[1].parse().map_err(|_| err("cost is not a number"))?;
        let vehicles: usize = f[2].parse().map_err(|_| err("vehicle count is not an integer"))?;
        if !(cost > 0.0) || vehicles == 0 {
            return Err(err("cost and vehicle count must be positive"));
        }
        out.push(BksEntry { name: f[0].to_ascii_lowercase(), cost, vehicles });
    }
    Ok(out)
}

/// The table shipped with the crate.
pub fn builtin_bks() -> Vec<BksEntry> {
    parse_bks(include_str!("../../data/bks.txt")).expect("bundled table parses")
}

pub fn lookup_bks<'a>(entries: &'a [BksEntry], name: &str) -> Result<&'a BksEntry> {
    let key = name.to_ascii_lowercase();
    entries.iter().find(|e| e.name == key).ok_or_else(|| Error::UnknownInstance(name.to_string()))
}

pub fn compare_to_bks(cost: f64, vehicles: usize, entry: &BksEntry) -> GapReport {
    GapReport {
        gap_percent: (cost - entry.cost) / entry.cost * 100.0,
        vehicle_delta: vehicles as i64 - entry.vehicles as i64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaps() {
        let table = builtin_bks();
        let c101 = lookup_bks(&table, "C101").unwrap();
        assert_eq!(compare_to_bks(828.94, 10, c101).gap_percent, 0.0);
        let r101 = lookup_bks(&table, "r101").unwrap();
        let g = compare_to_bks(1657.26, 18, r101);
        assert!((g.gap_percent - 0.39).abs() < 0.005);
        assert_eq!(g.vehicle_delta, -1);
        assert!(matches!(lookup_bks(&table, "x999"), Err(Error::UnknownInstance(_))));
    }

    #[test]
    fn malformed_line() {
        assert!(matches!(parse_bks("c101 abc 10"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_bks("# nothing\n\n").unwrap().is_empty());
    }
}
