//! Benchmark runs against best-known solutions.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{Context, Result};
use hfvrp::io::{builtin_bks, compare_to_bks, lookup_bks, parse_bks, BksEntry};
use hfvrp::model::schedule_route;
use hfvrp::{solve, ControlParams, SolveOptions};
use serde::Serialize;

use crate::commands::deadline;
use crate::config::{load_instance, InstanceFormat};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    /// Total distance of the best run.
    pub distance: Option<f64>,
    pub vehicles: Option<usize>,
    pub feasible: bool,
    pub best_seed: Option<u64>,
    pub bks_distance: Option<f64>,
    pub bks_vehicles: Option<usize>,
    pub gap_percent: Option<f64>,
    pub vehicle_delta: Option<i64>,
    /// Wall time over all seeds.
    pub seconds: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchSummary {
    pub instances: usize,
    pub feasible: usize,
    pub mean_gap_percent: Option<f64>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
    pub summary: BenchSummary,
}

pub struct BenchConfig<'a> {
    pub params: &'a ControlParams,
    pub seeds: &'a [u64],
    pub time_limit: Option<f64>,
    pub jobs: usize,
}

pub fn load_bks(path: Option<&Path>) -> Result<Vec<BksEntry>> {
    match path {
        None => Ok(builtin_bks()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse_bks(&text).with_context(|| format!("instance-io: parsing {}", p.display()))
        }
    }
}

fn run_instance(path: &Path, bks: &[BksEntry], cfg: &BenchConfig) -> BenchRow {
    let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
    let entry = lookup_bks(bks, &name).ok();
    let mut row = BenchRow {
        instance: name,
        distance: None,
        vehicles: None,
        feasible: false,
        best_seed: None,
        bks_distance: entry.map(|e| e.cost),
        bks_vehicles: entry.map(|e| e.vehicles),
        gap_percent: None,
        vehicle_delta: None,
        seconds: 0.0,
        error: None,
    };
    let start = Instant::now();
    let result = (|| -> Result<()> {
        let (inst, _) = load_instance(path, InstanceFormat::Solomon)?;
        let mut best: Option<(bool, f64, usize, u64)> = None;
        for &seed in cfg.seeds {
            let opts = SolveOptions { seed, deadline: deadline(cfg.time_limit)?, ..SolveOptions::default() };
            let out = solve(&inst, cfg.params, &opts).context("solver")?;
            let mut distance = 0.0;
            for r in out.solution.all_routes().filter(|r| !r.is_empty()) {
                distance += schedule_route(r, &out.instance)?.total_distance;
            }
            let vehicles = out.solution.routes.iter().filter(|r| !r.is_empty()).count();
            let key = (!out.report.feasible, distance);
            if best.is_none_or(|b| key.0 < b.0 || (key.0 == b.0 && key.1 < b.1)) {
                best = Some((key.0, distance, vehicles, seed));
            }
        }
        if let Some((infeasible, distance, vehicles, seed)) = best {
            row.distance = Some(distance);
            row.vehicles = Some(vehicles);
            row.feasible = !infeasible;
            row.best_seed = Some(seed);
            if let Some(e) = entry {
                let g = compare_to_bks(distance, vehicles, e);
                row.gap_percent = Some(g.gap_percent);
                row.vehicle_delta = Some(g.vehicle_delta);
            }
        }
        Ok(())
    })();
    if let Err(e) = result {
        row.error = Some(format!("{e:#}"));
    }
    row.seconds = start.elapsed().as_secs_f64();
    row
}

/// Runs every instance with every seed and keeps the best run per instance. Instances run
/// on up to `jobs` threads; each solve owns its random stream.
pub fn run_bench(instances: &[PathBuf], bks: &[BksEntry], cfg: &BenchConfig) -> BenchTable {
    let slots: Vec<Mutex<Option<BenchRow>>> = instances.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..cfg.jobs.clamp(1, instances.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= instances.len() {
                    break;
                }
                let row = run_instance(&instances[i], bks, cfg);
                *slots[i].lock().expect("bench slot") = Some(row);
            });
        }
    });
    let rows: Vec<BenchRow> = slots.into_iter().filter_map(|m| m.into_inner().expect("bench slot")).collect();
    let gaps: Vec<f64> = rows.iter().filter_map(|r| r.gap_percent).collect();
    let summary = BenchSummary {
        instances: rows.len(),
        feasible: rows.iter().filter(|r| r.feasible).count(),
        mean_gap_percent: (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64),
        seconds: rows.iter().fold(0.0, |a, r| a + r.seconds),
    };
    BenchTable { rows, summary }
}

pub fn format_table(t: &BenchTable) -> String {
    let opt = |v: Option<f64>, p: usize| v.map_or("-".to_string(), |x| format!("{x:.p$}"));
    let mut s = format!(
        "{:<12} {:>10} {:>8} {:>10} {:>8} {:>8} {:>8} {:>9}\n",
        "instance", "distance", "vehicles", "bks", "bks_veh", "gap%", "feasible", "seconds"
    );
    for r in &t.rows {
        s += &format!(
            "{:<12} {:>10} {:>8} {:>10} {:>8} {:>8} {:>8} {:>9.2}\n",
            r.instance,
            opt(r.distance, 2),
            r.vehicles.map_or("-".into(), |v| v.to_string()),
            opt(r.bks_distance, 2),
            r.bks_vehicles.map_or("-".into(), |v| v.to_string()),
            opt(r.gap_percent, 3),
            if r.feasible { "yes" } else { "no" },
            r.seconds
        );
        if let Some(e) = &r.error {
            s += &format!("  error: {e}\n");
        }
    }
    let m = &t.summary;
    s += &format!(
        "summary: {} instances, {} feasible, mean gap {}%, {:.2} s\n",
        m.instances,
        m.feasible,
        opt(m.mean_gap_percent, 3),
        m.seconds
    );
    s
}
