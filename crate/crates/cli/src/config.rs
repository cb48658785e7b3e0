//! Instance loading and parameter layering shared by the subcommands.

use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use hfvrp::io::{load_extended, load_solomon};
use hfvrp::{ControlParams, ProblemInstance};

/// Environment variable naming a default parameter overlay file.
pub const CONFIG_ENV: &str = "HFVRP_CONFIG";

/// Per-route charge that makes the route count dominate distance in routes-first mode.
pub const ROUTES_FIRST_CHARGE: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InstanceFormat {
    /// `.json` is extended, anything else Solomon.
    Auto,
    Solomon,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Objective {
    CostFirst,
    RoutesFirst,
}

pub fn resolve_format(path: &Path, format: InstanceFormat) -> InstanceFormat {
    match format {
        InstanceFormat::Auto => {
            if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
                InstanceFormat::Extended
            } else {
                InstanceFormat::Solomon
            }
        }
        f => f,
    }
}

pub fn load_instance(path: &Path, format: InstanceFormat) -> Result<(ProblemInstance, InstanceFormat)> {
    let format = resolve_format(path, format);
    let inst = match format {
        InstanceFormat::Extended => load_extended(path),
        _ => load_solomon(path),
    }
    .with_context(|| format!("instance-io: reading {}", path.display()))?;
    Ok((inst, format))
}

/// Base values for the format, then the overlay file, then command-line overrides.
/// Solomon instances start from the benchmark preset.
pub fn resolve_params(
    format: InstanceFormat,
    overlay: Option<&Path>,
    iterations: Option<usize>,
    objective: Objective,
) -> Result<ControlParams> {
    let mut p = match format {
        InstanceFormat::Extended => ControlParams::default(),
        _ => ControlParams::benchmark(),
    };
    if let Some(path) = overlay {
        let text = std::fs::read_to_string(path).with_context(|| format!("params: reading {}", path.display()))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).with_context(|| format!("params: parsing {}", path.display()))?;
        p.apply_overlay(&value).with_context(|| format!("params: applying {}", path.display()))?;
    }
    if let Some(n) = iterations {
        p.number_of_iterations = n;
    }
    if objective == Objective::RoutesFirst {
        p.route_charge = ROUTES_FIRST_CHARGE;
    }
    p.validate().context("params")?;
    Ok(p)
}
