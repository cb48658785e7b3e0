//! solve, validate, tune and predict.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use hfvrp::features::instance_features;
use hfvrp::io::{parse_solution_json, solution_from_doc, write_solution_geojson, write_solution_json, write_solution_text};
use hfvrp::model::validate_solution;
use hfvrp::{prepare, solve, SolveOptions};
use hfvrp_advisor::{build_training_table, load_history, overlay_json, predict_params, select_models, ModelStore};

use crate::config::{load_instance, resolve_params, InstanceFormat, Objective};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATIONS: i32 = 2;

#[derive(Debug, Clone)]
pub struct SolveArgs {
    pub instance: PathBuf,
    pub format: InstanceFormat,
    pub seed: u64,
    pub iterations: Option<usize>,
    pub params: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub geo_out: Option<PathBuf>,
    pub objective: Objective,
    pub time_limit: Option<f64>,
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn deadline(seconds: Option<f64>) -> Result<Option<Instant>> {
    match seconds {
        None => Ok(None),
        Some(s) if s.is_finite() && s >= 0.0 => Ok(Some(Instant::now() + Duration::from_secs_f64(s))),
        Some(s) => bail!("--time-limit must be a non-negative number of seconds, got {s}"),
    }
}

pub fn cmd_solve(a: &SolveArgs) -> Result<i32> {
    let (inst, format) = load_instance(&a.instance, a.format)?;
    let params = resolve_params(format, a.params.as_deref(), a.iterations, a.objective)?;
    let opts = SolveOptions {
        seed: a.seed,
        deadline: deadline(a.time_limit)?,
        keep_trace: a.trace.is_some(),
        ..SolveOptions::default()
    };
    let out = solve(&inst, &params, &opts).context("solver")?;
    let text = write_solution_text(&out.solution, &out.instance, &params)?;
    match &a.out {
        Some(path) if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => {
            write_file(path, &write_solution_json(&out.solution, &out.instance, &params)?)?
        }
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    if let Some(path) = &a.geo_out {
        write_file(path, &write_solution_geojson(&out.solution, &out.instance)?)?;
    }
    if let Some(path) = &a.trace {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(["iteration", "current", "best", "move"])?;
        for r in &out.traces.tabu {
            w.write_record([r.iteration.to_string(), r.current.to_string(), r.best.to_string(), r.kind.to_string()])?;
        }
        w.flush()?;
    }
    let used = out.solution.routes.iter().filter(|r| !r.is_empty()).count();
    println!(
        "{}: total {:.4}, {} routes, {} tabu iterations",
        inst.name, out.components.total, used, out.traces.tabu_iterations
    );
    print!("{}", out.report);
    Ok(if out.report.feasible { EXIT_OK } else { EXIT_VIOLATIONS })
}

pub fn cmd_validate(
    solution: &Path,
    instance: &Path,
    format: InstanceFormat,
    params: Option<&Path>,
    objective: Objective,
) -> Result<i32> {
    let (inst, format) = load_instance(instance, format)?;
    let params = resolve_params(format, params, None, objective)?;
    let text = std::fs::read_to_string(solution).with_context(|| format!("reading {}", solution.display()))?;
    let doc = parse_solution_json(&text).with_context(|| format!("instance-io: parsing {}", solution.display()))?;
    let prepared = prepare(&inst, &params).context("transform")?.instance;
    let sol = solution_from_doc(&doc, &prepared).context("validate")?;
    let report = validate_solution(&sol, &prepared, &params).context("validate")?;
    print!("{report}");
    Ok(if report.feasible { EXIT_OK } else { EXIT_VIOLATIONS })
}

/// Text report: per-target confidences and the attribute ranking averaged over targets.
pub fn tune_report(store: &ModelStore) -> String {
    let mut s = String::from("target                     linear%   kernel%   chosen\n");
    let fmt = |c: Option<f64>| c.map_or("-".to_string(), |v| format!("{v:.3}"));
    for r in &store.report {
        s += &format!("{:<26} {:>8}  {:>8}   {}\n", r.target, fmt(r.linear_confidence), fmt(r.kernel_confidence), r.chosen);
    }
    let mut avg: Vec<(String, f64)> = store
        .inputs
        .iter()
        .map(|name| {
            let v: Vec<f64> = store
                .report
                .iter()
                .filter_map(|r| r.ranking.iter().find(|a| &a.attribute == name).map(|a| a.importance))
                .collect();
            (name.clone(), if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 })
        })
        .collect();
    avg.sort_by(|a, b| b.1.total_cmp(&a.1));
    s += "\nattribute                      rank  importance\n";
    for (i, (name, v)) in avg.iter().enumerate() {
        s += &format!("{name:<30} {:>4}  {v:.3}\n", i + 1);
    }
    s
}

pub fn cmd_tune(history: &Path, out: &Path, report: Option<&Path>, seed: u64) -> Result<i32> {
    let records = load_history(history).with_context(|| format!("param-advisor: reading {}", history.display()))?;
    let table = build_training_table(&records).context("param-advisor")?;
    let store = select_models(&table, seed).context("param-advisor")?;
    write_file(out, &store.to_json()?)?;
    let text = tune_report(&store);
    match report {
        Some(p) => write_file(p, &text)?,
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

pub fn cmd_predict(models: &Path, instance: &Path, format: InstanceFormat, out: Option<&Path>) -> Result<i32> {
    let text = std::fs::read_to_string(models).with_context(|| format!("reading {}", models.display()))?;
    let store = ModelStore::from_json(&text).with_context(|| format!("param-advisor: parsing {}", models.display()))?;
    let (inst, format) = load_instance(instance, format)?;
    let base = resolve_params(format, None, None, Objective::CostFirst)?;
    let prediction = predict_params(&store, &instance_features(&inst), &base);
    for w in &prediction.warnings {
        eprintln!("warning: {w}");
    }
    let json = serde_json::to_string_pretty(&overlay_json(&prediction))?;
    match out {
        Some(p) => write_file(p, &json)?,
        None => println!("{json}"),
    }
    Ok(EXIT_OK)
}
