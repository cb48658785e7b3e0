use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use hfvrp_advisor::SPLIT_SEED;
use hfvrp_cli::bench::{format_table, load_bks, run_bench, BenchConfig};
use hfvrp_cli::commands::{cmd_predict, cmd_solve, cmd_tune, cmd_validate, SolveArgs, EXIT_ERROR, EXIT_OK};
use hfvrp_cli::config::{resolve_params, InstanceFormat, Objective, CONFIG_ENV};

#[derive(Parser)]
#[command(name = "hfvrp", version, about = "Heterogeneous-fleet vehicle routing with time windows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ParamArgs {
    /// JSON object overriding control parameters.
    #[arg(long, env = CONFIG_ENV)]
    params: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Objective::CostFirst)]
    objective: Objective,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = InstanceFormat::Auto)]
        format: InstanceFormat,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tabu search iterations.
        #[arg(long)]
        iterations: Option<usize>,
        #[command(flatten)]
        params: ParamArgs,
        /// CSV with one row per tabu iteration.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Solution file; `.json` gets the machine-readable document, anything else text.
        #[arg(long)]
        out: Option<PathBuf>,
        /// GeoJSON of the routes.
        #[arg(long)]
        geo_out: Option<PathBuf>,
        /// Stop the tabu search after this many seconds.
        #[arg(long)]
        time_limit: Option<f64>,
    },
    /// Check a solution document against an instance.
    Validate {
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = InstanceFormat::Auto)]
        format: InstanceFormat,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Solve Solomon/Homberger files and compare with best-known solutions.
    Bench {
        instances: Vec<PathBuf>,
        /// `name cost vehicles` table; defaults to the bundled one.
        #[arg(long)]
        bks: Option<PathBuf>,
        /// Seeds 0..N are tried per instance; the best run is reported.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long)]
        iterations: Option<usize>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        time_limit: Option<f64>,
        /// Machine-readable table.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Fit parameter models on a run history.
    Tune {
        #[arg(long)]
        history: PathBuf,
        /// Model store to write.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = SPLIT_SEED)]
        seed: u64,
    },
    /// Predict a parameter overlay for an instance.
    Predict {
        #[arg(long)]
        models: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = InstanceFormat::Auto)]
        format: InstanceFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Solve { instance, format, seed, iterations, params, trace, out, geo_out, time_limit } => {
            cmd_solve(&SolveArgs {
                instance,
                format,
                seed,
                iterations,
                params: params.params,
                trace,
                out,
                geo_out,
                objective: params.objective,
                time_limit,
            })
        }
        Command::Validate { solution, instance, format, params } => {
            cmd_validate(&solution, &instance, format, params.params.as_deref(), params.objective)
        }
        Command::Bench { instances, bks, seeds, iterations, params, time_limit, json, jobs } => {
            let bks = load_bks(bks.as_deref())?;
            let p = resolve_params(InstanceFormat::Solomon, params.params.as_deref(), iterations, params.objective)?;
            let seeds: Vec<u64> = (0..seeds.max(1)).collect();
            let table = run_bench(&instances, &bks, &BenchConfig { params: &p, seeds: &seeds, time_limit, jobs });
            print!("{}", format_table(&table));
            if let Some(path) = json {
                std::fs::write(&path, serde_json::to_string_pretty(&table)?)?;
            }
            Ok(EXIT_OK)
        }
        Command::Tune { history, out, report, seed } => cmd_tune(&history, &out, report.as_deref(), seed),
        Command::Predict { models, instance, format, out } => cmd_predict(&models, &instance, format, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
