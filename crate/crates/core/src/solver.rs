//! The full pipeline: preparation, the four optimisation steps and the final audit.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::construct::{assign_vehicles, init_singleton_routes, run_savings_construction};
use crate::cost::{solution_components, CostComponents, CostMode};
use crate::eliminate::eliminate_routes;
use crate::error::Result;
use crate::intra::improve_route_traced;
use crate::model::{validate_solution, FeasibilityReport, ProblemInstance, Solution};
use crate::params::ControlParams;
use crate::tabu::{run_tabu, TraceRow};
use crate::transform::{
    apply_service_time_transform, clip_windows_to_depot, invert_service_time_transform, plan_split_deliveries,
    SplitOutcome, SplitPlan,
};

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub seed: u64,
    /// Stop the tabu search early at this instant.
    pub deadline: Option<Instant>,
    /// Keep one row per tabu iteration.
    pub keep_trace: bool,
    /// Largest block the intra-route step moves.
    pub max_block: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { seed: 0, deadline: None, keep_trace: false, max_block: 3 }
    }
}

/// Cost histories of each step, in that step's own cost mode.
#[derive(Debug, Clone, Default)]
pub struct SolveTraces {
    pub savings: Vec<f64>,
    pub elimination: Vec<f64>,
    /// `(infeasible, cost)` of the tabu incumbent per iteration.
    pub tabu_best: Vec<(bool, f64)>,
    pub tabu: Vec<TraceRow>,
    /// Per route, full cost after each accepted intra-route move.
    pub intra: Vec<Vec<f64>>,
    pub tabu_iterations: usize,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    /// Input after depot clipping and split planning, in the original time frame. Routes
    /// index its customers.
    pub instance: ProblemInstance,
    pub solution: Solution,
    pub report: FeasibilityReport,
    pub components: CostComponents,
    pub splits: Vec<SplitPlan>,
    pub traces: SolveTraces,
}

/// Depot clipping and split planning: the instance a solution's routes refer to.
pub fn prepare(inst: &ProblemInstance, params: &ControlParams) -> Result<SplitOutcome> {
    params.validate()?;
    plan_split_deliveries(&clip_windows_to_depot(inst)?, params)
}

pub fn solve(inst: &ProblemInstance, params: &ControlParams, opts: &SolveOptions) -> Result<SolveOutcome> {
    let split = prepare(inst, params)?;
    let (work, record) = apply_service_time_transform(&split.instance)?;
    let skip: Vec<bool> = (0..work.customers.len()).map(|c| split.is_trip(c)).collect();
    let mut traces = SolveTraces::default();

    let savings = run_savings_construction(init_singleton_routes(&work, &skip), &work, params);
    traces.savings = savings.cost_trace;
    let assigned = assign_vehicles(&savings.routes, &work, params);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let elim = eliminate_routes(assigned, &work, params, &mut rng);
    traces.elimination = elim.cost_trace;
    let tabu = run_tabu(elim.routes, &work, params, opts.deadline, opts.keep_trace);
    traces.tabu_best = tabu.best_trace;
    traces.tabu = tabu.trace;
    traces.tabu_iterations = tabu.iterations;
    let mut routes = Vec::with_capacity(tabu.routes.len());
    for r in &tabu.routes {
        let (better, trace) = improve_route_traced(r, &work, params, opts.max_block);
        routes.push(better);
        traces.intra.push(trace);
    }

    let solution = Solution { routes, pre_routes: split.pre_routes() };
    let (solution, instance) = invert_service_time_transform(&solution, &work, &record)?;
    let report = validate_solution(&solution, &instance, params)?;
    let components = solution_components(&solution, &instance, params, CostMode::Full)?;
    Ok(SolveOutcome { instance, solution, report, components, splits: split.plans, traces })
}
