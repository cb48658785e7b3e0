//! Second step: try to empty whole routes by moving their customers into the others.

use rand::Rng;

use crate::cost::{price, CostMode};
use crate::eval::{within_hard_limits, RouteEval};
use crate::model::{ProblemInstance, Route};
use crate::params::ControlParams;

/// Fisher–Yates shuffle of `0..n`.
pub fn uniform_random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        p.swap(i, j);
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub customer: usize,
    pub destination: usize,
    /// Index in the destination route the customer ends up at.
    pub position: usize,
    pub added_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EliminationAttempt {
    pub target: usize,
    pub placements: Vec<Placement>,
    pub total_added: f64,
    pub freed: f64,
}

impl EliminationAttempt {
    pub fn accepted(&self) -> bool {
        self.freed - self.total_added > 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EliminationOutcome {
    pub routes: Vec<Route>,
    pub eliminated: usize,
    /// Second-step cost of the whole route set, initially and after each accepted removal.
    pub cost_trace: Vec<f64>,
}

fn evals(routes: &[Route], inst: &ProblemInstance, params: &ControlParams) -> Vec<RouteEval> {
    routes.iter().map(|r| RouteEval::new(&r.customers, inst.profile(r.vehicle, params), inst)).collect()
}

/// Places the customers of route `target` one after another at their cheapest screened
/// position in the other routes. `None` when some customer fits nowhere.
pub fn plan_elimination(
    routes: &[Route],
    target: usize,
    inst: &ProblemInstance,
    params: &ControlParams,
) -> Option<EliminationAttempt> {
    let mut ev = evals(routes, inst, params);
    let freed = ev[target].price(params, CostMode::Step2).total;
    let mut placements = Vec::new();
    let mut total_added = 0.0;
    for &c in &routes[target].customers {
        let mut best: Option<(f64, usize, usize)> = None;
        for (d, e) in ev.iter().enumerate() {
            if d == target {
                continue;
            }
            let base = e.price(params, CostMode::Step2).total;
            for p in 0..=e.len() {
                let t = e.with_inserted(p, c, inst);
                if !within_hard_limits(&t, &e.vehicle, inst) {
                    continue;
                }
                let added = price(&t, &e.vehicle, params, CostMode::Step2).total - base;
                if best.map_or(true, |b| added < b.0) {
                    best = Some((added, d, p));
                }
            }
        }
        let (added, d, p) = best?;
        let mut seq = ev[d].customers().to_vec();
        seq.insert(p, c);
        ev[d] = RouteEval::new(&seq, ev[d].vehicle, inst);
        total_added += added;
        placements.push(Placement { customer: c, destination: d, position: p, added_cost: added });
    }
    Some(EliminationAttempt { target, placements, total_added, freed })
}

fn commit(routes: &mut Vec<Route>, attempt: &EliminationAttempt) {
    for pl in &attempt.placements {
        routes[pl.destination].customers.insert(pl.position, pl.customer);
    }
    routes.remove(attempt.target);
}

/// Runs up to `elimination_iterations` rounds, each scanning a fresh random order of the
/// routes and committing the first removal that lowers the second-step cost. Stops early
/// once a full scan removes nothing.
pub fn eliminate_routes<R: Rng + ?Sized>(
    mut routes: Vec<Route>,
    inst: &ProblemInstance,
    params: &ControlParams,
    rng: &mut R,
) -> EliminationOutcome {
    let total = |routes: &[Route]| -> f64 {
        evals(routes, inst, params).iter().map(|e| e.price(params, CostMode::Step2).total).sum()
    };
    let mut trace = vec![total(&routes)];
    let mut eliminated = 0;
    for _ in 0..params.elimination_iterations {
        let order = uniform_random_permutation(routes.len(), rng);
        let mut removed = false;
        for r in order {
            if let Some(attempt) = plan_elimination(&routes, r, inst, params) {
                if attempt.accepted() {
                    commit(&mut routes, &attempt);
                    eliminated += 1;
                    trace.push(total(&routes));
                    removed = true;
                    break;
                }
            }
        }
        if !removed {
            break;
        }
    }
    EliminationOutcome { routes, eliminated, cost_trace: trace }
}
