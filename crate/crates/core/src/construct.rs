//! First step: savings construction that inserts whole routes (optionally reversed)
//! into other routes, followed by the initial vehicle assignment.

use crate::assign::{solve_exact, solve_greedy, AssignmentProblem};
use crate::cost::{price, CostMode, RouteTotals};
use crate::eval::{sequence_totals, within_hard_limits, RouteEval};
use crate::model::{ProblemInstance, Route, VehicleProfile, VehicleRef};
use crate::params::ControlParams;

/// Merges stop once the best savings fall below this.
pub const MIN_SAVINGS: f64 = 0.01;

/// One depot → customer → depot route for every customer not flagged in `skip`.
pub fn init_singleton_routes(inst: &ProblemInstance, skip: &[bool]) -> Vec<Route> {
    (0..inst.customers.len()).filter(|&c| !skip.get(c).copied().unwrap_or(false)).map(Route::singleton).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeCandidate {
    pub host: usize,
    pub guest: usize,
    /// Insert after host index `position`; -1 prepends.
    pub position: isize,
    pub inverted: bool,
    pub savings: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SavingsOutcome {
    pub routes: Vec<Route>,
    pub merges: usize,
    /// Total first-step cost after each merge, starting with the initial routes.
    pub cost_trace: Vec<f64>,
}

/// Costing and screening of first-step routes, which have no vehicle yet.
pub struct Savings<'a> {
    inst: &'a ProblemInstance,
    params: &'a ControlParams,
    by_cost: Vec<usize>,
    open: VehicleProfile,
    /// Number of vehicles serving exactly one customer of each pair.
    diff: Vec<u32>,
}

impl<'a> Savings<'a> {
    pub fn new(inst: &'a ProblemInstance, params: &'a ControlParams) -> Self {
        let mut by_cost: Vec<usize> = (0..inst.fleet.len()).collect();
        by_cost.sort_by(|&a, &b| inst.fleet[a].variable_cost.total_cmp(&inst.fleet[b].variable_cost).then(a.cmp(&b)));
        let n = inst.customers.len();
        let mut diff = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let (sa, sb) = (&inst.customers[a].admissible_vehicles, &inst.customers[b].admissible_vehicles);
                diff[a * n + b] = sa.symmetric_difference(sb).count() as u32;
            }
        }
        Self { inst, params, by_cost, open: inst.profile(None, params), diff }
    }

    /// Cheapest vehicle whose capacity covers the load, falling back to the fictitious one.
    fn cheapest_fitting(&self, weight: f64, volume: f64) -> VehicleProfile {
        self.by_cost
            .iter()
            .find(|&&v| weight <= self.inst.fleet[v].max_weight && volume <= self.inst.fleet[v].max_volume)
            .map_or(self.open, |&v| self.inst.profile(Some(VehicleRef::Fleet(v)), self.params))
    }

    fn cost_of(&self, t: &RouteTotals) -> f64 {
        price(t, &self.cheapest_fitting(t.weight, t.volume), self.params, CostMode::Step1).total
    }

    /// First-step cost of a customer sequence.
    pub fn route_cost(&self, customers: &[usize]) -> f64 {
        self.cost_of(&sequence_totals(customers, &self.open, self.inst))
    }

    /// Route within the biggest capacities, without delay, back before the depot closes.
    pub fn is_feasible(&self, customers: &[usize]) -> bool {
        within_hard_limits(&sequence_totals(customers, &self.open, self.inst), &self.open, self.inst)
    }

    pub fn similarity(&self, host: &[usize], guest: &[usize]) -> f64 {
        if host.is_empty() && guest.is_empty() {
            return 0.0;
        }
        let n = self.inst.customers.len();
        let differences: u32 = host.iter().flat_map(|&a| guest.iter().map(move |&b| self.diff[a * n + b])).sum();
        self.params.savings_similarity_factor * f64::from(differences) / (host.len() + guest.len()) as f64
    }

    /// Penalised savings of inserting `guest` (reversed when `inverted`) after host index
    /// `position`, or `None` when the merged route fails the screen.
    pub fn merge_savings(&self, host: &[usize], guest: &[usize], position: isize, inverted: bool) -> Option<f64> {
        if std::ptr::eq(host, guest) || position < -1 || position >= host.len() as isize {
            return None;
        }
        let merged = merged_sequence(host, guest, position, inverted);
        if !self.is_feasible(&merged) {
            return None;
        }
        Some(self.route_cost(host) + self.route_cost(guest) - self.route_cost(&merged) - self.similarity(host, guest))
    }
}

fn merged_sequence(host: &[usize], guest: &[usize], position: isize, inverted: bool) -> Vec<usize> {
    let at = (position + 1) as usize;
    let mut out = host[..at].to_vec();
    if inverted {
        out.extend(guest.iter().rev());
    } else {
        out.extend(guest);
    }
    out.extend(&host[at..]);
    out
}

struct Working {
    customers: Vec<usize>,
    reversed: Vec<usize>,
    eval: RouteEval,
    cost: f64,
}

#[derive(Clone, Copy)]
struct PairBest {
    savings: f64,
    lower_is_host: bool,
    inverted: bool,
    position: isize,
}

impl Savings<'_> {
    fn working(&self, customers: Vec<usize>) -> Working {
        let eval = RouteEval::new(&customers, self.open, self.inst);
        let cost = self.cost_of(eval.totals());
        let reversed = customers.iter().rev().copied().collect();
        Working { customers, reversed, eval, cost }
    }

    /// Best merge of two routes, scanning the four insertion forms in a fixed order and
    /// keeping the first strict maximum.
    fn best_pair(&self, lo: &Working, hi: &Working) -> Option<PairBest> {
        let sim = self.similarity(&lo.customers, &hi.customers);
        let forms: [(&Working, &Working, &[usize], bool, bool); 4] = [
            (lo, hi, &hi.customers, true, false),
            (hi, lo, &lo.customers, false, false),
            (lo, hi, &hi.reversed, true, true),
            (hi, lo, &lo.reversed, false, true),
        ];
        let mut best: Option<PairBest> = None;
        for (host, guest, seq, lower_is_host, inverted) in forms {
            for p in 0..=host.customers.len() {
                let t = host.eval.splice(p, seq, p + 1, self.inst);
                if !within_hard_limits(&t, &self.open, self.inst) {
                    continue;
                }
                let s = host.cost + guest.cost - self.cost_of(&t) - sim;
                if best.map_or(true, |b| b.savings < s) {
                    best = Some(PairBest { savings: s, lower_is_host, inverted, position: p as isize - 1 });
                }
            }
        }
        best
    }
}

/// Repeatedly executes the best merge until none saves at least [`MIN_SAVINGS`].
pub fn run_savings_construction(routes: Vec<Route>, inst: &ProblemInstance, params: &ControlParams) -> SavingsOutcome {
    let sv = Savings::new(inst, params);
    let mut slots: Vec<Option<Working>> = routes.into_iter().map(|r| Some(sv.working(r.customers))).collect();
    let k = slots.len();
    let mut pairs: Vec<Option<PairBest>> = vec![None; k * k];
    for i in 0..k {
        for j in i + 1..k {
            pairs[i * k + j] = sv.best_pair(slots[i].as_ref().unwrap(), slots[j].as_ref().unwrap());
        }
    }
    let total = |slots: &[Option<Working>]| slots.iter().flatten().map(|w| w.cost).sum::<f64>();
    let mut trace = vec![total(&slots)];
    let mut merges = 0;
    loop {
        let mut best: Option<(usize, usize, PairBest)> = None;
        for i in 0..k {
            if slots[i].is_none() {
                continue;
            }
            for j in i + 1..k {
                if slots[j].is_none() {
                    continue;
                }
                if let Some(c) = pairs[i * k + j] {
                    if best.map_or(true, |(_, _, b)| b.savings < c.savings) {
                        best = Some((i, j, c));
                    }
                }
            }
        }
        let Some((i, j, c)) = best else { break };
        if c.savings < MIN_SAVINGS {
            break;
        }
        let (host, guest) = if c.lower_is_host { (i, j) } else { (j, i) };
        let g = slots[guest].take().unwrap();
        let h = slots[host].take().unwrap();
        let merged = merged_sequence(&h.customers, &g.customers, c.position, c.inverted);
        slots[host] = Some(sv.working(merged));
        merges += 1;
        for x in 0..k {
            if x == host || slots[x].is_none() {
                continue;
            }
            let (lo, hi) = (x.min(host), x.max(host));
            pairs[lo * k + hi] = sv.best_pair(slots[lo].as_ref().unwrap(), slots[hi].as_ref().unwrap());
        }
        trace.push(total(&slots));
    }
    SavingsOutcome {
        routes: slots.into_iter().flatten().map(|w| Route::new(w.customers, None)).collect(),
        merges,
        cost_trace: trace,
    }
}

/// Builds the per-(route, vehicle) table used by the first two steps: second-step costs,
/// and a vehicle is allowed only if the route fits it without overload, delay or overtime.
pub fn screened_assignment_problem(routes: &[Route], inst: &ProblemInstance, params: &ControlParams) -> AssignmentProblem {
    let fictitious = inst.profile(Some(VehicleRef::Fictitious), params);
    let mut fleet_cost = Vec::with_capacity(routes.len());
    let mut fictitious_cost = Vec::with_capacity(routes.len());
    for r in routes {
        let row = (0..inst.fleet.len())
            .map(|v| {
                let prof = inst.profile(Some(VehicleRef::Fleet(v)), params);
                let t = sequence_totals(&r.customers, &prof, inst);
                within_hard_limits(&t, &prof, inst).then(|| price(&t, &prof, params, CostMode::Step2).total)
            })
            .collect();
        fleet_cost.push(row);
        let t = sequence_totals(&r.customers, &fictitious, inst);
        fictitious_cost.push(price(&t, &fictitious, params, CostMode::Step2).total);
    }
    AssignmentProblem { fleet_cost, fictitious_cost }
}

/// Gives every route a vehicle: exact matching for small fleets, otherwise the
/// longest-route-first greedy rule. Routes no real vehicle can take get the fictitious one.
pub fn assign_vehicles(routes: &[Route], inst: &ProblemInstance, params: &ControlParams) -> Vec<Route> {
    let problem = screened_assignment_problem(routes, inst, params);
    let choice = if inst.fleet.len() < params.brute_force_fleet_limit {
        solve_exact(&problem)
    } else {
        let open = inst.profile(None, params);
        let lengths: Vec<f64> = routes.iter().map(|r| sequence_totals(&r.customers, &open, inst).distance).collect();
        let costs: Vec<f64> = inst.fleet.iter().map(|v| v.variable_cost).collect();
        solve_greedy(&lengths, &costs, |r, v| problem.fleet_cost[r][v].is_some())
    };
    routes.iter().zip(choice).map(|(r, v)| Route::new(r.customers.clone(), Some(v))).collect()
}
