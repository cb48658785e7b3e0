//! Third step: tabu search over RELOCATE and SWAP moves between routes, with frequency
//! based diversification, pair-best aspiration and periodic vehicle reassignment.

use std::time::Instant;

use serde::Serialize;

use crate::assign::{solve_exact, AssignmentProblem};
use crate::cost::{price, CostMode, RouteTotals};
use crate::eval::{sequence_totals, RouteEval};
use crate::model::{ProblemInstance, Route, VehicleProfile, VehicleRef};
use crate::params::{Aspiration, ControlParams};

const EPS: f64 = 1e-6;

/// Relative margin a tabu move must beat the pair's best cost by. Re-entering an
/// earlier solution reproduces its cost up to rounding, which must not count as better.
pub const ASPIRATION_MARGIN: f64 = 1e-9;

/// A move improves only when it lowers `current` by more than rounding noise; anything else
/// pays the diversification term.
pub fn improves(delta: f64, current: f64) -> bool {
    delta < -ASPIRATION_MARGIN * current.abs().max(1.0)
}

/// Aspiration test: `cost` beats `pair_best` by more than rounding noise.
pub fn aspires(cost: f64, pair_best: f64) -> bool {
    if pair_best.is_infinite() {
        return cost < pair_best;
    }
    cost < pair_best - ASPIRATION_MARGIN * pair_best.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    Relocate,
    Swap,
}

impl std::fmt::Display for MoveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MoveKind::Relocate => "relocate",
            MoveKind::Swap => "swap",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Move {
    /// `customer` leaves slot `from` and is inserted into slot `to` at index `position`.
    Relocate { customer: usize, from: usize, to: usize, position: usize, delta: f64, penalized: f64, aspirated: bool },
    /// `first` (in `first_slot`) and `second` (in `second_slot`) trade places.
    Swap {
        first: usize,
        second: usize,
        first_slot: usize,
        second_slot: usize,
        delta: f64,
        penalized: f64,
        aspirated: bool,
    },
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match self {
            Move::Relocate { .. } => MoveKind::Relocate,
            Move::Swap { .. } => MoveKind::Swap,
        }
    }

    /// Change of the full solution cost.
    pub fn delta(&self) -> f64 {
        match *self {
            Move::Relocate { delta, .. } | Move::Swap { delta, .. } => delta,
        }
    }

    /// Delta plus the diversification term used for selection.
    pub fn penalized(&self) -> f64 {
        match *self {
            Move::Relocate { penalized, .. } | Move::Swap { penalized, .. } => penalized,
        }
    }

    pub fn aspirated(&self) -> bool {
        match *self {
            Move::Relocate { aspirated, .. } | Move::Swap { aspirated, .. } => aspirated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub current: f64,
    pub best: f64,
    pub kind: MoveKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabuOutcome {
    /// Non-empty routes of the best solution.
    pub routes: Vec<Route>,
    pub cost: f64,
    pub feasible: bool,
    pub iterations: usize,
    /// `(infeasible, cost)` of the best solution after each iteration.
    pub best_trace: Vec<(bool, f64)>,
    pub trace: Vec<TraceRow>,
}

/// True when a route breaks no hard constraint under its vehicle.
pub fn route_is_clean(t: &RouteTotals, vehicle: VehicleRef, profile: &VehicleProfile, inst: &ProblemInstance) -> bool {
    if t.stops == 0 {
        return true;
    }
    let VehicleRef::Fleet(v) = vehicle else { return false };
    let latest = inst.depot.close.min(inst.fleet[v].shift_end);
    t.weight <= profile.max_weight + EPS
        && t.volume <= profile.max_volume + EPS
        && t.delay <= EPS
        && t.inadmissible == 0
        && t.return_time <= latest + EPS
}

#[derive(Debug, Clone)]
struct Slot {
    eval: RouteEval,
    vehicle: VehicleRef,
    cost: f64,
    clean: bool,
}

/// Search state over a fixed set of route slots: the input routes plus one empty slot per
/// real vehicle that drives nothing. Tabu, frequency and pair-best tables are indexed by
/// (customer, slot).
pub struct TabuSearch<'a> {
    inst: &'a ProblemInstance,
    params: &'a ControlParams,
    slots: Vec<Slot>,
    /// Equivalence class of each vehicle; fictitious is `fleet.len()`.
    class: Vec<usize>,
    members: Vec<usize>,
    slot_of: Vec<usize>,
    pos_of: Vec<usize>,
    n: usize,
    k: usize,
    ins_delta: Vec<f64>,
    ins_pos: Vec<u32>,
    rem: Vec<f64>,
    rep: Vec<f64>,
    dirty: Vec<bool>,
    tabu_until: Vec<usize>,
    count: Vec<u32>,
    best_pair: Vec<f64>,
    iteration: usize,
    current: f64,
    best_key: (bool, f64),
    best_routes: Vec<Route>,
}

impl<'a> TabuSearch<'a> {
    pub fn new(routes: Vec<Route>, inst: &'a ProblemInstance, params: &'a ControlParams) -> Self {
        let n = inst.customers.len();
        let nf = inst.fleet.len();
        let class: Vec<usize> = (0..nf)
            .map(|i| {
                (0..i)
                    .find(|&j| {
                        inst.fleet[i].same_profile(&inst.fleet[j])
                            && (0..n).all(|c| inst.admits(Some(i), c) == inst.admits(Some(j), c))
                    })
                    .unwrap_or(i)
            })
            .chain(std::iter::once(nf))
            .collect();
        let mut used = vec![false; nf];
        let mut plan: Vec<(Vec<usize>, VehicleRef)> = Vec::new();
        for r in routes {
            let v = r.vehicle.unwrap_or(VehicleRef::Fictitious);
            if let VehicleRef::Fleet(i) = v {
                used[i] = true;
            }
            plan.push((r.customers, v));
        }
        for (i, u) in used.iter().enumerate() {
            if !u {
                plan.push((Vec::new(), VehicleRef::Fleet(i)));
            }
        }
        let k = plan.len();
        let mut ts = TabuSearch {
            inst,
            params,
            slots: Vec::with_capacity(k),
            class,
            members: Vec::new(),
            slot_of: vec![usize::MAX; n],
            pos_of: vec![usize::MAX; n],
            n,
            k,
            ins_delta: vec![0.0; n * k],
            ins_pos: vec![0; n * k],
            rem: vec![0.0; n],
            rep: vec![0.0; n * n],
            dirty: vec![true; k],
            tabu_until: vec![0; n * k],
            count: vec![0; n * k],
            best_pair: vec![f64::INFINITY; n * k],
            iteration: 0,
            current: 0.0,
            best_key: (true, f64::INFINITY),
            best_routes: Vec::new(),
        };
        for (s, (customers, v)) in plan.into_iter().enumerate() {
            ts.members.extend(&customers);
            let slot = ts.make_slot(&customers, v);
            ts.slots.push(slot);
            ts.reindex(s);
        }
        ts.current = ts.total();
        ts.record();
        ts
    }

    fn class_of(&self, v: VehicleRef) -> usize {
        match v {
            VehicleRef::Fleet(i) => self.class[i],
            VehicleRef::Fictitious => self.inst.fleet.len(),
        }
    }

    fn make_slot(&self, customers: &[usize], vehicle: VehicleRef) -> Slot {
        let profile = self.inst.profile(Some(vehicle), self.params);
        let eval = RouteEval::new(customers, profile, self.inst);
        let cost = eval.price(self.params, CostMode::Full).total;
        let clean = route_is_clean(eval.totals(), vehicle, &profile, self.inst);
        Slot { eval, vehicle, cost, clean }
    }

    fn reindex(&mut self, s: usize) {
        for (p, &c) in self.slots[s].eval.customers().iter().enumerate() {
            self.slot_of[c] = s;
            self.pos_of[c] = p;
        }
    }

    fn total(&self) -> f64 {
        self.slots.iter().map(|s| s.cost).sum()
    }

    fn full_cost(&self, t: &RouteTotals, profile: &VehicleProfile) -> f64 {
        price(t, profile, self.params, CostMode::Full).total
    }

    /// Recomputes insertion, removal and replacement deltas touching changed slots.
    fn refresh(&mut self) {
        let (n, k) = (self.n, self.k);
        for s in 0..k {
            if !std::mem::replace(&mut self.dirty[s], false) {
                continue;
            }
            let slot = &self.slots[s];
            let (ev, base) = (&slot.eval, slot.cost);
            for (p, &y) in ev.customers().iter().enumerate() {
                self.rem[y] = self.full_cost(&ev.without(p + 1, self.inst), &ev.vehicle) - base;
                for &x in &self.members {
                    if self.slot_of[x] != s {
                        let t = ev.with_replaced(p + 1, x, self.inst);
                        self.rep[x * n + y] = self.full_cost(&t, &ev.vehicle) - base;
                    }
                }
            }
            for &x in &self.members {
                if self.slot_of[x] == s {
                    continue;
                }
                let mut best = (f64::INFINITY, 0u32);
                for p in 0..=ev.len() {
                    let d = self.full_cost(&ev.with_inserted(p, x, self.inst), &ev.vehicle) - base;
                    if d < best.0 {
                        best = (d, p as u32);
                    }
                }
                self.ins_delta[x * k + s] = best.0;
                self.ins_pos[x * k + s] = best.1;
            }
        }
    }

    fn diversification(&self, count: u32) -> f64 {
        let routes = self.slots.iter().filter(|s| !s.eval.is_empty()).count();
        self.params.lambda * f64::from(count) * self.current * ((self.members.len() * routes) as f64).sqrt()
    }

    pub fn is_tabu(&self, customer: usize, slot: usize) -> bool {
        self.tabu_until[customer * self.k + slot] > self.iteration
    }

    /// Iterations the pair stays forbidden.
    pub fn tabu_remaining(&self, customer: usize, slot: usize) -> usize {
        self.tabu_until[customer * self.k + slot].saturating_sub(self.iteration)
    }

    pub fn inclusions(&self, customer: usize, slot: usize) -> u32 {
        self.count[customer * self.k + slot]
    }

    pub fn best_pair_cost(&self, customer: usize, slot: usize) -> f64 {
        self.best_pair[customer * self.k + slot]
    }

    /// Marks a pair as forbidden for the next `iterations` iterations.
    pub fn set_tabu(&mut self, customer: usize, slot: usize, iterations: usize) {
        self.tabu_until[customer * self.k + slot] = self.iteration + iterations;
    }

    pub fn set_best_pair_cost(&mut self, customer: usize, slot: usize, cost: f64) {
        self.best_pair[customer * self.k + slot] = cost;
    }

    pub fn set_inclusions(&mut self, customer: usize, slot: usize, count: u32) {
        self.count[customer * self.k + slot] = count;
    }

    /// Diversification term a non-improving move entering the pair would pay.
    pub fn diversification_penalty(&self, customer: usize, slot: usize) -> f64 {
        self.diversification(self.inclusions(customer, slot))
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn current_cost(&self) -> f64 {
        self.current
    }

    pub fn current_is_feasible(&self) -> bool {
        self.slots.iter().all(|s| s.clean)
    }

    /// All slots, empty ones included, in slot order.
    pub fn slots(&self) -> Vec<Route> {
        self.slots.iter().map(|s| Route::new(s.eval.customers().to_vec(), Some(s.vehicle))).collect()
    }

    /// `(infeasible, cost)` of the best solution so far.
    pub fn best_key(&self) -> (bool, f64) {
        self.best_key
    }

    pub fn best_routes(&self) -> &[Route] {
        &self.best_routes
    }

    /// Largest gap between a cached slot cost and a from-scratch evaluation.
    pub fn cache_error(&self) -> f64 {
        self.slots
            .iter()
            .map(|s| {
                let prof = self.inst.profile(Some(s.vehicle), self.params);
                let t = sequence_totals(s.eval.customers(), &prof, self.inst);
                (self.full_cost(&t, &prof) - s.cost).abs()
            })
            .fold(0.0, f64::max)
    }

    fn is_null_relocate(&self, from: usize, to: usize) -> bool {
        let (a, b) = (&self.slots[from], &self.slots[to]);
        a.eval.len() == 1 && b.eval.is_empty() && self.class_of(a.vehicle) == self.class_of(b.vehicle)
    }

    /// Best admissible RELOCATE by penalized delta.
    pub fn best_relocate(&mut self) -> Option<Move> {
        self.refresh();
        let k = self.k;
        let mut best: Option<Move> = None;
        for &c in &self.members {
            let from = self.slot_of[c];
            for to in 0..k {
                if to == from || self.is_null_relocate(from, to) {
                    continue;
                }
                let delta = self.ins_delta[c * k + to] + self.rem[c];
                let mut aspirated = false;
                if self.is_tabu(c, to) {
                    if self.params.aspiration == Aspiration::PairBest
                        && aspires(self.current + delta, self.best_pair[c * k + to])
                    {
                        aspirated = true;
                    } else {
                        continue;
                    }
                }
                let penalized = if improves(delta, self.current) {
                    delta
                } else {
                    delta + self.diversification(self.count[c * k + to])
                };
                if best.map_or(true, |b| penalized < b.penalized()) {
                    let position = self.ins_pos[c * k + to] as usize;
                    best = Some(Move::Relocate { customer: c, from, to, position, delta, penalized, aspirated });
                }
            }
        }
        best
    }

    /// Best admissible SWAP by penalized delta. A swap is forbidden only when both
    /// customers would enter tabu pairs.
    pub fn best_swap(&mut self) -> Option<Move> {
        self.refresh();
        let (n, k) = (self.n, self.k);
        let mut best: Option<Move> = None;
        for (i, &c1) in self.members.iter().enumerate() {
            let a = self.slot_of[c1];
            for &c2 in &self.members[i + 1..] {
                let b = self.slot_of[c2];
                if a == b {
                    continue;
                }
                let delta = self.rep[c1 * n + c2] + self.rep[c2 * n + c1];
                let mut aspirated = false;
                if self.is_tabu(c1, b) && self.is_tabu(c2, a) {
                    let cost = self.current + delta;
                    if self.params.aspiration == Aspiration::PairBest
                        && aspires(cost, self.best_pair[c1 * k + b])
                        && aspires(cost, self.best_pair[c2 * k + a])
                    {
                        aspirated = true;
                    } else {
                        continue;
                    }
                }
                let penalized = if improves(delta, self.current) {
                    delta
                } else {
                    delta + self.diversification(self.count[c1 * k + b]) + self.diversification(self.count[c2 * k + a])
                };
                if best.map_or(true, |m| penalized < m.penalized()) {
                    best = Some(Move::Swap {
                        first: c1,
                        second: c2,
                        first_slot: a,
                        second_slot: b,
                        delta,
                        penalized,
                        aspirated,
                    });
                }
            }
        }
        best
    }

    fn set_route(&mut self, s: usize, customers: Vec<usize>) {
        self.slots[s] = self.make_slot(&customers, self.slots[s].vehicle);
        self.dirty[s] = true;
        self.reindex(s);
    }

    /// Applies a move exactly as given, updating tabu and frequency tables.
    pub fn apply(&mut self, mv: &Move) {
        let k = self.k;
        let tenure = self.params.tabu_tenure;
        match *mv {
            Move::Relocate { customer, from, to, position, .. } => {
                let mut src = self.slots[from].eval.customers().to_vec();
                src.remove(self.pos_of[customer]);
                let mut dst = self.slots[to].eval.customers().to_vec();
                dst.insert(position, customer);
                self.set_route(from, src);
                self.set_route(to, dst);
                self.tabu_until[customer * k + from] = self.iteration + 1 + tenure;
                self.count[customer * k + to] += 1;
                self.current = self.total();
                self.greedy_reassign();
            }
            Move::Swap { first, second, first_slot, second_slot, .. } => {
                let mut ra = self.slots[first_slot].eval.customers().to_vec();
                let mut rb = self.slots[second_slot].eval.customers().to_vec();
                ra[self.pos_of[first]] = second;
                rb[self.pos_of[second]] = first;
                self.set_route(first_slot, ra);
                self.set_route(second_slot, rb);
                for (c, s) in [(first, second_slot), (second, first_slot)] {
                    self.tabu_until[c * k + s] = self.iteration + 1 + tenure / 2;
                    self.count[c * k + s] += 1;
                }
                self.current = self.total();
            }
        }
    }

    /// Changes slot vehicles, keeping the change only if the total does not rise.
    fn try_vehicles(&mut self, vehicles: &[VehicleRef]) -> bool {
        let mut saved = Vec::new();
        for s in 0..self.k {
            if vehicles[s] == self.slots[s].vehicle {
                continue;
            }
            let customers = self.slots[s].eval.customers().to_vec();
            let fresh = self.make_slot(&customers, vehicles[s]);
            saved.push((s, std::mem::replace(&mut self.slots[s], fresh)));
        }
        if saved.is_empty() {
            return true;
        }
        let cost = self.total();
        if cost > self.current + 1e-9 {
            for (s, old) in saved {
                self.slots[s] = old;
            }
            return false;
        }
        for (s, old) in saved {
            if self.class_of(old.vehicle) != self.class_of(self.slots[s].vehicle) {
                self.dirty[s] = true;
            }
        }
        self.current = cost;
        true
    }

    /// Fills empty slots with the vehicles the routes left over, preferring each slot's own.
    fn fill_empty(&self, vehicles: &mut [Option<VehicleRef>]) {
        let mut free = vec![true; self.inst.fleet.len()];
        for v in vehicles.iter().flatten() {
            if let VehicleRef::Fleet(i) = v {
                free[*i] = false;
            }
        }
        for s in 0..self.k {
            if vehicles[s].is_none() {
                if let VehicleRef::Fleet(i) = self.slots[s].vehicle {
                    if free[i] {
                        free[i] = false;
                        vehicles[s] = Some(VehicleRef::Fleet(i));
                    }
                }
            }
        }
        for s in 0..self.k {
            if vehicles[s].is_none() {
                vehicles[s] = Some(match free.iter().position(|f| *f) {
                    Some(i) => {
                        free[i] = false;
                        VehicleRef::Fleet(i)
                    }
                    None => VehicleRef::Fictitious,
                });
            }
        }
    }

    /// Longest route first takes the cheapest free vehicle whose capacities, widened by the
    /// tolerances, cover the load. Rolled back if the total rises.
    pub fn greedy_reassign(&mut self) -> bool {
        let inst = self.inst;
        let mut order: Vec<usize> = (0..self.k).filter(|&s| !self.slots[s].eval.is_empty()).collect();
        order.sort_by(|&a, &b| {
            let (da, db) = (self.slots[a].eval.totals().distance, self.slots[b].eval.totals().distance);
            db.total_cmp(&da).then(a.cmp(&b))
        });
        let mut by_cost: Vec<usize> = (0..inst.fleet.len()).collect();
        by_cost.sort_by(|&a, &b| inst.fleet[a].variable_cost.total_cmp(&inst.fleet[b].variable_cost).then(a.cmp(&b)));
        let mut free = vec![true; inst.fleet.len()];
        let mut chosen: Vec<Option<VehicleRef>> = vec![None; self.k];
        for s in order {
            let t = self.slots[s].eval.totals();
            let fit = by_cost.iter().copied().find(|&v| {
                free[v]
                    && t.weight <= inst.fleet[v].max_weight + self.params.tolerance_weight
                    && t.volume <= inst.fleet[v].max_volume + self.params.tolerance_volume
            });
            chosen[s] = Some(match fit {
                Some(v) => {
                    free[v] = false;
                    VehicleRef::Fleet(v)
                }
                None => VehicleRef::Fictitious,
            });
        }
        self.fill_empty(&mut chosen);
        let vehicles: Vec<VehicleRef> = chosen.into_iter().map(Option::unwrap).collect();
        self.try_vehicles(&vehicles)
    }

    /// Optimal assignment of vehicles to the non-empty slots under the full cost.
    pub fn exact_reassign(&mut self) -> bool {
        let inst = self.inst;
        let nonempty: Vec<usize> = (0..self.k).filter(|&s| !self.slots[s].eval.is_empty()).collect();
        let fictitious = inst.profile(Some(VehicleRef::Fictitious), self.params);
        let mut problem = AssignmentProblem { fleet_cost: Vec::new(), fictitious_cost: Vec::new() };
        for &s in &nonempty {
            let cs = self.slots[s].eval.customers();
            problem.fleet_cost.push(
                (0..inst.fleet.len())
                    .map(|v| {
                        let prof = inst.profile(Some(VehicleRef::Fleet(v)), self.params);
                        Some(self.full_cost(&sequence_totals(cs, &prof, inst), &prof))
                    })
                    .collect(),
            );
            problem.fictitious_cost.push(self.full_cost(&sequence_totals(cs, &fictitious, inst), &fictitious));
        }
        let mut chosen: Vec<Option<VehicleRef>> = vec![None; self.k];
        for (&s, v) in nonempty.iter().zip(solve_exact(&problem)) {
            chosen[s] = Some(v);
        }
        self.fill_empty(&mut chosen);
        let vehicles: Vec<VehicleRef> = chosen.into_iter().map(Option::unwrap).collect();
        self.try_vehicles(&vehicles)
    }

    fn record(&mut self) {
        let k = self.k;
        for &c in &self.members {
            let cell = &mut self.best_pair[c * k + self.slot_of[c]];
            if self.current < *cell {
                *cell = self.current;
            }
        }
        let key = (!self.current_is_feasible(), self.current);
        if key.0 < self.best_key.0 || (key.0 == self.best_key.0 && key.1 < self.best_key.1) {
            self.best_key = key;
            self.best_routes = self
                .slots
                .iter()
                .filter(|s| !s.eval.is_empty())
                .map(|s| Route::new(s.eval.customers().to_vec(), Some(s.vehicle)))
                .collect();
        }
    }

    /// Idles until the earliest tabu pair is released, for use when no move is admissible.
    /// Returns the iterations skipped; 0 when nothing is tabu.
    pub fn release_next(&mut self) -> usize {
        let next = self.tabu_until.iter().copied().filter(|&t| t > self.iteration).min();
        match next {
            Some(t) => std::mem::replace(&mut self.iteration, t).abs_diff(t),
            None => 0,
        }
    }

    /// One iteration: pick the better of the best relocate and best swap (relocate on ties),
    /// apply it, run the periodic exact reassignment and update the records. `None` when
    /// no move is admissible.
    pub fn step(&mut self) -> Option<Move> {
        let r = self.best_relocate();
        let s = self.best_swap();
        let mv = match (r, s) {
            (Some(r), Some(s)) => {
                if s.penalized() < r.penalized() {
                    s
                } else {
                    r
                }
            }
            (Some(m), None) | (None, Some(m)) => m,
            (None, None) => return None,
        };
        self.apply(&mv);
        self.iteration += 1;
        let period = self.params.reassign_period;
        if period > 0 && self.iteration % period == 0 && self.inst.fleet.len() < self.params.brute_force_fleet_limit {
            self.exact_reassign();
        }
        self.record();
        Some(mv)
    }
}

/// Runs the search for `number_of_iterations` iterations or until `deadline`, returning
/// the best solution seen, feasible ones first.
pub fn run_tabu(
    routes: Vec<Route>,
    inst: &ProblemInstance,
    params: &ControlParams,
    deadline: Option<Instant>,
    keep_trace: bool,
) -> TabuOutcome {
    let mut ts = TabuSearch::new(routes, inst, params);
    let mut best_trace = vec![ts.best_key()];
    let mut trace = Vec::new();
    let mut iterations = 0;
    while iterations < params.number_of_iterations {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let Some(mv) = ts.step() else {
            // every move is tabu: wait for the first release
            match ts.release_next() {
                0 => break,
                idle => iterations = (iterations + idle).min(params.number_of_iterations),
            }
            continue;
        };
        iterations += 1;
        best_trace.push(ts.best_key());
        if keep_trace {
            trace.push(TraceRow {
                iteration: ts.iteration(),
                current: ts.current_cost(),
                best: ts.best_key().1,
                kind: mv.kind(),
            });
        }
    }
    let (infeasible, cost) = ts.best_key();
    TabuOutcome { routes: ts.best_routes, cost, feasible: !infeasible, iterations, best_trace, trace }
}
