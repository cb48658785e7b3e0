//! Prefix aggregates over a route so that splicing customers in or out can be priced
//! without rescheduling the untouched prefix.

use crate::cost::{price, CostComponents, CostMode, RouteTotals};
use crate::model::{node, ProblemInstance, VehicleProfile, DEPOT};
use crate::params::ControlParams;

/// Cached schedule of one route driven by one vehicle.
///
/// Positions run from 0 (depot departure) through 1..=L (customers) to L+1 (depot return).
#[derive(Debug, Clone)]
pub struct RouteEval {
    pub vehicle: VehicleProfile,
    customers: Vec<usize>,
    nodes: Vec<usize>,
    start: Vec<f64>,
    end: Vec<f64>,
    cum_dist: Vec<f64>,
    cum_w: Vec<f64>,
    cum_v: Vec<f64>,
    cum_bad: Vec<usize>,
    pref_ld: Vec<f64>,
    pref_delay: Vec<f64>,
    totals: RouteTotals,
}

impl RouteEval {
    pub fn new(customers: &[usize], vehicle: VehicleProfile, inst: &ProblemInstance) -> Self {
        let l = customers.len();
        let mut nodes = Vec::with_capacity(l + 2);
        nodes.push(DEPOT);
        nodes.extend(customers.iter().map(|&c| node(c)));
        nodes.push(DEPOT);
        let mut e = RouteEval {
            vehicle,
            customers: customers.to_vec(),
            nodes,
            start: vec![0.0; l + 2],
            end: vec![0.0; l + 2],
            cum_dist: vec![0.0; l + 2],
            cum_w: vec![0.0; l + 2],
            cum_v: vec![0.0; l + 2],
            cum_bad: vec![0; l + 2],
            pref_ld: vec![0.0; l + 2],
            pref_delay: vec![0.0; l + 2],
            totals: RouteTotals::default(),
        };
        let m = &inst.matrix;
        e.start[0] = vehicle.departure;
        e.end[0] = vehicle.departure;
        for p in 1..=l {
            let c = customers[p - 1];
            let cust = &inst.customers[c];
            let (prev, here) = (e.nodes[p - 1], e.nodes[p]);
            e.cum_dist[p] = e.cum_dist[p - 1] + m.distance(prev, here);
            e.start[p] = (e.end[p - 1] + m.time(prev, here)).max(cust.window_start);
            e.end[p] = e.start[p] + cust.service_time;
            e.cum_w[p] = e.cum_w[p - 1] + cust.demand_weight;
            e.cum_v[p] = e.cum_v[p - 1] + cust.demand_volume;
            e.cum_bad[p] = e.cum_bad[p - 1] + usize::from(!inst.admits(vehicle.fleet_index, c));
            e.pref_ld[p] = e.pref_ld[p - 1] + e.cum_dist[p] * cust.demand_weight;
            e.pref_delay[p] = e.pref_delay[p - 1] + (e.end[p] - cust.window_end).max(0.0);
        }
        let last = l + 1;
        if l == 0 {
            e.start[last] = vehicle.departure;
        } else {
            e.cum_dist[last] = e.cum_dist[l] + m.distance(e.nodes[l], DEPOT);
            e.start[last] = e.end[l] + m.time(e.nodes[l], DEPOT);
        }
        e.end[last] = e.start[last];
        e.cum_w[last] = e.cum_w[l];
        e.cum_v[last] = e.cum_v[l];
        e.cum_bad[last] = e.cum_bad[l];
        e.pref_ld[last] = e.pref_ld[l];
        e.pref_delay[last] = e.pref_delay[l];
        e.totals = RouteTotals {
            stops: l,
            distance: e.cum_dist[last],
            weight: e.cum_w[l],
            volume: e.cum_v[l],
            inadmissible: e.cum_bad[l],
            load_distance: e.pref_ld[l],
            delay: e.pref_delay[l],
            return_time: e.start[last],
        };
        e
    }

    pub fn customers(&self) -> &[usize] {
        &self.customers
    }

    pub fn len(&self) -> usize {
        self.customers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.customers.is_empty()
    }

    pub fn totals(&self) -> &RouteTotals {
        &self.totals
    }

    /// Service start at position `p` (customer `p - 1`).
    pub fn service_start(&self, p: usize) -> f64 {
        self.start[p]
    }

    pub fn return_time(&self) -> f64 {
        self.start[self.customers.len() + 1]
    }

    pub fn price(&self, params: &ControlParams, mode: CostMode) -> CostComponents {
        price(&self.totals, &self.vehicle, params, mode)
    }

    /// Totals of the route made of positions `0..=i`, then `middle`, then positions
    /// `j..=L+1`. Requires `i < j <= L + 1`.
    pub fn splice(&self, i: usize, middle: &[usize], j: usize, inst: &ProblemInstance) -> RouteTotals {
        let l = self.customers.len();
        debug_assert!(i < j && j <= l + 1);
        let m = &inst.matrix;
        let (mut prev, mut t, mut d) = (self.nodes[i], self.end[i], self.cum_dist[i]);
        let (mut w, mut v, mut bad) = (self.cum_w[i], self.cum_v[i], self.cum_bad[i]);
        let (mut ld, mut delay) = (self.pref_ld[i], self.pref_delay[i]);
        for &c in middle {
            let cust = &inst.customers[c];
            let here = node(c);
            d += m.distance(prev, here);
            let s = (t + m.time(prev, here)).max(cust.window_start);
            t = s + cust.service_time;
            delay += (t - cust.window_end).max(0.0);
            w += cust.demand_weight;
            v += cust.demand_volume;
            ld += d * cust.demand_weight;
            bad += usize::from(!inst.admits(self.vehicle.fleet_index, c));
            prev = here;
        }
        let stops = i + middle.len() + l - (j - 1);
        if stops == 0 {
            return RouteTotals { return_time: self.vehicle.departure, ..Default::default() };
        }
        let shift = d + m.distance(prev, self.nodes[j]) - self.cum_dist[j];
        let tail_w = self.cum_w[l] - self.cum_w[j - 1];
        w += tail_w;
        v += self.cum_v[l] - self.cum_v[j - 1];
        bad += self.cum_bad[l] - self.cum_bad[j - 1];
        ld += (self.pref_ld[l] - self.pref_ld[j - 1]) + shift * tail_w;
        let mut arrival = t + m.time(prev, self.nodes[j]);
        for k in j..=l {
            let cust = &inst.customers[self.customers[k - 1]];
            let s = arrival.max(cust.window_start);
            if s == self.start[k] {
                delay += self.pref_delay[l] - self.pref_delay[k - 1];
                arrival = self.start[l + 1];
                break;
            }
            let e = s + cust.service_time;
            delay += (e - cust.window_end).max(0.0);
            arrival = e + m.time(self.nodes[k], self.nodes[k + 1]);
        }
        RouteTotals {
            stops,
            distance: self.cum_dist[l + 1] + shift,
            weight: w,
            volume: v,
            inadmissible: bad,
            load_distance: ld,
            delay,
            return_time: arrival,
        }
    }

    /// Totals after inserting `c` so that it lands at position `p + 1` (after position `p`).
    pub fn with_inserted(&self, p: usize, c: usize, inst: &ProblemInstance) -> RouteTotals {
        self.splice(p, &[c], p + 1, inst)
    }

    /// Totals after dropping the customer at position `p` (1-based).
    pub fn without(&self, p: usize, inst: &ProblemInstance) -> RouteTotals {
        self.splice(p - 1, &[], p + 1, inst)
    }

    /// Totals after replacing the customer at position `p` (1-based) by `c`.
    pub fn with_replaced(&self, p: usize, c: usize, inst: &ProblemInstance) -> RouteTotals {
        self.splice(p - 1, &[c], p + 1, inst)
    }
}

/// The construction and elimination screen: no overload on the given capacities, no
/// delay, and back at the depot before it closes and before the shift ends.
pub fn within_hard_limits(t: &RouteTotals, vehicle: &VehicleProfile, inst: &ProblemInstance) -> bool {
    let latest = match vehicle.fleet_index {
        Some(v) => inst.depot.close.min(inst.fleet[v].shift_end),
        None => inst.depot.close,
    };
    t.weight <= vehicle.max_weight + 1e-9
        && t.volume <= vehicle.max_volume + 1e-9
        && t.delay <= 1e-7
        && t.return_time <= latest + 1e-7
}

/// Totals of an arbitrary customer sequence, computed from scratch.
pub fn sequence_totals(customers: &[usize], vehicle: &VehicleProfile, inst: &ProblemInstance) -> RouteTotals {
    let m = &inst.matrix;
    let (mut prev, mut t) = (DEPOT, vehicle.departure);
    let mut tot = RouteTotals { stops: customers.len(), ..Default::default() };
    for &c in customers {
        let cust = &inst.customers[c];
        let here = node(c);
        tot.distance += m.distance(prev, here);
        let s = (t + m.time(prev, here)).max(cust.window_start);
        t = s + cust.service_time;
        tot.delay += (t - cust.window_end).max(0.0);
        tot.weight += cust.demand_weight;
        tot.volume += cust.demand_volume;
        tot.load_distance += tot.distance * cust.demand_weight;
        tot.inadmissible += usize::from(!inst.admits(vehicle.fleet_index, c));
        prev = here;
    }
    if !customers.is_empty() {
        tot.distance += m.distance(prev, DEPOT);
        t += m.time(prev, DEPOT);
    }
    tot.return_time = t;
    tot
}
