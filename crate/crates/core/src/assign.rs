//! Route-to-vehicle assignment: exact minimum-cost matching and the longest-route-first
//! greedy rule. Real vehicles drive at most one route; the fictitious vehicle takes any
//! number of routes.

use crate::model::VehicleRef;

/// Separable assignment costs.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentProblem {
    /// `fleet_cost[r][v]`: cost of route `r` on fleet vehicle `v`, `None` if `v` may not drive it.
    pub fleet_cost: Vec<Vec<Option<f64>>>,
    pub fictitious_cost: Vec<f64>,
}

impl AssignmentProblem {
    pub fn routes(&self) -> usize {
        self.fictitious_cost.len()
    }

    pub fn vehicles(&self) -> usize {
        self.fleet_cost.first().map_or(0, Vec::len)
    }

    /// Total cost of an assignment; infinite when it uses a forbidden or repeated vehicle.
    pub fn total(&self, assignment: &[VehicleRef]) -> f64 {
        let mut used = vec![false; self.vehicles()];
        let mut sum = 0.0;
        for (r, a) in assignment.iter().enumerate() {
            match *a {
                VehicleRef::Fictitious => sum += self.fictitious_cost[r],
                VehicleRef::Fleet(v) => match self.fleet_cost[r][v] {
                    Some(c) if !std::mem::replace(&mut used[v], true) => sum += c,
                    _ => return f64::INFINITY,
                },
            }
        }
        sum
    }
}

const FORBIDDEN: f64 = 1e18;

/// Optimal assignment via the Hungarian method on routes × (vehicles + one fictitious
/// copy per route).
pub fn solve_exact(p: &AssignmentProblem) -> Vec<VehicleRef> {
    let (n, v) = (p.routes(), p.vehicles());
    if n == 0 {
        return Vec::new();
    }
    let m = v + n;
    let cost = |r: usize, col: usize| -> f64 {
        if col < v {
            p.fleet_cost[r][col].unwrap_or(FORBIDDEN)
        } else {
            p.fictitious_cost[r]
        }
    };
    let mut u = vec![0.0; n + 1];
    let mut w = vec![0.0; m + 1];
    let mut row_of = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - w[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[row_of[j]] += delta;
                    w[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![VehicleRef::Fictitious; n];
    for j in 1..=m {
        if row_of[j] != 0 && j - 1 < v {
            out[row_of[j] - 1] = VehicleRef::Fleet(j - 1);
        }
    }
    out
}

/// Every injective assignment, for cross-checking on small cases.
pub fn solve_brute_force(p: &AssignmentProblem) -> Vec<VehicleRef> {
    fn rec(
        p: &AssignmentProblem,
        r: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<VehicleRef>,
        acc: f64,
        best: &mut (f64, Vec<VehicleRef>),
    ) {
        if r == p.routes() {
            if acc < best.0 {
                *best = (acc, cur.clone());
            }
            return;
        }
        for v in 0..p.vehicles() {
            if let (false, Some(c)) = (used[v], p.fleet_cost[r][v]) {
                used[v] = true;
                cur.push(VehicleRef::Fleet(v));
                rec(p, r + 1, used, cur, acc + c, best);
                cur.pop();
                used[v] = false;
            }
        }
        cur.push(VehicleRef::Fictitious);
        rec(p, r + 1, used, cur, acc + p.fictitious_cost[r], best);
        cur.pop();
    }
    let mut best = (f64::INFINITY, Vec::new());
    rec(p, 0, &mut vec![false; p.vehicles()], &mut Vec::new(), 0.0, &mut best);
    best.1
}

/// Longest route first takes the cheapest still-free vehicle it is allowed to use;
/// routes left without one get the fictitious vehicle.
pub fn solve_greedy(
    route_lengths: &[f64],
    vehicle_costs: &[f64],
    mut allowed: impl FnMut(usize, usize) -> bool,
) -> Vec<VehicleRef> {
    let mut routes: Vec<usize> = (0..route_lengths.len()).collect();
    routes.sort_by(|&a, &b| route_lengths[b].total_cmp(&route_lengths[a]).then(a.cmp(&b)));
    let mut vehicles: Vec<usize> = (0..vehicle_costs.len()).collect();
    vehicles.sort_by(|&a, &b| vehicle_costs[a].total_cmp(&vehicle_costs[b]).then(a.cmp(&b)));
    let mut free = vec![true; vehicle_costs.len()];
    let mut out = vec![VehicleRef::Fictitious; route_lengths.len()];
    for r in routes {
        if let Some(&v) = vehicles.iter().find(|&&v| free[v] && allowed(r, v)) {
            free[v] = false;
            out[r] = VehicleRef::Fleet(v);
        }
    }
    out
}
