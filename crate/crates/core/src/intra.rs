//! Fourth step: re-sequencing inside each route by moving blocks of one to three
//! consecutive customers.

use crate::cost::{price, CostMode};
use crate::eval::sequence_totals;
use crate::model::{ProblemInstance, Route, VehicleRef};
use crate::params::ControlParams;
use crate::tabu::route_is_clean;

/// Block relocation local search. Returns the improved route and its full cost after
/// every accepted move, starting with the input cost.
pub fn improve_route_traced(
    route: &Route,
    inst: &ProblemInstance,
    params: &ControlParams,
    max_block: usize,
) -> (Route, Vec<f64>) {
    let vehicle = route.vehicle.unwrap_or(VehicleRef::Fictitious);
    let profile = inst.profile(Some(vehicle), params);
    let eval = |seq: &[usize]| {
        let t = sequence_totals(seq, &profile, inst);
        (price(&t, &profile, params, CostMode::Full).total, route_is_clean(&t, vehicle, &profile, inst))
    };
    let mut seq = route.customers.clone();
    let (mut cost, was_clean) = eval(&seq);
    let mut trace = vec![cost];
    let l = seq.len();
    'restart: loop {
        for b in 1..=max_block.min(l) {
            for i in 0..=l - b {
                let block = &seq[i..i + b];
                let mut rest = seq[..i].to_vec();
                rest.extend(&seq[i + b..]);
                for q in 0..=rest.len() {
                    for reversed in [false, true] {
                        if reversed && b < 2 {
                            continue;
                        }
                        if q == i && !reversed {
                            continue;
                        }
                        let mut cand = rest[..q].to_vec();
                        if reversed {
                            cand.extend(block.iter().rev());
                        } else {
                            cand.extend(block);
                        }
                        cand.extend(&rest[q..]);
                        let (c, clean) = eval(&cand);
                        if c < cost - 1e-9 && (clean || !was_clean) {
                            seq = cand;
                            cost = c;
                            trace.push(cost);
                            continue 'restart;
                        }
                    }
                }
            }
        }
        break;
    }
    (Route::new(seq, route.vehicle), trace)
}

pub fn improve_route(route: &Route, inst: &ProblemInstance, params: &ControlParams, max_block: usize) -> Route {
    improve_route_traced(route, inst, params, max_block).0
}
