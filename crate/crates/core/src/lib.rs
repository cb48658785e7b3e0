//! Heterogeneous-fleet vehicle routing with time windows, site dependency and split
//! deliveries.
//!
//! The solver runs in four steps over a prepared instance: savings construction with
//! route insertion, route elimination, tabu search over relocate and swap moves, and
//! block relocation inside each route. [`solver::solve`] runs the whole pipeline.

pub mod assign;
pub mod construct;
pub mod cost;
pub mod eliminate;
pub mod error;
pub mod eval;
pub mod features;
pub mod intra;
pub mod io;
pub mod model;
pub mod params;
pub mod solver;
pub mod tabu;
pub mod transform;

pub use cost::{CostComponents, CostMode};
pub use error::{Error, Result};
pub use model::{Customer, Depot, ProblemInstance, Route, Solution, Vehicle, VehicleRef};
pub use params::ControlParams;
pub use solver::{prepare, solve, SolveOptions, SolveOutcome};
