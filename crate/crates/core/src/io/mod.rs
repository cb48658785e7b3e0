//! Reading instances and writing solutions.

pub mod bks;
pub mod extended;
pub mod solomon;
pub mod solution;

pub use bks::{builtin_bks, compare_to_bks, lookup_bks, parse_bks, BksEntry, GapReport};
pub use extended::{load_extended, parse_extended, write_extended, ExtendedInstance};
pub use solomon::{load_solomon, parse_solomon};
pub use solution::{
    parse_solution_json, solution_doc, solution_from_doc, write_solution_geojson, write_solution_json,
    write_solution_text, SolutionDoc,
};
