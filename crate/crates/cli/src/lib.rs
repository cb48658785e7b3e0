//! Command implementations behind the `hfvrp` binary.

pub mod bench;
pub mod commands;
pub mod config;
