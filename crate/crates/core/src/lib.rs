pub mod graph;
pub mod lattice;
pub mod numeric;
pub mod schedule;
pub mod kernel;
pub mod verify;
pub mod config;
pub mod cli;
