//! Library side of the `corridor` binary: configuration files, path-set
//! files and the run summary.

pub mod config;
pub mod pathset;

pub use config::{BenchConfig, KeyValues, RunConfig, BENCH_KEYS, SOLVE_KEYS};
pub use pathset::{PathSetFile, Summary};
