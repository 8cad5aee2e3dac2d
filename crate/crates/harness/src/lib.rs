//! Experiment harness for `covert-core`: design points, sweeps over frame
//! length and antenna count, a deterministic parallel trial engine, CSV
//! output and the `covert` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod csv_out;
pub mod engine;
pub mod error;
pub mod rows;
pub mod selfcheck;
pub mod sweep;

pub use error::HarnessError;
pub use rows::{design_point, DesignPoint, PowerSource, ResultRow, Targets};
pub use sweep::{run_sweep, SweepSpec, SweepVariable};
