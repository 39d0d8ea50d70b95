//! Command-line front end for the optomechanical converter simulator:
//! TOML run configurations, figure presets, parameter sweeps, convergence
//! re-runs and CSV / JSON export with provenance sidecars.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod presets;
pub mod table;

pub use error::{CliError, CliResult};
