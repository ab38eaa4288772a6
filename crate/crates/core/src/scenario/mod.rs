//! Reproducible experiment runner: JSON scenarios in, CSV/JSON artifacts and a
//! manifest out.

pub mod cli;
pub mod config;
pub mod runner;

pub use config::{Experiment, GridSpec, Scenario, SCHEMA_VERSION};
pub use runner::{fmt_f64, run_scenario, sweep_rows, Manifest, SweepRow, TolerancePolicy};
