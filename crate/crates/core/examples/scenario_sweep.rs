//! Builds a sweep scenario in code, runs it, and prints the manifest summary.
//! The same JSON can be fed to `pmegreen --config`.
//!
//! `cargo run --release --example scenario_sweep [out_dir]`

use std::path::PathBuf;

use pme_green::scenario::{run_scenario, Scenario, TolerancePolicy};

const CONFIG: &str = r#"{
  "schema_version": 1,
  "name": "sweep-m",
  "experiment": {
    "kind": "sweep",
    "points": [{"m": 1.5, "k": 3}, {"m": 2.0, "k": 3}, {"m": 3.0, "k": 3}, {"m": 2.0, "k": 4}],
    "a": 1.0,
    "eps": 1.0,
    "cells": 500,
    "r_max": 20.0,
    "times": {"start": 0.1, "end": 10.0, "count": 21},
    "fit_window": [1.0, 10.0]
  }
}"#;

fn main() -> pme_green::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out)?;
    let scenario = Scenario::parse(CONFIG)?;
    let manifest = run_scenario(&scenario, &out, TolerancePolicy::default_profile())?;
    println!("status: {}", manifest.status);
    for check in &manifest.checks {
        println!("{}: {} ({})", check.name, check.pass, check.detail);
    }
    for path in &manifest.artifacts {
        println!("wrote {path}");
    }
    Ok(())
}
