//! Runs the radial solver from a Barenblatt profile and reports the decay fit.
//!
//! `cargo run --release --example barenblatt_optimality -- [cells]`

use pme_green::pme::harness::OptimalityConfig;
use pme_green::pme::{optimality_harness, BarenblattParams};
use pme_green::quadrature::log_space;

fn main() -> pme_green::Result<()> {
    let cells = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let params = BarenblattParams::new(3, 2.0, 1.0, 1.0)?;
    let mut config = OptimalityConfig::new(params, cells, 20.0, log_space(0.1, 10.0, 21));
    config.fit_window = (1.0, 10.0);
    let report = optimality_harness(&config)?;
    println!("alpha            {:.6}", report.alpha);
    println!("fitted slope     {:.6}", report.fitted_slope);
    println!("bound slope      {:.6}", report.bound_slope);
    println!("sup*tau^alpha    max/min {:.6}", report.sandwich_factor);
    println!("calibrated ratio min {:.6}", report.calibrated_ratio_min);
    println!("mass             {:.6}", report.mass);
    println!("L1 error (final) {:.3e}", report.l1_errors.last().unwrap());
    println!("L1 error (max)   {:.3e}", report.max_l1_error);
    println!("conservation     {:.3e}", report.run.conservation_defect());
    println!("steps            {}", report.run.steps);
    Ok(())
}
