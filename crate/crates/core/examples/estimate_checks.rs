//! Checks the a priori solution estimates on a pair of Barenblatt runs and
//! shows the slack shrinking under grid refinement.
//!
//! `cargo run --release --example estimate_checks`

use pme_green::geometry::VolumeProfile;
use pme_green::green::GreenData;
use pme_green::pme::harness::barenblatt_initial_state;
use pme_green::pme::{
    verify_paper_estimates, BarenblattParams, EstimateRuns, RadialGrid, Solver, SolverConfig,
};
use pme_green::quadrature::log_space;

fn main() -> pme_green::Result<()> {
    let profile = VolumeProfile::euclidean(3)?;
    let green = GreenData::new(&profile)?;
    let small = BarenblattParams::new(3, 2.0, 1.0, 1.0)?;
    let large = BarenblattParams::new(3, 2.0, 1.5, 1.0)?;
    let times = log_space(0.05, 2.0, 16);
    for cells in [2000, 4000] {
        let grid = RadialGrid::uniform(&profile, 20.0, cells)?;
        let solver = Solver::new(&grid, SolverConfig::explicit(2.0))?;
        let run = solver.run(barenblatt_initial_state(&small, &profile, &grid)?, &times)?;
        let dominating = solver.run(barenblatt_initial_state(&large, &profile, &grid)?, &times)?;
        let report = verify_paper_estimates(
            EstimateRuns { grid: &grid, run: &run, dominating: &dominating },
            &green,
            0.02,
        )?;
        println!("N = {cells}");
        for c in &report.checks {
            println!("  {:30} slack {:.3e}  {}", c.name, c.slack, if c.pass { "pass" } else { "FAIL" });
        }
    }
    Ok(())
}
