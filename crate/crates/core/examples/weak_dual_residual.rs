//! Weak dual residual of Barenblatt runs under simultaneous grid and snapshot
//! refinement.
//!
//! `cargo run --release --example weak_dual_residual`

use pme_green::geometry::VolumeProfile;
use pme_green::pme::harness::barenblatt_initial_state;
use pme_green::pme::{
    weak_dual_residual, BarenblattParams, BumpInTime, RadialGrid, SeparableTest, Solver, SolverConfig,
};

fn main() -> pme_green::Result<()> {
    let profile = VolumeProfile::euclidean(3)?;
    let params = BarenblattParams::new(3, 2.0, 1.0, 1.0)?;
    let test = SeparableTest {
        phi: BumpInTime { start: 0.5, end: 1.5 },
        inner: 1.5,
        outer: 2.5,
    };
    let mut previous: Option<f64> = None;
    for cells in [250, 500, 1000] {
        let grid = RadialGrid::uniform(&profile, 10.0, cells)?;
        let solver = Solver::new(&grid, SolverConfig::explicit(2.0))?;
        let snaps = cells / 2;
        let times: Vec<f64> = (1..=snaps).map(|i| 1.6 * i as f64 / snaps as f64).collect();
        let run = solver.run(barenblatt_initial_state(&params, &profile, &grid)?, &times)?;
        let r = weak_dual_residual(&run, &grid, &profile, &test)?;
        let order = previous.map(|p| (p / r.residual).log2());
        println!(
            "N = {cells:5}  residual = {:.3e}  (terms {:.6e}, {:.6e})  order {}",
            r.residual,
            r.potential_term,
            r.flux_term,
            order.map_or("-".into(), |o| format!("{o:.3}"))
        );
        previous = Some(r.residual);
    }
    Ok(())
}
