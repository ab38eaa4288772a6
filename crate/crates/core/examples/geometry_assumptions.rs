//! Samples the standing geometric assumptions on three model manifolds.
//!
//! `cargo run --release --example geometry_assumptions`

use pme_green::geometry::{check_assumptions, GrowthFunction, VolumeProfile};
use pme_green::quadrature::log_space;

fn main() -> pme_green::Result<()> {
    let cases = [
        ("euclidean R^3", VolumeProfile::euclidean(3)?, GrowthFunction::power(3.0, 1.0)?),
        ("power V ~ R^3.5 in dim 5", VolumeProfile::power(5, 3.5, 1.0)?, GrowthFunction::power(3.5, 1.0)?),
        ("power V ~ R^4 with f = R^2", VolumeProfile::power(5, 4.0, 1.0)?, GrowthFunction::power(3.0, 1.0)?),
    ];
    let grid = log_space(1.0, 1e3, 61);
    for (label, profile, f) in &cases {
        let report = check_assumptions(profile, f, &grid)?;
        println!("{label}");
        println!("  V(1)            {:.6}", report.alpha_noncollapse);
        println!("  gamma (sampled) {:.6}  growth exponent {:.3e}", report.gamma_uniformity, report.gamma_growth_exponent);
        println!("  beta            {:.6}", report.beta);
        println!("  doubling        {:.6}", report.doubling_constant);
        println!("  bishop-gromov   {}", report.bishop_gromov_ok);
        if report.passed() {
            println!("  all assumptions hold on the grid");
        } else {
            for failure in &report.failures {
                println!("  failed: {failure}");
            }
        }
    }
    Ok(())
}
