//! Green function against its surrogate, and the two-sided potential bound
//! for a normalized ball indicator.
//!
//! `cargo run --release --example green_sandwich`

use pme_green::geometry::{GrowthFunction, VolumeProfile};
use pme_green::green::{green_bounds, sandwich_check, RadialDensity};
use pme_green::quadrature::log_space;

fn main() -> pme_green::Result<()> {
    let profile = VolumeProfile::power(5, 3.5, 1.0)?;
    let f = GrowthFunction::power(3.5, 1.0)?;
    let radii = log_space(0.1, 100.0, 7);

    let report = green_bounds(&profile, &f, &radii, None, None)?;
    println!("c1 = {:.4}, c2 = {:.4}", report.constants.c1, report.constants.c2);
    println!("{:>10} {:>14} {:>14} {:>8}", "r", "G", "G_hat", "ratio");
    for rec in &report.records {
        println!("{:>10.4} {:>14.6e} {:>14.6e} {:>8.4}", rec.r, rec.g, rec.g_hat, rec.ratio);
    }
    println!("pointwise bounds hold: {}", report.all_ok());

    let psi = RadialDensity::normalized_indicator(&profile, 1.0);
    let sandwich = sandwich_check(&profile, &psi, &radii)?;
    println!("potential sandwich: gamma1 = {:.4}, gamma2 = {:.4}", sandwich.gamma1, sandwich.gamma2);
    Ok(())
}
