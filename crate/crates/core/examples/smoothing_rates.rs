//! Smoothing bounds across the small/large-time threshold, compared with
//! the closed-form rates of the power and log growth classes.
//!
//! `cargo run --release --example smoothing_rates`

use pme_green::geometry::{GrowthFunction, VolumeProfile};
use pme_green::quadrature::log_space;
use pme_green::smoothing::{corollary_rate, smoothing_bound_l1, ProfileClass, SmoothingBound};

fn main() -> pme_green::Result<()> {
    let m = 2.0;

    let profile = VolumeProfile::power(5, 4.0, 1.0)?;
    let f = GrowthFunction::power(3.0, 1.0)?;
    let bound = SmoothingBound::from_growth(&profile, &f, m)?;
    let class = ProfileClass::PowerGrowth { k: 3.0, delta: 0.0, lambda: 4.0 };
    println!("power class, threshold K = {:.4e}", bound.k_threshold());
    for t in log_space(1e-2, 1e6, 9) {
        let eval = smoothing_bound_l1(&bound, t, 1.0)?;
        let closed = corollary_rate(class, 5, m, t, 1.0, 1.0)?;
        println!("  t = {t:>9.2e}  {:<10}  bound {:>10.4e}  closed form {:>10.4e}", eval.regime, eval.bound_value, closed);
    }

    let profile = VolumeProfile::power_log(4, 3.0, 1.0, 1.0)?;
    let f = GrowthFunction::power_log(2.0, 2.0, std::f64::consts::E)?;
    let bound = SmoothingBound::from_growth(&profile, &f, m)?;
    let class = ProfileClass::LogGrowth { delta: 2.0, lambda: 3.0, sigma: 1.0 };
    println!("log class");
    for t in log_space(10.0, 1e6, 6) {
        let eval = smoothing_bound_l1(&bound, t, 100.0)?;
        let closed = corollary_rate(class, 4, m, t, 100.0, 1.0)?;
        println!("  t = {t:>9.2e}  {:<10}  ratio to closed form {:.4}", eval.regime, eval.bound_value / closed);
    }
    Ok(())
}
