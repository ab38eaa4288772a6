//! Grid-sampled checks of non-collapsing, uniform volume growth, integrability
//! of `1/f`, Bishop–Gromov monotonicity and ball doubling.

use serde::Serialize;

use super::growth::GrowthFunction;
use super::profile::{unit_ball_volume, VolumeProfile};
use crate::error::{Error, Result};

/// Growth exponent of the sampled `γ` (as a function of the grid's upper end)
/// above which the uniformity constant is treated as unbounded.
pub const GAMMA_GROWTH_TOLERANCE: f64 = 1e-2;

const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub grid: Vec<f64>,
    /// `V(1)` at the pole.
    pub alpha_noncollapse: f64,
    /// Empirical `γ`: a lower bound for the uniformity constant over the grid.
    pub gamma_uniformity: f64,
    /// Log-log slope of the running `γ` over the upper half of the grid.
    pub gamma_growth_exponent: f64,
    pub beta: f64,
    pub bishop_gromov_ok: bool,
    pub volume_below_euclidean: bool,
    pub doubling_constant: f64,
    pub failures: Vec<String>,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Samples every standing assumption on `grid ⊂ [R₀, R_max]`.
pub fn check_assumptions(
    profile: &VolumeProfile,
    f: &GrowthFunction,
    grid: &[f64],
) -> Result<AssumptionReport> {
    if grid.len() < 2 {
        return Err(Error::InvalidParameter(
            "assumption grid needs at least two radii".into(),
        ));
    }
    let r0 = f.r0();
    let r_max = profile.r_max();
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    if grid[0] < r0 || *grid.last().unwrap() > r_max {
        return Err(Error::Domain(format!(
            "assumption grid [{}, {}] leaves [R0, R_max] = [{r0}, {r_max}]",
            grid[0],
            grid.last().unwrap()
        )));
    }

    let alpha = profile.volume(1.0);
    let beta = f.beta();

    // running gamma over prefixes of the grid
    let ratios: Vec<f64> = grid
        .iter()
        .map(|&r| r * f.eval(r) / profile.volume(r))
        .collect();
    let mut running_min = f64::INFINITY;
    let mut gamma = 1.0_f64;
    let mut running_gamma = Vec::with_capacity(grid.len());
    for &q in &ratios {
        running_min = running_min.min(q);
        gamma = gamma.max(q / running_min);
        running_gamma.push(gamma);
    }
    let last = grid.len() - 1;
    let mid = last / 2;
    let gamma_growth_exponent = if grid[last] > grid[mid] {
        (running_gamma[last] / running_gamma[mid]).ln() / (grid[last] / grid[mid]).ln()
    } else {
        0.0
    };

    let n = profile.dim() as i32;
    let scaled: Vec<f64> = grid.iter().map(|&r| profile.volume(r) / r.powi(n)).collect();
    let bishop_gromov_ok = scaled
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + MONOTONE_SLACK));
    let omega = unit_ball_volume(profile.dim());
    let volume_below_euclidean = scaled.iter().all(|&s| s <= omega * (1.0 + MONOTONE_SLACK));

    let doubling_constant = grid
        .iter()
        .map(|&r| profile.volume(2.0 * r) / profile.volume(r))
        .fold(0.0_f64, f64::max);

    let mut failures = Vec::new();
    if !(alpha > 0.0) {
        failures.push("noncollapsing".to_string());
    }
    if !gamma.is_finite() || gamma_growth_exponent > GAMMA_GROWTH_TOLERANCE {
        failures.push("uniformvolume".to_string());
    }
    if !beta.is_finite() {
        failures.push("integrablef".to_string());
    }
    if !bishop_gromov_ok {
        failures.push("bishop_gromov".to_string());
    }
    if !doubling_constant.is_finite() {
        failures.push("doubling".to_string());
    }

    Ok(AssumptionReport {
        grid,
        alpha_noncollapse: alpha,
        gamma_uniformity: gamma,
        gamma_growth_exponent,
        beta,
        bishop_gromov_ok,
        volume_below_euclidean,
        doubling_constant,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::log_space;

    #[test]
    fn euclidean_five_with_matching_f() {
        let p = VolumeProfile::euclidean(5).unwrap();
        let f = GrowthFunction::power(5.0, 1.0).unwrap();
        let rep = check_assumptions(&p, &f, &log_space(1.0, 1e3, 40)).unwrap();
        assert!((rep.gamma_uniformity - 1.0).abs() < 1e-12);
        assert!((rep.beta - 1.0 / 3.0).abs() < 1e-15);
        assert!(rep.passed(), "{:?}", rep.failures);
        assert!((rep.doubling_constant - 32.0).abs() < 1e-9);
    }

    #[test]
    fn growing_ratio_fails_uniformity() {
        let p = VolumeProfile::power(5, 3.0, 1.0).unwrap();
        let f = GrowthFunction::power(5.0, 1.0).unwrap();
        let rep = check_assumptions(&p, &f, &log_space(1.0, 1e3, 40)).unwrap();
        assert!(rep.failures.contains(&"uniformvolume".to_string()));
        assert!((rep.gamma_growth_exponent - 2.0).abs() < 1e-9);
        assert!(rep.bishop_gromov_ok);
    }

    #[test]
    fn divergent_beta_fails() {
        let p = VolumeProfile::euclidean(5).unwrap();
        let f = GrowthFunction::power(2.0, 1.0).unwrap();
        let rep = check_assumptions(&p, &f, &[1.0, 10.0]).unwrap();
        assert!(rep.beta.is_infinite());
        assert!(rep.failures.contains(&"integrablef".to_string()));
    }

    #[test]
    fn grid_errors() {
        let p = VolumeProfile::euclidean(3).unwrap();
        let f = GrowthFunction::power(3.0, 2.0).unwrap();
        assert!(check_assumptions(&p, &f, &[]).is_err());
        assert!(check_assumptions(&p, &f, &[5.0]).is_err());
        assert!(check_assumptions(&p, &f, &[1.0, 5.0]).is_err());
        let t = VolumeProfile::tabulated(3, vec![1.0, 10.0], vec![1.0, 1000.0]).unwrap();
        assert!(check_assumptions(&t, &f, &[2.0, 20.0]).is_err());
    }
}
