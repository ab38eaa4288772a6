//! Solver runs from Barenblatt data and log-log decay fits.

use serde::Serialize;

use super::barenblatt::BarenblattParams;
use super::grid::RadialGrid;
use super::solver::{OuterBoundary, RadialState, RunRecord, Scheme, Solver, SolverConfig};
use crate::error::{Error, Result};
use crate::geometry::{GrowthFunction, VolumeProfile};
use crate::smoothing::{smoothing_bound_l1, SmoothingBound};

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "slope fit needs at least two paired points, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(Error::Domain("log-log fit needs positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("slope fit needs distinct abscissae".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimalityConfig {
    pub params: BarenblattParams,
    pub cells: usize,
    pub r_max: f64,
    /// Solver snapshot times; must span at least two decades.
    pub times: Vec<f64>,
    /// Solver-time window of the slope fit.
    pub fit_window: (f64, f64),
    pub scheme: Scheme,
}

impl OptimalityConfig {
    pub fn new(params: BarenblattParams, cells: usize, r_max: f64, times: Vec<f64>) -> Self {
        let last = times.last().copied().unwrap_or(1.0);
        Self {
            params,
            cells,
            r_max,
            times,
            fit_window: (1.0, last),
            scheme: Scheme::ExplicitAdaptive { cfl: 0.4 },
        }
    }
}

/// Decay of `‖u(t)‖_∞` measured against the Barenblatt clock `τ = t + ε`.
#[derive(Debug, Clone, Serialize)]
pub struct OptimalityReport {
    pub alpha: f64,
    pub fitted_slope: f64,
    /// Large-time slope of the L¹ smoothing bound with `f = R^{k−1}`, `F = V`.
    pub bound_slope: f64,
    pub times: Vec<f64>,
    pub sup: Vec<f64>,
    /// `‖u(t)‖_∞ τ^α` on the fit window.
    pub scaled_sup: Vec<f64>,
    /// `max/min` of `scaled_sup`.
    pub sandwich_factor: f64,
    /// Largest `|scaled_sup / scaled_sup(first) − 1|` deviation factor on the window.
    pub factor_vs_first: f64,
    /// Smallest `C τ^{−α} / ‖u‖_∞` with `C` matched at the first window time.
    pub calibrated_ratio_min: f64,
    pub l1_errors: Vec<f64>,
    pub max_l1_error: f64,
    pub mass: f64,
    pub run: RunRecord,
}

pub fn barenblatt_initial_state(
    params: &BarenblattParams,
    profile: &VolumeProfile,
    grid: &RadialGrid,
) -> Result<RadialState> {
    let u0 = grid.cell_averages(profile, |r| params.value_unchecked(r, params.eps));
    RadialState::new(u0, 0.0)
}

/// `Σ |u_i − v̄_i| ΔV_i` against the exact cell averages at solver time `t`.
pub fn barenblatt_l1_error(
    params: &BarenblattParams,
    profile: &VolumeProfile,
    grid: &RadialGrid,
    u: &[f64],
    t: f64,
) -> f64 {
    let exact = grid.cell_averages(profile, |r| params.value_unchecked(r, t + params.eps));
    u.iter()
        .zip(&exact)
        .zip(&grid.volumes)
        .map(|((a, b), v)| (a - b).abs() * v)
        .sum()
}

pub fn optimality_harness(config: &OptimalityConfig) -> Result<OptimalityReport> {
    let p = config.params;
    if p.k < 3 {
        return Err(Error::Dimension(p.k));
    }
    let positive: Vec<f64> = config.times.iter().copied().filter(|&t| t > 0.0).collect();
    let span = match (positive.first(), positive.last()) {
        (Some(a), Some(b)) => b / a,
        _ => 0.0,
    };
    if positive.len() < 3 || span < 100.0 * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "time grid must hold at least three positive times spanning two decades, spans {span}"
        )));
    }
    let profile = VolumeProfile::euclidean(p.k)?;
    let grid = RadialGrid::uniform(&profile, config.r_max, config.cells)?;
    let solver_config = SolverConfig {
        scheme: config.scheme,
        ..SolverConfig::explicit(p.m).with_boundary(OuterBoundary::Absorbing)
    };
    let solver = Solver::new(&grid, solver_config)?;
    let initial = barenblatt_initial_state(&p, &profile, &grid)?;
    let mass = initial.mass(&grid);
    let run = solver.run(initial, &positive)?;

    let (lo, hi) = config.fit_window;
    let window: Vec<usize> = (0..run.times.len())
        .filter(|&k| run.times[k] >= lo * (1.0 - 1e-12) && run.times[k] <= hi * (1.0 + 1e-12))
        .collect();
    if window.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "fit window [{lo}, {hi}] holds fewer than two snapshots"
        )));
    }
    let sup: Vec<f64> = run.snapshots.iter().map(|u| u.iter().fold(0.0, |a: f64, &b| a.max(b))).collect();
    let clock: Vec<f64> = window.iter().map(|&k| run.times[k] + p.eps).collect();
    let wsup: Vec<f64> = window.iter().map(|&k| sup[k]).collect();
    let alpha = p.alpha();
    let fitted_slope = fit_slope(&clock, &wsup)?;

    let f = GrowthFunction::power(p.k as f64, 1.0)?;
    let bound = SmoothingBound::from_growth(&profile, &f, p.m)?;
    let bound_values = clock
        .iter()
        .map(|&t| smoothing_bound_l1(&bound, t, mass).map(|e| e.bound_value))
        .collect::<Result<Vec<_>>>()?;
    let bound_slope = fit_slope(&clock, &bound_values)?;

    let scaled_sup: Vec<f64> = clock.iter().zip(&wsup).map(|(t, s)| s * t.powf(alpha)).collect();
    let smax = scaled_sup.iter().copied().fold(f64::MIN, f64::max);
    let smin = scaled_sup.iter().copied().fold(f64::MAX, f64::min);
    let first = scaled_sup[0];
    let factor_vs_first = scaled_sup
        .iter()
        .map(|s| (s / first).max(first / s))
        .fold(1.0, f64::max);
    // C τ^{−α} equals the solution at the first window time
    let c = first;
    let calibrated_ratio_min = clock
        .iter()
        .zip(&wsup)
        .map(|(t, s)| c * t.powf(-alpha) / s)
        .fold(f64::INFINITY, f64::min);
    let l1_errors: Vec<f64> = run
        .times
        .iter()
        .zip(&run.snapshots)
        .map(|(&t, u)| barenblatt_l1_error(&p, &profile, &grid, u, t))
        .collect();
    let max_l1_error = l1_errors.iter().copied().fold(0.0, f64::max);
    Ok(OptimalityReport {
        alpha,
        fitted_slope,
        bound_slope,
        times: run.times.clone(),
        sup,
        scaled_sup,
        sandwich_factor: smax / smin,
        factor_vs_first,
        calibrated_ratio_min,
        l1_errors,
        max_l1_error,
        mass,
        run,
    })
}
