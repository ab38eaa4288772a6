//! A priori properties of nonnegative solutions, checked on solver snapshots.
//!
//! Each check reports a slack `τ`: the smallest relative relaxation under which
//! the inequality holds on every sampled time (or pair, or triple). Slacks
//! below `ROUNDOFF_FLOOR` are reported as zero.

use serde::Serialize;

use super::grid::RadialGrid;
use super::solver::RunRecord;
use crate::error::{Error, Result};
use crate::green::GreenData;

pub const ROUNDOFF_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub slack: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub tolerance: f64,
    pub checks: Vec<CheckResult>,
}

impl EstimateReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn slack(&self, name: &str) -> Option<f64> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.slack)
    }

    pub fn max_slack(&self) -> f64 {
        self.checks.iter().map(|c| c.slack).fold(0.0, f64::max)
    }
}

/// A run and a second run from pointwise larger data, on the same grid and
/// snapshot times.
#[derive(Debug, Clone, Copy)]
pub struct EstimateRuns<'a> {
    pub grid: &'a RadialGrid,
    pub run: &'a RunRecord,
    pub dominating: &'a RunRecord,
}

fn floor(x: f64) -> f64 {
    if x < ROUNDOFF_FLOOR || x.is_nan() {
        if x.is_nan() {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        x
    }
}

fn excess(value: f64, reference: f64) -> f64 {
    if reference > 0.0 {
        (value / reference - 1.0).max(0.0)
    } else if value <= 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// `∫_cell G S dr` for each cell.
pub fn green_weights(grid: &RadialGrid, green: &GreenData<'_>) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut below = 0.0;
    for &r in &grid.edges[1..] {
        let above = green.ball_integral(r)?;
        out.push(above - below);
        below = above;
    }
    Ok(out)
}

/// `t ↦ ∫ u(t) G dμ` on the snapshots.
pub fn green_moments(run: &RunRecord, weights: &[f64]) -> Vec<f64> {
    run.snapshots
        .iter()
        .map(|u| u.iter().zip(weights).map(|(a, w)| a * w).sum())
        .collect()
}

/// Runs the six checks with pass threshold `tolerance` on each slack.
pub fn verify_paper_estimates(
    runs: EstimateRuns<'_>,
    green: &GreenData<'_>,
    tolerance: f64,
) -> Result<EstimateReport> {
    let EstimateRuns { grid, run, dominating } = runs;
    let m = run.m;
    if run.times.len() < 3 {
        return Err(Error::MissingSnapshots(format!(
            "need at least three snapshots, got {}",
            run.times.len()
        )));
    }
    if dominating.times != run.times {
        return Err(Error::MissingSnapshots("the two runs have different snapshot times".into()));
    }
    let weights = green_weights(grid, green)?;
    let moments = green_moments(run, &weights);
    let positive: Vec<usize> = (0..run.times.len()).filter(|&k| run.times[k] > 0.0).collect();
    let mut checks = Vec::new();
    let mut push = |name: &str, slack: f64| {
        let slack = floor(slack);
        checks.push(CheckResult {
            name: name.into(),
            slack,
            pass: slack <= tolerance,
        })
    };

    let green_monotone = moments
        .windows(2)
        .map(|w| excess(w[1], w[0]))
        .fold(0.0, f64::max);
    push("green_moment_nonincreasing", green_monotone);

    let centre = |k: usize| run.snapshots[k][0];
    let q = m / (m - 1.0);
    let mut two_sided = 0.0_f64;
    for (a, &i0) in positive.iter().enumerate() {
        for (b, &i1) in positive.iter().enumerate().skip(a + 1) {
            let (t0, t1) = (run.times[i0], run.times[i1]);
            let mid = moments[i0] - moments[i1];
            let lower = (t0 / t1).powf(q) * (t1 - t0) * centre(i0).powf(m);
            two_sided = two_sided.max(excess(lower, mid));
            for &i in &positive[b..] {
                let t = run.times[i];
                let upper = (m - 1.0) * t.powf(q) * t0.powf(-1.0 / (m - 1.0)) * centre(i).powf(m);
                two_sided = two_sided.max(excess(mid, upper));
            }
        }
    }
    push("green_increment_two_sided", two_sided);

    for (label, p) in [("l1", 1.0), ("l2", 2.0), ("linf", f64::INFINITY)] {
        let n0 = grid.lp_norm(run.initial(), p);
        let worst = run
            .snapshots
            .iter()
            .map(|u| excess(grid.lp_norm(u, p), n0))
            .fold(0.0, f64::max);
        push(&format!("nonexpansive_{label}"), worst);
    }

    let scaled: Vec<f64> = positive
        .iter()
        .map(|&k| run.times[k].powf(1.0 / (m - 1.0)) * centre(k))
        .collect();
    let monotone = scaled.windows(2).map(|w| excess(w[0], w[1])).fold(0.0, f64::max);
    push("scaled_centre_nondecreasing", monotone);

    let distance = |k: usize| -> f64 {
        let diff: Vec<f64> = run.snapshots[k]
            .iter()
            .zip(&dominating.snapshots[k])
            .map(|(a, b)| a - b)
            .collect();
        grid.lp_norm(&diff, 1.0)
    };
    let d0 = distance(0);
    let contraction = (1..run.times.len()).map(|k| excess(distance(k), d0)).fold(0.0, f64::max);
    push("l1_contraction", contraction);

    if run.initial().iter().zip(dominating.initial()).any(|(a, b)| a > b) {
        return Err(Error::InvalidParameter(
            "comparison check needs the second initial datum to dominate the first".into(),
        ));
    }
    let comparison = (0..run.times.len())
        .map(|k| {
            let vmax = grid.lp_norm(&dominating.snapshots[k], f64::INFINITY);
            let over = run.snapshots[k]
                .iter()
                .zip(&dominating.snapshots[k])
                .map(|(a, b)| (a - b).max(0.0))
                .fold(0.0, f64::max);
            if vmax > 0.0 {
                over / vmax
            } else {
                over
            }
        })
        .fold(0.0, f64::max);
    push("comparison", comparison);

    Ok(EstimateReport { tolerance, checks })
}
