//! Residual of the weak dual formulation
//! `∫∫ ∂_t ψ (−Δ)⁻¹u − ∫∫ u^m ψ = 0` for separable `ψ(t, r) = φ(t) η(r)`.
//!
//! The space integral `∫ η (−Δ)⁻¹u` is evaluated as `∫ u (−Δ)⁻¹η` (the
//! operator is symmetric), so only the potential of the fixed `η` is needed.

use serde::Serialize;

use super::grid::RadialGrid;
use super::solver::RunRecord;
use crate::error::{Error, Result};
use crate::geometry::VolumeProfile;
use crate::green::{Potential, RadialDensity};

/// `φ(t) = exp(−1/(1 − x²))` with `x` mapping `(start, end)` onto `(−1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BumpInTime {
    pub start: f64,
    pub end: f64,
}

impl BumpInTime {
    fn x(&self, t: f64) -> f64 {
        (2.0 * t - (self.start + self.end)) / (self.end - self.start)
    }

    pub fn value(&self, t: f64) -> f64 {
        let x = self.x(t);
        if x.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - x * x)).exp()
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let x = self.x(t);
        if x.abs() >= 1.0 {
            return 0.0;
        }
        let d = 1.0 - x * x;
        self.value(t) * (-2.0 * x / (d * d)) * 2.0 / (self.end - self.start)
    }
}

/// `ψ = φ(t) η(r)` with `η = 1` on `r ≤ inner`, `0` beyond `outer`, and a
/// cubic smoothstep in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparableTest {
    pub phi: BumpInTime,
    pub inner: f64,
    pub outer: f64,
}

impl SeparableTest {
    pub fn eta(&self, r: f64) -> f64 {
        eta(self.inner, self.outer, r)
    }
}

fn eta(inner: f64, outer: f64, r: f64) -> f64 {
    if r <= inner {
        1.0
    } else if r >= outer {
        0.0
    } else {
        let s = (r - inner) / (outer - inner);
        1.0 - s * s * (3.0 - 2.0 * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeakDualResidual {
    /// `∫∫ φ' η (−Δ)⁻¹u`.
    pub potential_term: f64,
    /// `∫∫ φ η u^m`.
    pub flux_term: f64,
    pub residual: f64,
}

/// Trapezoid rule in time over the snapshots; the bump must lie inside the
/// recorded time window.
pub fn weak_dual_residual(
    run: &RunRecord,
    grid: &RadialGrid,
    profile: &VolumeProfile,
    test: &SeparableTest,
) -> Result<WeakDualResidual> {
    let (t_first, t_last) = (run.times[0], run.times[run.times.len() - 1]);
    if !(test.phi.start > 0.0 && test.phi.start < test.phi.end)
        || test.phi.start < t_first
        || test.phi.end > t_last
    {
        return Err(Error::InvalidParameter(format!(
            "time factor must be supported in ({t_first}, {t_last}), got ({}, {})",
            test.phi.start, test.phi.end
        )));
    }
    if !(test.inner > 0.0 && test.outer > test.inner) {
        return Err(Error::InvalidParameter("need 0 < inner < outer for the space factor".into()));
    }
    let (inner, outer) = (test.inner, test.outer);
    let density = RadialDensity::new(move |r| eta(inner, outer, r), outer, vec![inner]);
    let pot = Potential::new(profile, density)?;
    let dual_w = grid.cell_weights(profile, |r| pot.value(r).unwrap_or(f64::NAN));
    let eta_w = grid.cell_weights(profile, |r| test.eta(r));
    let m = run.m;
    let a: Vec<f64> = run
        .snapshots
        .iter()
        .map(|u| u.iter().zip(&dual_w).map(|(x, w)| x * w).sum())
        .collect();
    let b: Vec<f64> = run
        .snapshots
        .iter()
        .map(|u| u.iter().zip(&eta_w).map(|(x, w)| x.powf(m) * w).sum())
        .collect();
    let mut potential_term = 0.0;
    let mut flux_term = 0.0;
    for k in 1..run.times.len() {
        let (t0, t1) = (run.times[k - 1], run.times[k]);
        let h = 0.5 * (t1 - t0);
        potential_term += h * (test.phi.derivative(t0) * a[k - 1] + test.phi.derivative(t1) * a[k]);
        flux_term += h * (test.phi.value(t0) * b[k - 1] + test.phi.value(t1) * b[k]);
    }
    Ok(WeakDualResidual {
        potential_term,
        flux_term,
        residual: (potential_term - flux_term).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_derivative_matches_difference_quotient() {
        let b = BumpInTime { start: 0.5, end: 1.5 };
        for t in [0.6, 0.9, 1.2, 1.45] {
            let h = 1e-6;
            let fd = (b.value(t + h) - b.value(t - h)) / (2.0 * h);
            assert!((fd - b.derivative(t)).abs() < 1e-7);
        }
        assert_eq!(b.value(0.5), 0.0);
        assert_eq!(b.derivative(2.0), 0.0);
    }
}
