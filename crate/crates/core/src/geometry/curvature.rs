//! Sign of the Ricci curvature of `dr² + φ(r)² g_sphere`.

use serde::Serialize;

use super::profile::Warping;
use crate::error::{Error, Result};

/// Slack absorbing finite-difference noise in `φ''`.
pub const RICCI_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RicciCheck {
    pub nonnegative: bool,
    pub first_failure: Option<f64>,
}

/// Radial Ricci term `−φ''/φ` and tangential term `−φ''/φ + (n−2)(1 − φ'²)/φ²`
/// (both up to positive factors) must be `≥ −RICCI_SLACK` on the grid.
pub fn ricci_nonneg_check(warping: &Warping, n: usize, grid: &[f64]) -> Result<RicciCheck> {
    for &r in grid {
        let phi = warping.phi(r);
        if !(phi > 0.0) {
            return Err(Error::Domain(format!("warping function is not positive at r = {r}")));
        }
        let d1 = warping.dphi(r);
        let d2 = warping.d2phi(r);
        let radial = -d2 / phi;
        let tangential = radial + (n as f64 - 2.0) * (1.0 - d1 * d1) / (phi * phi);
        if radial < -RICCI_SLACK || tangential < -RICCI_SLACK {
            return Ok(RicciCheck {
                nonnegative: false,
                first_failure: Some(r),
            });
        }
    }
    Ok(RicciCheck {
        nonnegative: true,
        first_failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::log_space;
    use std::sync::Arc;

    #[test]
    fn flat_is_nonnegative() {
        let grid = log_space(1e-3, 1e3, 50);
        assert!(ricci_nonneg_check(&Warping::Flat, 3, &grid).unwrap().nonnegative);
    }

    #[test]
    fn hyperbolic_fails() {
        let grid = log_space(1e-2, 10.0, 20);
        let res = ricci_nonneg_check(&Warping::Sinh, 3, &grid).unwrap();
        assert!(!res.nonnegative);
        assert_eq!(res.first_failure, Some(grid[0]));
    }

    #[test]
    fn smoothed_cone_is_nonnegative() {
        let grid = log_space(1e-3, 1e3, 60);
        let w = Warping::Cone { c: 0.5, r0: 1.0 };
        assert!(ricci_nonneg_check(&w, 4, &grid).unwrap().nonnegative);
    }

    #[test]
    fn custom_cone_away_from_tip() {
        // φ = c r: φ'' = 0 and (1 − c²)/(c r)² > 0
        let c = 0.7;
        let w = Warping::Custom {
            phi: Arc::new(move |r| c * r),
            growth: crate::geometry::GrowthAtInfinity::Power {
                exponent: 3.0,
                log_exponent: 0.0,
            },
        };
        let grid = log_space(0.5, 100.0, 30);
        assert!(ricci_nonneg_check(&w, 3, &grid).unwrap().nonnegative);
    }

    #[test]
    fn nonpositive_phi_is_an_error() {
        let w = Warping::Custom {
            phi: Arc::new(|r| 1.0 - r),
            growth: crate::geometry::GrowthAtInfinity::Exponential,
        };
        assert!(ricci_nonneg_check(&w, 3, &[0.5, 2.0]).is_err());
    }
}
