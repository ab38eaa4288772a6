//! The Barenblatt self-similar solutions of `∂_t v = Δ(v^m)` on `ℝ^k`.

use serde::Serialize;
use statrs::function::beta::beta;

use crate::error::{Error, Result};
use crate::geometry::unit_sphere_area;

/// `v(r, t) = t^{−α} [A − c r² t^{−2β}]_+^{1/(m−1)}` with
/// `α = k/(k(m−1)+2)`, `β = α/k`, `c = α(m−1)/(2mk)`.
///
/// `eps` is the time shift used when the profile seeds a solver run:
/// solver time `t` corresponds to Barenblatt time `t + eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BarenblattParams {
    pub k: usize,
    pub m: f64,
    pub a: f64,
    pub eps: f64,
}

impl BarenblattParams {
    pub fn new(k: usize, m: f64, a: f64, eps: f64) -> Result<Self> {
        if k < 1 {
            return Err(Error::Dimension(k));
        }
        if !(m > 1.0) || !(a > 0.0) || !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Barenblatt needs m > 1, A > 0, eps > 0; got m = {m}, A = {a}, eps = {eps}"
            )));
        }
        Ok(Self { k, m, a, eps })
    }

    pub fn alpha(&self) -> f64 {
        let k = self.k as f64;
        k / (k * (self.m - 1.0) + 2.0)
    }

    pub fn beta(&self) -> f64 {
        self.alpha() / self.k as f64
    }

    pub fn c(&self) -> f64 {
        self.alpha() * (self.m - 1.0) / (2.0 * self.m * self.k as f64)
    }

    pub fn value(&self, r: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("Barenblatt profile needs t > 0, got {t}")));
        }
        Ok(self.value_unchecked(r, t))
    }

    pub(crate) fn value_unchecked(&self, r: f64, t: f64) -> f64 {
        let bracket = self.a - self.c() * r * r * t.powf(-2.0 * self.beta());
        if bracket <= 0.0 {
            0.0
        } else {
            t.powf(-self.alpha()) * bracket.powf(1.0 / (self.m - 1.0))
        }
    }

    /// `‖v(t)‖_∞ = A^{1/(m−1)} t^{−α}`.
    pub fn sup(&self, t: f64) -> f64 {
        self.a.powf(1.0 / (self.m - 1.0)) * t.powf(-self.alpha())
    }

    pub fn support_radius(&self, t: f64) -> f64 {
        (self.a / self.c()).sqrt() * t.powf(self.beta())
    }

    /// `∫_{ℝ^k} v(t)`, independent of `t`:
    /// `σ_{k−1} A^{p+k/2} c^{−k/2} B(k/2, p+1) / 2` with `p = 1/(m−1)`.
    pub fn mass(&self) -> f64 {
        let k = self.k as f64;
        let p = 1.0 / (self.m - 1.0);
        unit_sphere_area(self.k) * self.a.powf(p + k / 2.0) * self.c().powf(-k / 2.0)
            * beta(k / 2.0, p + 1.0)
            / 2.0
    }

    /// The `A` for which the mass of `v` equals `A` itself.
    pub fn self_consistent_a(k: usize, m: f64) -> Result<f64> {
        let unit = Self::new(k, m, 1.0, 1.0)?.mass();
        let q = 1.0 / (m - 1.0) + k as f64 / 2.0;
        // mass(A) = unit · A^q = A
        Ok(unit.powf(-1.0 / (q - 1.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_for_k3_m2() {
        let b = BarenblattParams::new(3, 2.0, 1.0, 1.0).unwrap();
        assert!((b.alpha() - 0.6).abs() < 1e-15);
        assert!((b.beta() - 0.2).abs() < 1e-15);
        assert!((b.c() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn peak_value() {
        let b = BarenblattParams::new(4, 3.0, 2.0, 1.0).unwrap();
        for t in [0.5, 1.0, 7.0] {
            assert!((b.value(0.0, t).unwrap() - b.sup(t)).abs() < 1e-15 * b.sup(t));
        }
        assert_eq!(b.value(b.support_radius(2.0) * 1.0001, 2.0).unwrap(), 0.0);
        assert!(b.value(1.0, 0.0).is_err());
    }

    #[test]
    fn self_consistent_mass() {
        let a = BarenblattParams::self_consistent_a(3, 2.0).unwrap();
        let b = BarenblattParams::new(3, 2.0, a, 1.0).unwrap();
        assert!((b.mass() / a - 1.0).abs() < 1e-12);
    }
}
