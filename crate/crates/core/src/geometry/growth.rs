//! The comparison function `f` of the uniform volume growth condition and its
//! tail integral `T(R) = ∫_R^∞ dt / f(t)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_tail, Tolerance};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum GrowthForm {
    /// `f(t) = t^{k−1}`.
    Power { k: f64 },
    /// `f(t) = t^{k−1} (log t)^b`.
    PowerLog { k: f64, b: f64 },
    Numeric(ScalarFn),
}

impl fmt::Debug for GrowthForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthForm::Power { k } => write!(f, "Power {{ k: {k} }}"),
            GrowthForm::PowerLog { k, b } => write!(f, "PowerLog {{ k: {k}, b: {b} }}"),
            GrowthForm::Numeric(_) => write!(f, "Numeric"),
        }
    }
}

/// Nondecreasing `f: [R₀, ∞) → (0, ∞)`.
///
/// A divergent tail is not a construction error: `tail` returns `+∞` and the
/// assumption check reports `β = ∞`.
#[derive(Debug, Clone)]
pub struct GrowthFunction {
    form: GrowthForm,
    r0: f64,
}

impl GrowthFunction {
    pub fn power(k: f64, r0: f64) -> Result<Self> {
        check_r0(r0)?;
        if k < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "f(t) = t^(k-1) is nondecreasing only for k >= 1, got k = {k}"
            )));
        }
        Ok(Self {
            form: GrowthForm::Power { k },
            r0,
        })
    }

    pub fn power_log(k: f64, b: f64, r0: f64) -> Result<Self> {
        check_r0(r0)?;
        if b != 0.0 && r0 <= 1.0 {
            return Err(Error::InvalidParameter(
                "f(t) = t^(k-1) (log t)^b needs R0 > 1 when b != 0".into(),
            ));
        }
        // f'/f = ((k-1) log t + b) / (t log t) must be >= 0 from R0 on
        if (k - 1.0) * r0.ln() + b < 0.0 || k < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "f(t) = t^(k-1) (log t)^b is decreasing at R0 = {r0} for k = {k}, b = {b}"
            )));
        }
        Ok(Self {
            form: GrowthForm::PowerLog { k, b },
            r0,
        })
    }

    pub fn numeric<F>(f: F, r0: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_r0(r0)?;
        if !(f(r0) > 0.0) {
            return Err(Error::InvalidParameter(format!("f(R0) must be positive, got {}", f(r0))));
        }
        Ok(Self {
            form: GrowthForm::Numeric(Arc::new(f)),
            r0,
        })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn form(&self) -> &GrowthForm {
        &self.form
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.form {
            GrowthForm::Power { k } => t.powf(k - 1.0),
            GrowthForm::PowerLog { k, b } => t.powf(k - 1.0) * t.ln().powf(*b),
            GrowthForm::Numeric(f) => f(t),
        }
    }

    /// `T(R) = ∫_R^∞ dt / f(t)`, closed form where one exists, `+∞` when divergent.
    pub fn tail(&self, r: f64) -> f64 {
        match self.form {
            GrowthForm::Power { k } => {
                if k > 2.0 {
                    r.powf(2.0 - k) / (k - 2.0)
                } else {
                    f64::INFINITY
                }
            }
            GrowthForm::PowerLog { k, b } => {
                if k == 2.0 {
                    if b > 1.0 {
                        r.ln().powf(1.0 - b) / (b - 1.0)
                    } else {
                        f64::INFINITY
                    }
                } else if k < 2.0 {
                    f64::INFINITY
                } else {
                    self.quadrature_tail(r)
                }
            }
            GrowthForm::Numeric(_) => self.quadrature_tail(r),
        }
    }

    /// `T(R)` by adaptive quadrature regardless of form; `+∞` if it fails to converge.
    pub fn quadrature_tail(&self, r: f64) -> f64 {
        integrate_tail(|t| 1.0 / self.eval(t), r, Tolerance::new(1e-20, 1e-12))
            .unwrap_or(f64::INFINITY)
    }

    /// `β = T(R₀)`.
    pub fn beta(&self) -> f64 {
        self.tail(self.r0)
    }

    /// Smallest `R ≥ R₀` with `T(R) ≤ target` (for `target < β`).
    pub fn tail_inverse(&self, target: f64) -> Result<f64> {
        if self.beta().is_infinite() {
            return Err(Error::Domain("tail integral of f diverges".into()));
        }
        if self.beta() <= target {
            return Ok(self.r0);
        }
        // T is decreasing, so -T is increasing
        crate::roots::solve_increasing(|r| -self.tail(r), -target, self.r0, 1e-12)
    }
}

fn check_r0(r0: f64) -> Result<()> {
    if r0 >= 1.0 && r0.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("R0 must be >= 1, got {r0}")))
    }
}

/// JSON descriptor for `f`: `{"form": "power"|"power_log", "k", "b", "r0"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthDescriptor {
    pub form: String,
    pub k: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default = "default_r0")]
    pub r0: f64,
}

fn default_r0() -> f64 {
    1.0
}

impl GrowthDescriptor {
    pub fn build(&self) -> Result<GrowthFunction> {
        match self.form.as_str() {
            "power" => GrowthFunction::power(self.k, self.r0),
            "power_log" => GrowthFunction::power_log(self.k, self.b.unwrap_or(0.0), self.r0),
            other => Err(Error::InvalidParameter(format!("unknown growth form '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn power_tail_closed_form() {
        let f = GrowthFunction::power(5.0, 1.0).unwrap();
        assert!((f.beta() - 1.0 / 3.0).abs() < 1e-15);
        assert!((f.tail(2.0) - 2f64.powi(-3) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn quadrature_agrees_with_closed_forms() {
        let cases = [
            GrowthFunction::power(3.0, 1.0).unwrap(),
            GrowthFunction::power(4.5, 1.0).unwrap(),
        ];
        for f in &cases {
            for r in [3.0, 10.0, 100.0] {
                let exact = f.tail(r);
                let quad = f.quadrature_tail(r);
                assert!(((quad - exact) / exact).abs() < 1e-8, "{f:?} r={r}: {quad} vs {exact}");
            }
        }
    }

    #[test]
    fn log_tail_closed_form() {
        let f = GrowthFunction::power_log(2.0, 2.0, E).unwrap();
        assert!((f.tail(E * E) - 0.5).abs() < 1e-15);
        assert!((f.beta() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn power_log_above_two_uses_quadrature() {
        let f = GrowthFunction::power_log(4.0, 1.0, E).unwrap();
        // T(R) ≈ R^{-2} / (2 log R) to leading order
        let r = 1e3_f64;
        let t = f.tail(r);
        let lead = r.powi(-2) / (2.0 * r.ln());
        assert!((t / lead - 1.0).abs() < 0.1, "{t} vs {lead}");
    }

    #[test]
    fn k_two_diverges() {
        let f = GrowthFunction::power(2.0, 1.0).unwrap();
        assert!(f.beta().is_infinite());
        assert!(f.tail_inverse(0.1).is_err());
    }

    #[test]
    fn tail_inverse_round_trip() {
        let f = GrowthFunction::power(5.0, 1.0).unwrap();
        let r = f.tail_inverse(1e-4).unwrap();
        assert!((f.tail(r) - 1e-4).abs() < 1e-12);
    }

    #[test]
    fn decreasing_power_log_rejected() {
        assert!(GrowthFunction::power_log(2.0, -2.0, 1.5).is_err());
        assert!(GrowthFunction::power_log(2.0, 2.0, 1.0).is_err());
    }
}
