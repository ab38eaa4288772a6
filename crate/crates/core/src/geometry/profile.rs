//! Ball-volume and sphere-area profiles of rotationally symmetric model manifolds.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// Volume of the unit ball in `ℝⁿ`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    std::f64::consts::PI.powf(h) / gamma(h + 1.0)
}

/// Area of the unit sphere `Sⁿ⁻¹ ⊂ ℝⁿ`, i.e. `n·ωₙ`.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// Leading-order behaviour of `V(R)` as `R → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GrowthAtInfinity {
    /// `V(R) ≍ R^exponent (log R)^log_exponent`.
    Power { exponent: f64, log_exponent: f64 },
    Exponential,
}

impl GrowthAtInfinity {
    /// Whether `∫^∞ t / V(t) dt` (equivalently `∫^∞ ds / S(s)`) converges.
    pub fn is_nonparabolic(&self) -> bool {
        match *self {
            GrowthAtInfinity::Power {
                exponent,
                log_exponent,
            } => exponent > 2.0 || (exponent == 2.0 && log_exponent > 1.0),
            GrowthAtInfinity::Exponential => true,
        }
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Warping function `φ` of the metric `dr² + φ(r)² g_sphere`.
#[derive(Clone)]
pub enum Warping {
    /// `φ(r) = r`.
    Flat,
    /// `φ(r) = sinh r` (hyperbolic space).
    Sinh,
    /// `φ(r) = c·r + (1 − c)·r₀·tanh(r / r₀)`, a cone of opening `c` with a smooth tip.
    Cone { c: f64, r0: f64 },
    /// User-supplied `φ`; derivatives are taken by central differences.
    Custom { phi: ScalarFn, growth: GrowthAtInfinity },
}

impl fmt::Debug for Warping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warping::Flat => write!(f, "Flat"),
            Warping::Sinh => write!(f, "Sinh"),
            Warping::Cone { c, r0 } => write!(f, "Cone {{ c: {c}, r0: {r0} }}"),
            Warping::Custom { growth, .. } => write!(f, "Custom {{ growth: {growth:?} }}"),
        }
    }
}

impl Warping {
    pub fn phi(&self, r: f64) -> f64 {
        match self {
            Warping::Flat => r,
            Warping::Sinh => r.sinh(),
            Warping::Cone { c, r0 } => c * r + (1.0 - c) * r0 * (r / r0).tanh(),
            Warping::Custom { phi, .. } => phi(r),
        }
    }

    pub fn dphi(&self, r: f64) -> f64 {
        match self {
            Warping::Flat => 1.0,
            Warping::Sinh => r.cosh(),
            Warping::Cone { c, r0 } => {
                let s = 1.0 / (r / r0).cosh();
                c + (1.0 - c) * s * s
            }
            Warping::Custom { phi, .. } => {
                let h = 1e-5 * r.abs().max(1.0);
                (phi(r + h) - phi(r - h)) / (2.0 * h)
            }
        }
    }

    pub fn d2phi(&self, r: f64) -> f64 {
        match self {
            Warping::Flat => 0.0,
            Warping::Sinh => r.sinh(),
            Warping::Cone { c, r0 } => {
                let x = r / r0;
                let s = 1.0 / x.cosh();
                -2.0 * (1.0 - c) * s * s * x.tanh() / r0
            }
            Warping::Custom { phi, .. } => {
                let h = 1e-3 * r.abs().max(1.0);
                (phi(r + h) - 2.0 * phi(r) + phi(r - h)) / (h * h)
            }
        }
    }

    fn growth(&self, n: usize) -> GrowthAtInfinity {
        match self {
            Warping::Flat | Warping::Cone { .. } => GrowthAtInfinity::Power {
                exponent: n as f64,
                log_exponent: 0.0,
            },
            Warping::Sinh => GrowthAtInfinity::Exponential,
            Warping::Custom { growth, .. } => *growth,
        }
    }
}

/// Closed-form or tabulated description of `V`.
#[derive(Debug, Clone)]
pub enum ProfileForm {
    Euclidean,
    /// `V = scale·Rⁿ` on `(0, 1)` and `scale·R^λ` on `[1, ∞)`.
    Power { lambda: f64, scale: f64 },
    /// `V = scale·Rⁿ` on `(0, 1)` and `scale·R^λ (1 + ln R)^σ` on `[1, ∞)`.
    PowerLog { lambda: f64, sigma: f64, scale: f64 },
    /// `S = σₙ₋₁ φⁿ⁻¹`, `V` by quadrature.
    Warped(Warping),
    /// Log-log linear interpolation through `(R, V)` samples, extended by `Rⁿ`
    /// scaling below the first sample and by the last segment's power law beyond
    /// the last one.
    Tabulated { radii: Vec<f64>, volumes: Vec<f64> },
}

/// Ball volume `V(R)` and sphere area `S(R) = V'(R)` about the pole of a model manifold.
#[derive(Debug, Clone)]
pub struct VolumeProfile {
    dim: usize,
    form: ProfileForm,
}

impl VolumeProfile {
    pub fn euclidean(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            form: ProfileForm::Euclidean,
        })
    }

    pub fn power(dim: usize, lambda: f64, scale: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(lambda > 2.0 && lambda <= dim as f64) {
            return Err(Error::InvalidParameter(format!(
                "power profile needs lambda in (2, {dim}], got {lambda}"
            )));
        }
        check_scale(scale)?;
        Ok(Self {
            dim,
            form: ProfileForm::Power { lambda, scale },
        })
    }

    pub fn power_log(dim: usize, lambda: f64, sigma: f64, scale: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(lambda >= 2.0 && lambda <= dim as f64) {
            return Err(Error::InvalidParameter(format!(
                "power-log profile needs lambda in [2, {dim}], got {lambda}"
            )));
        }
        if lambda + sigma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "power-log profile needs lambda + sigma > 0 for an increasing volume, got {}",
                lambda + sigma
            )));
        }
        check_scale(scale)?;
        Ok(Self {
            dim,
            form: ProfileForm::PowerLog {
                lambda,
                sigma,
                scale,
            },
        })
    }

    pub fn warped(dim: usize, warping: Warping) -> Result<Self> {
        check_dim(dim)?;
        if let Warping::Cone { c, r0 } = warping {
            if !(c > 0.0 && c <= 1.0 && r0 > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "cone warping needs c in (0, 1] and r0 > 0, got c = {c}, r0 = {r0}"
                )));
            }
        }
        Ok(Self {
            dim,
            form: ProfileForm::Warped(warping),
        })
    }

    pub fn tabulated(dim: usize, radii: Vec<f64>, volumes: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        if radii.len() != volumes.len() || radii.len() < 2 {
            return Err(Error::InvalidParameter(
                "volume table needs at least two (R, V) rows".into(),
            ));
        }
        for i in 0..radii.len() {
            if !(radii[i] > 0.0 && volumes[i] > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "table row {i} must have positive R and V"
                )));
            }
            if i > 0 && radii[i] <= radii[i - 1] {
                return Err(Error::InvalidParameter(format!(
                    "table radii must increase (row {i})"
                )));
            }
            if i > 0 && volumes[i] <= volumes[i - 1] {
                return Err(Error::NonmonotoneVolume(format!(
                    "V({}) = {} does not exceed V({}) = {}",
                    radii[i],
                    volumes[i],
                    radii[i - 1],
                    volumes[i - 1]
                )));
            }
        }
        Ok(Self {
            dim,
            form: ProfileForm::Tabulated { radii, volumes },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn form(&self) -> &ProfileForm {
        &self.form
    }

    /// Largest radius at which the profile is data rather than extrapolation.
    pub fn r_max(&self) -> f64 {
        match &self.form {
            ProfileForm::Tabulated { radii, .. } => *radii.last().expect("nonempty table"),
            _ => f64::INFINITY,
        }
    }

    pub fn growth_at_infinity(&self) -> GrowthAtInfinity {
        let n = self.dim as f64;
        match &self.form {
            ProfileForm::Euclidean => GrowthAtInfinity::Power {
                exponent: n,
                log_exponent: 0.0,
            },
            ProfileForm::Power { lambda, .. } => GrowthAtInfinity::Power {
                exponent: *lambda,
                log_exponent: 0.0,
            },
            ProfileForm::PowerLog { lambda, sigma, .. } => GrowthAtInfinity::Power {
                exponent: *lambda,
                log_exponent: *sigma,
            },
            ProfileForm::Warped(w) => w.growth(self.dim),
            ProfileForm::Tabulated { radii, volumes } => {
                let k = radii.len() - 1;
                GrowthAtInfinity::Power {
                    exponent: segment_exponent(radii, volumes, k - 1),
                    log_exponent: 0.0,
                }
            }
        }
    }

    /// Pure power exponent `α` with `V ≍ R^α` at infinity, when the profile has one.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.growth_at_infinity() {
            GrowthAtInfinity::Power {
                exponent,
                log_exponent: 0.0,
            } => Some(exponent),
            _ => None,
        }
    }

    pub fn is_nonparabolic(&self) -> bool {
        self.growth_at_infinity().is_nonparabolic()
    }

    pub fn volume(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let n = self.dim as i32;
        match &self.form {
            ProfileForm::Euclidean => unit_ball_volume(self.dim) * r.powi(n),
            ProfileForm::Power { lambda, scale } => {
                if r < 1.0 {
                    scale * r.powi(n)
                } else {
                    scale * r.powf(*lambda)
                }
            }
            ProfileForm::PowerLog {
                lambda,
                sigma,
                scale,
            } => {
                if r < 1.0 {
                    scale * r.powi(n)
                } else {
                    scale * r.powf(*lambda) * (1.0 + r.ln()).powf(*sigma)
                }
            }
            ProfileForm::Warped(_) => {
                let tol = Tolerance::new(0.0, 1e-13);
                integrate(|s| self.area(s), 0.0, r, tol).unwrap_or(f64::NAN)
            }
            ProfileForm::Tabulated { radii, volumes } => {
                let (i, p) = self.table_segment(radii, volumes, r);
                volumes[i] * (r / radii[i]).powf(p)
            }
        }
    }

    pub fn area(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let n = self.dim as i32;
        let nf = self.dim as f64;
        match &self.form {
            ProfileForm::Euclidean => unit_sphere_area(self.dim) * r.powi(n - 1),
            ProfileForm::Power { lambda, scale } => {
                if r < 1.0 {
                    scale * nf * r.powi(n - 1)
                } else {
                    scale * lambda * r.powf(lambda - 1.0)
                }
            }
            ProfileForm::PowerLog {
                lambda,
                sigma,
                scale,
            } => {
                if r < 1.0 {
                    scale * nf * r.powi(n - 1)
                } else {
                    let l = 1.0 + r.ln();
                    scale * r.powf(lambda - 1.0) * l.powf(sigma - 1.0) * (lambda * l + sigma)
                }
            }
            ProfileForm::Warped(w) => unit_sphere_area(self.dim) * w.phi(r).powi(n - 1),
            ProfileForm::Tabulated { radii, volumes } => {
                let (i, p) = self.table_segment(radii, volumes, r);
                p * volumes[i] * (r / radii[i]).powf(p) / r
            }
        }
    }

    /// Radii where `S` may be discontinuous (quadrature breakpoints).
    pub fn kinks(&self) -> Vec<f64> {
        match &self.form {
            ProfileForm::Power { .. } | ProfileForm::PowerLog { .. } => vec![1.0],
            ProfileForm::Tabulated { radii, .. } => radii.clone(),
            _ => Vec::new(),
        }
    }

    fn table_segment(&self, radii: &[f64], volumes: &[f64], r: f64) -> (usize, f64) {
        if r <= radii[0] {
            return (0, self.dim as f64);
        }
        let last = radii.len() - 1;
        let i = match radii.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => i.min(last - 1),
            Err(i) => (i - 1).min(last - 1),
        };
        (i, segment_exponent(radii, volumes, i))
    }
}

fn segment_exponent(radii: &[f64], volumes: &[f64], i: usize) -> f64 {
    (volumes[i + 1] / volumes[i]).ln() / (radii[i + 1] / radii[i]).ln()
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 3 {
        Err(Error::Dimension(dim))
    } else {
        Ok(())
    }
}

fn check_scale(scale: f64) -> Result<()> {
    if scale > 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "volume scale must be positive, got {scale}"
        )))
    }
}

/// JSON profile descriptor: `{"dimension", "form", "params", "table"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDescriptor {
    pub dimension: usize,
    pub form: String,
    #[serde(default)]
    pub params: ProfileParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
}

impl ProfileDescriptor {
    pub fn euclidean(dimension: usize) -> Self {
        Self {
            dimension,
            form: "euclidean".into(),
            params: ProfileParams::default(),
            table: None,
        }
    }
}

fn required(value: Option<f64>, name: &str, form: &str) -> Result<f64> {
    value.ok_or_else(|| Error::InvalidParameter(format!("profile form '{form}' needs params.{name}")))
}

/// Builds a profile from its descriptor.
pub fn make_profile(desc: &ProfileDescriptor) -> Result<VolumeProfile> {
    let n = desc.dimension;
    let p = &desc.params;
    let form = desc.form.as_str();
    match form {
        "euclidean" => VolumeProfile::euclidean(n),
        "power" => VolumeProfile::power(n, required(p.lambda, "lambda", form)?, p.scale.unwrap_or(1.0)),
        "power_log" => VolumeProfile::power_log(
            n,
            required(p.lambda, "lambda", form)?,
            required(p.sigma, "sigma", form)?,
            p.scale.unwrap_or(1.0),
        ),
        "warped" => {
            let warping = match p.phi.as_deref() {
                Some("flat") => Warping::Flat,
                Some("sinh") => Warping::Sinh,
                Some("cone") => Warping::Cone {
                    c: required(p.c, "c", form)?,
                    r0: p.r0.unwrap_or(1.0),
                },
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown warping {other:?}; expected flat, sinh or cone"
                    )))
                }
            };
            VolumeProfile::warped(n, warping)
        }
        "tabulated" => {
            let table = desc
                .table
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("tabulated profile needs a table".into()))?;
            let (radii, volumes) = table.iter().map(|row| (row[0], row[1])).unzip();
            VolumeProfile::tabulated(n, radii, volumes)
        }
        other => Err(Error::InvalidParameter(format!("unknown profile form '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn euclidean_three() {
        let p = VolumeProfile::euclidean(3).unwrap();
        assert!((p.volume(2.0) - 4.0 * PI / 3.0 * 8.0).abs() < 1e-12);
        assert!((p.area(2.0) - 4.0 * PI * 4.0).abs() < 1e-12);
    }

    #[test]
    fn power_three_area() {
        let p = VolumeProfile::power(5, 3.0, 1.0).unwrap();
        for r in [1.0, 2.0, 7.5] {
            assert!((p.area(r) - 3.0 * r * r).abs() < 1e-12);
            assert!((p.volume(r) - r * r * r).abs() < 1e-12);
        }
    }

    #[test]
    fn nonmonotone_table_is_rejected() {
        let err = VolumeProfile::tabulated(3, vec![1.0, 2.0], vec![5.0, 4.0]).unwrap_err();
        assert!(err.to_string().contains("nonmonotone volume"), "{err}");
    }

    #[test]
    fn dimension_two_is_rejected() {
        assert!(matches!(VolumeProfile::euclidean(2), Err(Error::Dimension(2))));
    }

    #[test]
    fn power_lambda_range() {
        assert!(VolumeProfile::power(5, 2.0, 1.0).is_err());
        assert!(VolumeProfile::power(5, 5.5, 1.0).is_err());
        assert!(VolumeProfile::power(5, 5.0, 1.0).is_ok());
    }

    #[test]
    fn flat_warping_matches_euclidean() {
        let w = VolumeProfile::warped(4, Warping::Flat).unwrap();
        let e = VolumeProfile::euclidean(4).unwrap();
        for r in [0.3, 1.0, 4.0] {
            assert!(((w.volume(r) - e.volume(r)) / e.volume(r)).abs() < 1e-12);
            assert!(((w.area(r) - e.area(r)) / e.area(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn tabulated_interpolates_power_law_exactly() {
        let radii: Vec<f64> = vec![1.0, 2.0, 4.0, 8.0];
        let volumes: Vec<f64> = radii.iter().map(|r| r.powi(3)).collect();
        let p = VolumeProfile::tabulated(3, radii, volumes).unwrap();
        for r in [0.5, 1.5, 3.0, 20.0] {
            assert!((p.volume(r) - r.powi(3)).abs() < 1e-10 * r.powi(3));
            assert!((p.area(r) - 3.0 * r * r).abs() < 1e-10 * r * r);
        }
        assert_eq!(p.r_max(), 8.0);
    }

    #[test]
    fn descriptor_round_trip() {
        let json = r#"{"dimension": 5, "form": "power", "params": {"lambda": 3.0}}"#;
        let d: ProfileDescriptor = serde_json::from_str(json).unwrap();
        let p = make_profile(&d).unwrap();
        assert_eq!(p.dim(), 5);
        assert!((p.volume(2.0) - 8.0).abs() < 1e-12);
        let bad = r#"{"dimension": 5, "form": "power", "params": {"lamda": 3.0}}"#;
        assert!(serde_json::from_str::<ProfileDescriptor>(bad).is_err());
    }

    #[test]
    fn unit_constants() {
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!((unit_sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }
}
