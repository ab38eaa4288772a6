//! L¹ → L^∞ and L¹_G → L^∞ smoothing bounds for the porous medium equation.
//!
//! The large-time L¹ bound is built from
//! `h(R) = R f(R) T(R) + R²`, a volume lower envelope `F`, and
//! `θ(R) = F(R) h(R)^{1/(m−1)}`; it reads
//! `C t^{−1/(m−1)} h(θ⁻¹(t^{1/(m−1)} ‖u₀‖₁))^{1/(m−1)}` once
//! `t ≥ K ‖u₀‖₁^{−(m−1)}` with `K = θ(R₀)^{m−1}`. The multiplicative constants
//! are not explicit; they are exposed as [`Prefactors`] and default to 1.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{GrowthFunction, VolumeProfile};
use crate::roots::solve_increasing;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Relative tolerance of the θ inversion.
pub const THETA_TOLERANCE: f64 = 1e-10;

/// `h(R) = R f(R) T(R) + R²` for `R ≥ R₀`.
pub fn eval_h(f: &GrowthFunction, r: f64) -> Result<f64> {
    h_with_tail(f, r, f.tail(r))
}

/// Same as [`eval_h`] but with `T(R)` always taken by quadrature.
pub fn eval_h_quadrature(f: &GrowthFunction, r: f64) -> Result<f64> {
    h_with_tail(f, r, f.quadrature_tail(r))
}

fn h_with_tail(f: &GrowthFunction, r: f64, tail: f64) -> Result<f64> {
    if !(r >= f.r0()) {
        return Err(Error::Domain(format!("h is defined for R >= R0 = {}, got {r}", f.r0())));
    }
    if !tail.is_finite() {
        return Err(Error::Domain("tail integral of f diverges".into()));
    }
    Ok(r * f.eval(r) * tail + r * r)
}

/// Unspecified constants of the bounds; `1` unless the caller overrides them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prefactors {
    pub large: f64,
    pub small: f64,
}

impl Default for Prefactors {
    fn default() -> Self {
        Self {
            large: 1.0,
            small: 1.0,
        }
    }
}

/// Scaffolding `h`, `F`, `θ` of the L¹ smoothing bound.
#[derive(Clone)]
pub struct SmoothingBound {
    m: f64,
    dim: usize,
    r0: f64,
    h: ScalarFn,
    envelope: ScalarFn,
    envelope_label: String,
    pub prefactors: Prefactors,
}

impl fmt::Debug for SmoothingBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothingBound")
            .field("m", &self.m)
            .field("dim", &self.dim)
            .field("r0", &self.r0)
            .field("envelope", &self.envelope_label)
            .field("prefactors", &self.prefactors)
            .finish()
    }
}

fn check_m(m: f64) -> Result<()> {
    if m > 1.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("porous medium exponent must exceed 1, got {m}")))
    }
}

impl SmoothingBound {
    /// `h` from `f`, `F` the pole-centered volume `V`.
    pub fn from_growth(profile: &VolumeProfile, f: &GrowthFunction, m: f64) -> Result<Self> {
        check_m(m)?;
        if f.beta().is_infinite() {
            return Err(Error::Domain("tail integral of f diverges".into()));
        }
        let fh = f.clone();
        let pv = profile.clone();
        Ok(Self {
            m,
            dim: profile.dim(),
            r0: f.r0(),
            h: Arc::new(move |r| eval_h(&fh, r).unwrap_or(f64::NAN)),
            envelope: Arc::new(move |r| pv.volume(r)),
            envelope_label: "pole-centered volume".into(),
            prefactors: Prefactors::default(),
        })
    }

    /// Arbitrary `h` and `F`; both must be positive and increasing on `[R₀, ∞)`.
    pub fn custom<H, F>(m: f64, dim: usize, r0: f64, h: H, envelope: F) -> Result<Self>
    where
        H: Fn(f64) -> f64 + Send + Sync + 'static,
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_m(m)?;
        if dim < 3 {
            return Err(Error::Dimension(dim));
        }
        if !(r0 > 0.0) {
            return Err(Error::InvalidParameter(format!("R0 must be positive, got {r0}")));
        }
        Ok(Self {
            m,
            dim,
            r0,
            h: Arc::new(h),
            envelope: Arc::new(envelope),
            envelope_label: "user override".into(),
            prefactors: Prefactors::default(),
        })
    }

    /// Replaces `F` by a user-supplied minorant.
    pub fn with_envelope<F>(mut self, envelope: F, label: &str) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.envelope = Arc::new(envelope);
        self.envelope_label = label.into();
        self
    }

    pub fn with_prefactors(mut self, prefactors: Prefactors) -> Self {
        self.prefactors = prefactors;
        self
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn envelope_label(&self) -> &str {
        &self.envelope_label
    }

    pub fn h(&self, r: f64) -> f64 {
        (self.h)(r)
    }

    pub fn envelope(&self, r: f64) -> f64 {
        (self.envelope)(r)
    }

    pub fn theta(&self, r: f64) -> f64 {
        self.envelope(r) * self.h(r).powf(1.0 / (self.m - 1.0))
    }

    /// `K = θ(R₀)^{m−1}`.
    pub fn k_threshold(&self) -> f64 {
        self.theta(self.r0).powf(self.m - 1.0)
    }

    /// The unique `R ≥ R₀` with `θ(R) = s`.
    pub fn invert_theta(&self, s: f64) -> Result<f64> {
        let threshold = self.theta(self.r0);
        if s < threshold {
            return Err(Error::BelowThreshold { s, threshold });
        }
        solve_increasing(|r| self.theta(r), s, self.r0, THETA_TOLERANCE)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    SmallTime,
    LargeTime,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::SmallTime => "small_time",
            Regime::LargeTime => "large_time",
        })
    }
}

/// One evaluation of a smoothing bound. Both branch values are kept when
/// defined so that the jump at the threshold can be inspected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundEvaluation {
    pub t: f64,
    pub norm_in: f64,
    pub regime: Regime,
    pub bound_value: f64,
    pub r_star: Option<f64>,
    pub threshold_time: f64,
    pub large_value: Option<f64>,
    pub small_value: f64,
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {x}")))
    }
}

fn small_time(c: f64, m: f64, n: f64, t: f64, norm: f64) -> f64 {
    let d = (m - 1.0) * n + 2.0;
    c * t.powf(-n / d) * norm.powf(2.0 / d)
}

/// L¹ smoothing bound at time `t` for data of mass `norm1`.
pub fn smoothing_bound_l1(bound: &SmoothingBound, t: f64, norm1: f64) -> Result<BoundEvaluation> {
    check_positive("t", t)?;
    check_positive("norm", norm1)?;
    let m = bound.m;
    let threshold_time = bound.k_threshold() * norm1.powf(-(m - 1.0));
    let small_value = small_time(bound.prefactors.small, m, bound.dim as f64, t, norm1);
    let s = t.powf(1.0 / (m - 1.0)) * norm1;
    let (r_star, large_value) = if t >= threshold_time {
        // rounding can put s a hair under θ(R₀) exactly at the threshold
        let s = s.max(bound.theta(bound.r0));
        let r = bound.invert_theta(s)?;
        let v = bound.prefactors.large * t.powf(-1.0 / (m - 1.0)) * bound.h(r).powf(1.0 / (m - 1.0));
        (Some(r), Some(v))
    } else {
        (None, None)
    };
    Ok(BoundEvaluation {
        t,
        norm_in: norm1,
        regime: if large_value.is_some() { Regime::LargeTime } else { Regime::SmallTime },
        bound_value: large_value.unwrap_or(small_value),
        r_star,
        threshold_time,
        large_value,
        small_value,
    })
}

/// L¹_G smoothing bound: `t^{−1/m} ‖u₀‖^{1/m}` once `t ≥ ‖u₀‖^{−(m−1)}`.
pub fn smoothing_bound_l1g(
    m: f64,
    n: usize,
    t: f64,
    norm_g: f64,
    prefactors: Prefactors,
) -> Result<BoundEvaluation> {
    check_m(m)?;
    if n < 3 {
        return Err(Error::Dimension(n));
    }
    check_positive("t", t)?;
    check_positive("norm", norm_g)?;
    let threshold_time = norm_g.powf(-(m - 1.0));
    let small_value = small_time(prefactors.small, m, n as f64, t, norm_g);
    let large_value = (t >= threshold_time)
        .then(|| prefactors.large * t.powf(-1.0 / m) * norm_g.powf(1.0 / m));
    Ok(BoundEvaluation {
        t,
        norm_in: norm_g,
        regime: if large_value.is_some() { Regime::LargeTime } else { Regime::SmallTime },
        bound_value: large_value.unwrap_or(small_value),
        r_star: None,
        threshold_time,
        large_value,
        small_value,
    })
}

/// Principal branch of the Lambert W function: `w ≥ −1` with `w e^w = x`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let branch = -(-1.0f64).exp();
    if !(x >= branch) {
        return Err(Error::Domain(format!("W0 is defined for x >= -1/e, got {x}")));
    }
    if x == branch {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut w = if x < -0.3 {
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        x.ln_1p() * (1.0 - x.ln_1p() / (2.0 + x.ln_1p()))
    } else {
        let l = x.ln();
        l - l.ln() + l.ln() / l
    };
    let tol = 1e-13 * x.abs().max(1.0);
    for _ in 0..64 {
        let ew = w.exp();
        let fw = w * ew - x;
        if fw.abs() <= tol * 1e-3 {
            break;
        }
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let step = fw / (ew * wp1 - (w + 2.0) * fw / (2.0 * wp1));
        let next = (w - step).max(-1.0);
        if next == w {
            break;
        }
        w = next;
    }
    Ok(w)
}

/// Parameters of the two volume-growth classes with explicit decay rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ProfileClass {
    /// `f = R^{k−1}(log R)^δ`, `V ≳ R^λ`.
    PowerGrowth { k: f64, delta: f64, lambda: f64 },
    /// `f = R (log R)^δ`, `V ≳ R^λ (log R)^σ`.
    LogGrowth { delta: f64, lambda: f64, sigma: f64 },
}

/// `θ⁻¹` of the log class: the solution of `R^a (log R)^b = s`.
pub fn log_class_inverse(a: f64, b: f64, lambda: f64, m: f64, s: f64) -> Result<f64> {
    if b == 0.0 {
        return Ok(s.powf((m - 1.0) / ((m - 1.0) * lambda + 2.0)));
    }
    let w = lambert_w0(a / b * s.powf(1.0 / b))?;
    Ok((b / a * w).exp())
}

/// Explicit large-time decay of the two profile classes, with prefactor `c`.
pub fn corollary_rate(class: ProfileClass, n: usize, m: f64, t: f64, norm1: f64, c: f64) -> Result<f64> {
    check_m(m)?;
    check_positive("t", t)?;
    check_positive("norm", norm1)?;
    let nf = n as f64;
    match class {
        ProfileClass::PowerGrowth { k, lambda, .. } => {
            if !(k > 2.0 && k <= nf) || !(lambda > 2.0 && lambda <= nf) {
                return Err(Error::InvalidParameter(format!(
                    "need k, lambda in (2, {n}], got k = {k}, lambda = {lambda}"
                )));
            }
            let d = (m - 1.0) * lambda + 2.0;
            Ok(c * t.powf(-lambda / d) * norm1.powf(2.0 / d))
        }
        ProfileClass::LogGrowth { delta, lambda, sigma } => {
            if !(delta > 1.0) || !(lambda >= 2.0 && lambda <= nf) {
                return Err(Error::InvalidParameter(format!(
                    "need delta > 1 and lambda in [2, {n}], got delta = {delta}, lambda = {lambda}"
                )));
            }
            let a = lambda + 2.0 / (m - 1.0);
            let b = sigma + 1.0 / (m - 1.0);
            if b < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "sigma + 1/(m-1) = {b} < 0: the principal branch picks the root near R = 1"
                )));
            }
            let s = t.powf(1.0 / (m - 1.0)) * norm1;
            let g = log_class_inverse(a, b, lambda, m, s)?;
            let lg = g.ln();
            if !(lg > 0.0) {
                return Err(Error::Domain(format!(
                    "log G(s) = {lg} is not positive; t is not large enough"
                )));
            }
            Ok(c * t.powf(-1.0 / (m - 1.0)) * g.powf(2.0 / (m - 1.0)) * lg.powf(1.0 / (m - 1.0)))
        }
    }
}
