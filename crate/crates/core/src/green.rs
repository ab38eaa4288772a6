//! Pole-centered Green function of a model manifold, its volume-integral
//! surrogate, the two-sided bounds they satisfy, and the Newtonian potential of
//! radial densities.
//!
//! With `S` the sphere area, the minimal positive Green function about the pole
//! is `G(r) = ∫_r^∞ ds / S(s)` (unit flux, `−S G' = 1`). The surrogate
//! `Ĝ(r) = ∫_r^∞ t / V(t) dt` sandwiches it up to constants on nonnegatively
//! curved manifolds.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    check_assumptions, unit_ball_volume, unit_sphere_area, GrowthFunction, ProfileForm,
    VolumeProfile,
};
use crate::quadrature::{integrate, integrate_tail, log_space, GaussLegendre, Tolerance};

fn tol() -> Tolerance {
    Tolerance::new(1e-14, 1e-12)
}

fn ensure_nonparabolic(profile: &VolumeProfile) -> Result<()> {
    if profile.is_nonparabolic() {
        Ok(())
    } else {
        Err(Error::Parabolic(format!(
            "volume growth {:?} makes the Green integral diverge",
            profile.growth_at_infinity()
        )))
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius must be positive and finite, got {r}")))
    }
}

/// `∫_r^∞ g`, split at the profile's kinks so each piece is smooth.
fn tail_with_kinks<F: Fn(f64) -> f64>(profile: &VolumeProfile, g: F, r: f64) -> Result<f64> {
    let mut a = r;
    let mut total = 0.0;
    for k in profile.kinks() {
        if k > a {
            total += integrate(&g, a, k, tol())?;
            a = k;
        }
    }
    Ok(total + integrate_tail(&g, a, tol())?)
}

fn head_with_kinks<F: Fn(f64) -> f64>(profile: &VolumeProfile, g: F, r: f64) -> Result<f64> {
    let mut a = 0.0;
    let mut total = 0.0;
    for k in profile.kinks() {
        if k < r && k > a {
            total += integrate(&g, a, k, tol())?;
            a = k;
        }
    }
    Ok(total + integrate(&g, a, r, tol())?)
}

/// Exact pole-centered Green function `G(r) = ∫_r^∞ ds / S(s)`.
pub fn green_exact(profile: &VolumeProfile, r: f64) -> Result<f64> {
    check_radius(r)?;
    ensure_nonparabolic(profile)?;
    let n = profile.dim() as f64;
    match *profile.form() {
        ProfileForm::Euclidean => Ok(r.powf(2.0 - n) / ((n - 2.0) * unit_sphere_area(profile.dim()))),
        ProfileForm::Power { lambda, scale } => {
            let outer = |x: f64| x.powf(2.0 - lambda) / (scale * lambda * (lambda - 2.0));
            if r >= 1.0 {
                Ok(outer(r))
            } else {
                Ok((r.powf(2.0 - n) - 1.0) / (scale * n * (n - 2.0)) + outer(1.0))
            }
        }
        _ => tail_with_kinks(profile, |s| 1.0 / profile.area(s), r),
    }
}

/// Surrogate `Ĝ(r) = ∫_r^∞ t / V(t) dt`.
pub fn green_surrogate(profile: &VolumeProfile, r: f64) -> Result<f64> {
    check_radius(r)?;
    ensure_nonparabolic(profile)?;
    let n = profile.dim() as f64;
    match *profile.form() {
        ProfileForm::Euclidean => Ok(r.powf(2.0 - n) / ((n - 2.0) * unit_ball_volume(profile.dim()))),
        ProfileForm::Power { lambda, scale } => {
            let outer = |x: f64| x.powf(2.0 - lambda) / (scale * (lambda - 2.0));
            if r >= 1.0 {
                Ok(outer(r))
            } else {
                Ok((r.powf(2.0 - n) - 1.0) / (scale * (n - 2.0)) + outer(1.0))
            }
        }
        _ => tail_with_kinks(profile, |t| t / profile.volume(t), r),
    }
}

/// `I(R) = ∫_{B_R} G dμ = V(R) G(R) + ∫_0^R V/S dr`.
pub fn ball_integral_value(profile: &VolumeProfile, big_r: f64) -> Result<f64> {
    check_radius(big_r)?;
    ensure_nonparabolic(profile)?;
    let n = profile.dim() as f64;
    match *profile.form() {
        ProfileForm::Euclidean => Ok(big_r * big_r / (2.0 * (n - 2.0))),
        ProfileForm::Power { lambda, .. } => {
            let head = if big_r <= 1.0 {
                big_r * big_r / (2.0 * n)
            } else {
                1.0 / (2.0 * n) + (big_r * big_r - 1.0) / (2.0 * lambda)
            };
            Ok(profile.volume(big_r) * green_exact(profile, big_r)? + head)
        }
        _ => {
            let head = head_with_kinks(profile, |r| profile.volume(r) / profile.area(r), big_r)?;
            Ok(profile.volume(big_r) * green_exact(profile, big_r)? + head)
        }
    }
}

/// `∫_{B_R} Ĝ dμ = V(R) Ĝ(R) + R²/2`.
pub fn surrogate_ball_integral(profile: &VolumeProfile, big_r: f64) -> Result<f64> {
    Ok(profile.volume(big_r) * green_surrogate(profile, big_r)? + 0.5 * big_r * big_r)
}

/// Pole-centered Green quantities of one profile.
#[derive(Debug, Clone, Copy)]
pub struct GreenData<'a> {
    profile: &'a VolumeProfile,
}

impl<'a> GreenData<'a> {
    pub fn new(profile: &'a VolumeProfile) -> Result<Self> {
        ensure_nonparabolic(profile)?;
        Ok(Self { profile })
    }

    pub fn profile(&self) -> &'a VolumeProfile {
        self.profile
    }

    pub fn exact(&self, r: f64) -> Result<f64> {
        green_exact(self.profile, r)
    }

    pub fn surrogate(&self, r: f64) -> Result<f64> {
        green_surrogate(self.profile, r)
    }

    pub fn ball_integral(&self, r: f64) -> Result<f64> {
        ball_integral_value(self.profile, r)
    }

    /// `∫_a^b G S dr`, the Green mass of the shell `a < r < b`.
    pub fn shell_integral(&self, a: f64, b: f64) -> Result<f64> {
        let ia = if a > 0.0 { self.ball_integral(a)? } else { 0.0 };
        Ok(self.ball_integral(b)? - ia)
    }
}

/// Extremes of `G/Ĝ` over a log grid on `[R₀, 100 R₀]`: the empirical `c₁ ≤ c₂`.
pub fn empirical_sandwich(profile: &VolumeProfile, r0: f64) -> Result<(f64, f64)> {
    let upper = (100.0 * r0).min(profile.r_max());
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    for r in log_space(r0, upper.max(r0 * (1.0 + 1e-9)), 201) {
        let ratio = green_exact(profile, r)? / green_surrogate(profile, r)?;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok((lo, hi))
}

/// Geometric constants entering the Green bounds.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GreenConstants {
    pub c1: f64,
    pub c2: f64,
    /// `c₁, c₂` were measured rather than supplied.
    pub empirical: bool,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub r0: f64,
    pub dim: usize,
}

impl GreenConstants {
    /// Measures `γ` on `[R₀, 100 R₀]` and, when not supplied, `c₁, c₂` on the same range.
    pub fn resolve(
        profile: &VolumeProfile,
        f: &GrowthFunction,
        c1: Option<f64>,
        c2: Option<f64>,
    ) -> Result<Self> {
        let r0 = f.r0();
        let upper = (100.0 * r0).min(profile.r_max());
        let report = check_assumptions(profile, f, &log_space(r0, upper.max(r0 * 1.000001), 201))?;
        let (e1, e2) = empirical_sandwich(profile, r0)?;
        for c in [c1, c2].into_iter().flatten() {
            if !(c > 0.0) {
                return Err(Error::InvalidParameter(format!("Green constants must be positive, got {c}")));
            }
        }
        Ok(Self {
            c1: c1.unwrap_or(e1),
            c2: c2.unwrap_or(e2),
            empirical: c1.is_none() || c2.is_none(),
            gamma: report.gamma_uniformity,
            alpha: report.alpha_noncollapse,
            beta: report.beta,
            r0,
            dim: profile.dim(),
        })
    }

    fn small_ball_coefficient(&self, f: &GrowthFunction) -> f64 {
        let n = self.dim as f64;
        let r0 = self.r0;
        (r0.powf(n) / (n - 2.0) + self.gamma * self.beta * f.eval(r0) * r0.powf(n - 1.0)) / self.alpha
    }
}

const FLAG_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct GreenBoundRecord {
    pub r: f64,
    pub g: f64,
    pub g_hat: f64,
    pub ratio: f64,
    /// `c₁/((n−2)ωₙ) r^{2−n}`.
    pub bound_i: f64,
    /// `c₂γ r f(r) T(r) / V(r)`; only for `r ≥ R₀`.
    pub bound_ii: Option<f64>,
    /// `(c₂/α)[Rⁿ/(n−2) + γβ f(R) Rⁿ⁻¹] r^{2−n}` with `R = max(R₀, r)`.
    pub bound_iii: f64,
    pub ok_i: bool,
    pub ok_ii: bool,
    pub ok_iii: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GreenBoundReport {
    pub constants: GreenConstants,
    pub records: Vec<GreenBoundRecord>,
}

impl GreenBoundReport {
    pub fn all_ok(&self) -> bool {
        self.records.iter().all(|r| r.ok_i && r.ok_ii && r.ok_iii)
    }
}

/// Evaluates the three pointwise Green bounds on a radius grid.
pub fn green_bounds(
    profile: &VolumeProfile,
    f: &GrowthFunction,
    radii: &[f64],
    c1: Option<f64>,
    c2: Option<f64>,
) -> Result<GreenBoundReport> {
    let constants = GreenConstants::resolve(profile, f, c1, c2)?;
    let n = profile.dim() as f64;
    let omega = unit_ball_volume(profile.dim());
    let GreenConstants {
        c1,
        c2,
        gamma,
        alpha,
        beta,
        r0,
        ..
    } = constants;
    let mut records = Vec::with_capacity(radii.len());
    for &r in radii {
        let g = green_exact(profile, r)?;
        let g_hat = green_surrogate(profile, r)?;
        let bound_i = c1 / ((n - 2.0) * omega) * r.powf(2.0 - n);
        let bound_ii = (r >= r0).then(|| c2 * gamma * r * f.eval(r) * f.tail(r) / profile.volume(r));
        let big_r = r.max(r0);
        let bound_iii = c2 / alpha
            * (big_r.powf(n) / (n - 2.0) + gamma * beta * f.eval(big_r) * big_r.powf(n - 1.0))
            * r.powf(2.0 - n);
        records.push(GreenBoundRecord {
            r,
            g,
            g_hat,
            ratio: g / g_hat,
            bound_i,
            bound_ii,
            bound_iii,
            ok_i: g >= bound_i * (1.0 - FLAG_SLACK),
            ok_ii: bound_ii.is_none_or(|b| g <= b * (1.0 + FLAG_SLACK)),
            ok_iii: g <= bound_iii * (1.0 + FLAG_SLACK),
        });
    }
    Ok(GreenBoundReport { constants, records })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BallBoundKind {
    /// Quadratic bound for `R < R₀`.
    Quadratic,
    /// `c₂ max{γ, 1/2} h(R)` for `R ≥ R₀`.
    Growth,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BallIntegral {
    pub r: f64,
    pub value: f64,
    pub bound: f64,
    pub kind: BallBoundKind,
    pub within: bool,
}

/// `I(R)` together with the applicable bound.
pub fn ball_integral(
    profile: &VolumeProfile,
    f: &GrowthFunction,
    big_r: f64,
    constants: &GreenConstants,
) -> Result<BallIntegral> {
    let value = ball_integral_value(profile, big_r)?;
    let n = profile.dim() as f64;
    let (bound, kind) = if big_r < constants.r0 {
        let omega = unit_ball_volume(profile.dim());
        (
            omega * constants.c2 * n / 2.0 * constants.small_ball_coefficient(f) * big_r * big_r,
            BallBoundKind::Quadratic,
        )
    } else {
        let h = big_r * f.eval(big_r) * f.tail(big_r) + big_r * big_r;
        (constants.c2 * constants.gamma.max(0.5) * h, BallBoundKind::Growth)
    };
    Ok(BallIntegral {
        r: big_r,
        value,
        bound,
        kind,
        within: value <= bound * (1.0 + FLAG_SLACK),
    })
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Nonnegative radial density with compact support.
#[derive(Clone)]
pub struct RadialDensity {
    f: ScalarFn,
    support: f64,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for RadialDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialDensity")
            .field("support", &self.support)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

impl RadialDensity {
    /// `f` is evaluated only on `[0, support]`; `breakpoints` mark its
    /// discontinuities or kinks.
    pub fn new<F>(f: F, support: f64, breakpoints: Vec<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            f: Arc::new(f),
            support,
            breakpoints,
        }
    }

    pub fn indicator(radius: f64, height: f64) -> Self {
        Self::new(move |_| height, radius, Vec::new())
    }

    /// `χ_{B_σ} / V(σ)`, of unit mass.
    pub fn normalized_indicator(profile: &VolumeProfile, radius: f64) -> Self {
        Self::indicator(radius, 1.0 / profile.volume(radius))
    }

    pub fn zero() -> Self {
        Self::indicator(1.0, 0.0)
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r > self.support {
            0.0
        } else {
            (self.f)(r)
        }
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let f = Arc::clone(&self.f);
        Self {
            f: Arc::new(move |r| factor * f(r)),
            support: self.support,
            breakpoints: self.breakpoints.clone(),
        }
    }

    /// Supremum over a dense sample of the support.
    pub fn sup_norm(&self) -> f64 {
        let mut pts: Vec<f64> = (0..=2000).map(|i| self.support * i as f64 / 2000.0).collect();
        for &b in &self.breakpoints {
            pts.extend([b * (1.0 - 1e-12), b, b * (1.0 + 1e-12)]);
        }
        pts.into_iter()
            .filter(|&r| r <= self.support)
            .map(|r| (self.f)(r).abs())
            .fold(0.0, f64::max)
    }

    fn nodes(&self, profile: &VolumeProfile) -> Vec<f64> {
        let s = self.support;
        let mut pts = vec![0.0, s];
        pts.extend(log_space(s * 1e-6, s, 121));
        pts.extend(self.breakpoints.iter().copied().filter(|&b| b > 0.0 && b < s));
        pts.extend(profile.kinks().into_iter().filter(|&b| b > 0.0 && b < s));
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs().max(1e-300));
        pts
    }
}

/// Newtonian potential `U = (−Δ)⁻¹ψ` of a radial density about the pole:
/// `U(r) = ∫_r^∞ m(s)/S(s) ds` with enclosed mass `m(s) = ∫_0^s S ψ`.
///
/// Both quadratures run on one shared node set (logarithmic toward the pole);
/// beyond the support `U = m_total · G`.
#[derive(Debug, Clone)]
pub struct Potential<'a> {
    profile: &'a VolumeProfile,
    density: RadialDensity,
    nodes: Vec<f64>,
    enclosed: Vec<f64>,
    values: Vec<f64>,
    gl: GaussLegendre,
}

impl<'a> Potential<'a> {
    pub fn new(profile: &'a VolumeProfile, density: RadialDensity) -> Result<Self> {
        ensure_nonparabolic(profile)?;
        if !(density.support > 0.0 && density.support.is_finite()) {
            return Err(Error::Domain(format!(
                "density support must be positive and finite, got {}",
                density.support
            )));
        }
        let gl = GaussLegendre::new(12);
        let nodes = density.nodes(profile);
        let mut enclosed = Vec::with_capacity(nodes.len());
        enclosed.push(0.0);
        for w in nodes.windows(2) {
            let mut piece = 0.0;
            let mut bad = None;
            let c = 0.5 * (w[0] + w[1]);
            let h = 0.5 * (w[1] - w[0]);
            for (x, wt) in gl.pairs() {
                let s = c + h * x;
                let v = density.eval(s);
                if v < 0.0 {
                    bad = Some(s);
                }
                piece += wt * profile.area(s) * v;
            }
            if let Some(s) = bad {
                return Err(Error::Domain(format!("density is negative at r = {s}")));
            }
            enclosed.push(enclosed.last().unwrap() + piece * h);
        }
        let total = *enclosed.last().unwrap();
        if !total.is_finite() {
            return Err(Error::Domain("density is not integrable".into()));
        }
        let mut values = vec![0.0; nodes.len()];
        let last = nodes.len() - 1;
        values[last] = if total == 0.0 {
            0.0
        } else {
            total * green_exact(profile, nodes[last])?
        };
        let mut pot = Self {
            profile,
            density,
            nodes,
            enclosed,
            values: Vec::new(),
            gl,
        };
        for j in (0..last).rev() {
            values[j] = values[j + 1] + pot.flux_integral(j, pot.nodes[j], pot.nodes[j + 1]);
        }
        pot.values = values;
        Ok(pot)
    }

    pub fn total_mass(&self) -> f64 {
        *self.enclosed.last().unwrap()
    }

    pub fn density(&self) -> &RadialDensity {
        &self.density
    }

    fn interval(&self, r: f64) -> usize {
        match self.nodes.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => i.min(self.nodes.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.nodes.len() - 2),
        }
    }

    /// `m(s)` for `s` inside interval `j`.
    fn enclosed_in(&self, j: usize, s: f64) -> f64 {
        let a = self.nodes[j];
        self.enclosed[j]
            + self
                .gl
                .integrate(|x| self.profile.area(x) * self.density.eval(x), a, s)
    }

    /// `∫_a^b m(s)/S(s) ds` inside interval `j`.
    fn flux_integral(&self, j: usize, a: f64, b: f64) -> f64 {
        self.gl.integrate(
            |s| {
                let area = self.profile.area(s);
                if area > 0.0 {
                    self.enclosed_in(j, s) / area
                } else {
                    0.0
                }
            },
            a,
            b,
        )
    }

    pub fn enclosed_mass(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if r >= self.density.support {
            return self.total_mass();
        }
        let j = self.interval(r);
        self.enclosed_in(j, r)
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Ok(self.values[0]);
        }
        if r >= self.density.support {
            let m = self.total_mass();
            return if m == 0.0 {
                Ok(0.0)
            } else {
                Ok(m * green_exact(self.profile, r)?)
            };
        }
        let j = self.interval(r);
        Ok(self.values[j + 1] + self.flux_integral(j, r, self.nodes[j + 1]))
    }
}

/// `U(r)` for a single evaluation.
pub fn potential(profile: &VolumeProfile, psi: &RadialDensity, r: f64) -> Result<f64> {
    Potential::new(profile, psi.clone())?.value(r)
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichRecord {
    pub r: f64,
    pub potential: f64,
    pub green: f64,
    /// `U / (‖ψ‖₁ (rⁿ⁻² ∧ 1) G)`.
    pub lower_ratio: f64,
    /// `U / (‖ψ‖_∞ V(σ) G)`.
    pub upper_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub gamma1: f64,
    pub gamma2: f64,
    pub l1_norm: f64,
    pub sup_norm: f64,
    pub records: Vec<SandwichRecord>,
}

impl SandwichReport {
    pub fn finite_positive(&self) -> bool {
        self.gamma1 > 0.0 && self.gamma1.is_finite() && self.gamma2 > 0.0 && self.gamma2.is_finite()
    }
}

/// Empirical constants of the two-sided potential bound on a radius grid.
pub fn sandwich_check(
    profile: &VolumeProfile,
    psi: &RadialDensity,
    radii: &[f64],
) -> Result<SandwichReport> {
    if let Some(&r) = radii.iter().find(|&&r| !(r > 0.0)) {
        return Err(Error::Domain(format!("sandwich grid must avoid the pole, got r = {r}")));
    }
    let pot = Potential::new(profile, psi.clone())?;
    let l1 = pot.total_mass();
    let sup = psi.sup_norm();
    let vol_support = profile.volume(psi.support());
    let n = profile.dim() as f64;
    let mut gamma1 = f64::INFINITY;
    let mut gamma2 = 0.0_f64;
    let mut records = Vec::with_capacity(radii.len());
    for &r in radii {
        let u = pot.value(r)?;
        let g = green_exact(profile, r)?;
        let lower_ratio = u / (l1 * r.powf(n - 2.0).min(1.0) * g);
        let upper_ratio = u / (sup * vol_support * g);
        gamma1 = gamma1.min(lower_ratio);
        gamma2 = gamma2.max(upper_ratio);
        records.push(SandwichRecord {
            r,
            potential: u,
            green: g,
            lower_ratio,
            upper_ratio,
        });
    }
    Ok(SandwichReport {
        gamma1,
        gamma2,
        l1_norm: l1,
        sup_norm: sup,
        records,
    })
}
