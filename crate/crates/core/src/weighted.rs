//! The Green-weighted space `L¹_G`: its pole-centered norm, the power-law
//! membership test, and a sequence of shells that is Cauchy in `L¹_G` while
//! its `L¹` mass grows without bound.
//!
//! Off-pole Green values are not available for radial models, so the norm is
//! always the pole-centered proxy `‖f‖ = ∫_{B₁} |f| + ∫_{r>1} |f| G`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{GrowthFunction, VolumeProfile};
use crate::green::{green_exact, GreenConstants};
use crate::quadrature::{integrate, GaussLegendre, Tolerance};

/// Horizons of the truncation study.
pub const HORIZONS: [f64; 2] = [1e3, 1e4];
/// Relative change between horizons below which a tail counts as saturated.
pub const SATURATION_THRESHOLD: f64 = 1e-3;

/// Label written next to every weighted norm.
pub const PROXY_LABEL: &str = "pole-centered proxy";

/// `∫_start^∞ g` estimated from truncations at each horizon `H`, each corrected
/// by a power-law tail `g(H) H / (p − 1)` fitted to the local decay exponent `p`.
#[derive(Debug, Clone, Serialize)]
pub struct TruncatedIntegral {
    /// `(H, ∫_start^H g)`.
    pub raw: Vec<(f64, f64)>,
    /// `(H, tail estimate beyond H)`; `∞` when the local exponent is `≤ 1`.
    pub tails: Vec<(f64, f64)>,
    pub converged: bool,
    pub relative_change: f64,
    pub value: f64,
}

fn local_decay_exponent<G: Fn(f64) -> f64>(g: &G, r: f64) -> f64 {
    let h = 1e-3;
    let (a, b) = (g(r * (1.0 - h)), g(r * (1.0 + h)));
    if a <= 0.0 || b <= 0.0 {
        return f64::INFINITY;
    }
    -(b.ln() - a.ln()) / ((1.0 + h).ln() - (1.0 - h).ln())
}

fn tail_estimate<G: Fn(f64) -> f64>(g: &G, r: f64) -> f64 {
    let gr = g(r);
    if gr == 0.0 {
        return 0.0;
    }
    let p = local_decay_exponent(g, r);
    if p > 1.0 {
        gr * r / (p - 1.0)
    } else {
        f64::INFINITY
    }
}

fn decade_integral<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64) -> Result<f64> {
    let tol = Tolerance::new(1e-300, 1e-12);
    let mut total = 0.0;
    let mut lo = a;
    while lo < b {
        let hi = (lo * 10.0).min(b);
        total += integrate(g, lo, hi, tol)?;
        lo = hi;
    }
    Ok(total)
}

/// Truncation study of `∫_start^∞ g` for a nonnegative `g`.
pub fn truncated_tail_integral<G: Fn(f64) -> f64>(g: G, start: f64) -> Result<TruncatedIntegral> {
    let mut raw = Vec::new();
    let mut tails = Vec::new();
    let mut acc = 0.0;
    let mut lo = start;
    for &h in &HORIZONS {
        acc += decade_integral(&g, lo, h)?;
        lo = h;
        raw.push((h, acc));
        tails.push((h, tail_estimate(&g, h)));
    }
    let corrected: Vec<f64> = raw.iter().zip(&tails).map(|(r, t)| r.1 + t.1).collect();
    let (c0, c1) = (corrected[0], corrected[1]);
    let relative_change = if c0.is_finite() && c1.is_finite() {
        if c1 == 0.0 {
            0.0
        } else {
            ((c1 - c0) / c1).abs()
        }
    } else {
        f64::INFINITY
    };
    let converged = relative_change < SATURATION_THRESHOLD;
    Ok(TruncatedIntegral {
        raw,
        tails,
        converged,
        relative_change,
        value: if converged { c1 } else { f64::INFINITY },
    })
}

/// Pole-centered `L¹_G` norm of a radial function.
#[derive(Debug, Clone, Serialize)]
pub struct WeightedNorm {
    pub inner: f64,
    /// `∞` when the truncations do not saturate.
    pub outer: f64,
    pub total: f64,
    pub truncation_radius: f64,
    pub tail_estimate: f64,
    pub study: TruncatedIntegral,
    pub label: &'static str,
}

impl WeightedNorm {
    pub fn is_finite(&self) -> bool {
        self.total.is_finite()
    }
}

fn inner_integral<F: Fn(f64) -> f64>(profile: &VolumeProfile, f: &F) -> Result<f64> {
    let g = |r: f64| f(r).abs() * profile.area(r);
    integrate(g, 0.0, 1.0, Tolerance::new(1e-300, 1e-12))
}

/// `‖f‖_{L¹_{o,G}}` with the exact radial `G`.
pub fn l1g_norm<F: Fn(f64) -> f64>(profile: &VolumeProfile, f: F) -> Result<WeightedNorm> {
    let inner = inner_integral(profile, &f)?;
    let weighted = |r: f64| {
        let v = f(r).abs();
        if v == 0.0 {
            0.0
        } else {
            v * green_exact(profile, r).unwrap_or(f64::NAN) * profile.area(r)
        }
    };
    let study = truncated_tail_integral(weighted, 1.0)?;
    let last = HORIZONS[HORIZONS.len() - 1];
    let tail_estimate = study.tails.last().map(|t| t.1).unwrap_or(0.0);
    let outer = study.value;
    Ok(WeightedNorm {
        inner,
        outer,
        total: inner + outer,
        truncation_radius: last,
        tail_estimate,
        study,
        label: PROXY_LABEL,
    })
}

/// `‖f‖₁` through the same truncation study.
pub fn l1_norm<F: Fn(f64) -> f64>(profile: &VolumeProfile, f: F) -> Result<(f64, TruncatedIntegral)> {
    let inner = inner_integral(profile, &f)?;
    let study = truncated_tail_integral(|r| f(r).abs() * profile.area(r), 1.0)?;
    Ok((inner + study.value, study))
}

/// Membership of `(1 + r)^{−a}` in `L¹` and `L¹_G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawClass {
    pub alpha: f64,
    pub a: f64,
    pub in_l1: bool,
    pub in_l1g: bool,
    pub numeric_in_l1: bool,
    pub numeric_in_l1g: bool,
    pub l1_change: f64,
    pub l1g_change: f64,
}

impl PowerLawClass {
    pub fn agrees(&self) -> bool {
        self.in_l1 == self.numeric_in_l1 && self.in_l1g == self.numeric_in_l1g
    }
}

/// Exact classification `(a > α, a > 2)` cross-checked by truncated quadrature.
pub fn powerlaw_classify(profile: &VolumeProfile, a: f64) -> Result<PowerLawClass> {
    let n = profile.dim() as f64;
    let alpha = profile.power_exponent().ok_or_else(|| {
        Error::InvalidParameter("profile has no power-law volume growth at infinity".into())
    })?;
    if !(alpha > 2.0 && alpha <= n) {
        return Err(Error::InvalidParameter(format!(
            "volume exponent must lie in (2, {n}], got {alpha}"
        )));
    }
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("decay exponent must be positive, got {a}")));
    }
    let u = move |r: f64| (1.0 + r).powf(-a);
    let (l1, l1_study) = l1_norm(profile, u)?;
    let weighted = l1g_norm(profile, u)?;
    Ok(PowerLawClass {
        alpha,
        a,
        in_l1: a > alpha,
        in_l1g: a > 2.0,
        numeric_in_l1: l1.is_finite(),
        numeric_in_l1g: weighted.is_finite(),
        l1_change: l1_study.relative_change,
        l1g_change: weighted.study.relative_change,
    })
}

/// Unit-mass shells `d_j − w < r < d_j` far enough out that their Green
/// masses are summable.
#[derive(Debug, Clone, Serialize)]
pub struct SeparatingSequence {
    pub distances: Vec<f64>,
    pub width: f64,
    /// `Σ_{i≤j} ‖v_i‖₁`.
    pub l1_partial: Vec<f64>,
    /// `Σ_{i≤j} ‖v_i‖_{L¹_{o,G}}`.
    pub weighted_partial: Vec<f64>,
    /// `‖v_j‖_{L¹_{o,G}}`.
    pub increments: Vec<f64>,
    /// `T(d_j − w)`.
    pub tails: Vec<f64>,
    /// Constant `K` with `increment_j ≤ K T(d_j − w) ≤ K 2^{−j}`.
    pub constant: f64,
    /// `K 2^{−J}`, an upper bound for everything past the last shell.
    pub tail_certificate: f64,
}

impl SeparatingSequence {
    pub fn first_shell_mass(&self) -> f64 {
        self.l1_partial[0]
    }

    pub fn increments_certified(&self) -> bool {
        self.increments
            .iter()
            .enumerate()
            .all(|(j, &inc)| inc <= self.constant * 0.5f64.powi(j as i32 + 1))
    }

    /// `S_J − S_{J−1}`, taken as the last increment itself (the difference of
    /// the sums rounds to zero long before the increments do).
    pub fn cauchy_gap(&self) -> f64 {
        self.increments[self.increments.len() - 1]
    }
}

/// Greedy shells with `d₁ ≥ 4R₀ + 4`, `d_j ≥ 4 d_{j−1}` and `T(d_j − 1) ≤ 2^{−j}`.
pub fn build_separating_sequence(
    profile: &VolumeProfile,
    f: &GrowthFunction,
    count: usize,
) -> Result<SeparatingSequence> {
    if count < 2 {
        return Err(Error::InvalidParameter(format!("need at least two shells, got {count}")));
    }
    if f.beta().is_infinite() {
        return Err(Error::Domain("tail integral of f diverges".into()));
    }
    let width = 1.0;
    let consts = GreenConstants::resolve(profile, f, None, None)?;
    let gl = GaussLegendre::new(20);
    let mut distances = Vec::with_capacity(count);
    let mut prev = f.r0() + 1.0;
    for j in 1..=count {
        let need_tail = f.tail_inverse(0.5f64.powi(j as i32))? + width;
        let d = if j == 1 { (4.0 * f.r0() + 4.0).max(need_tail) } else { (4.0 * prev).max(need_tail) };
        distances.push(d);
        prev = d;
    }
    let mut l1_partial = Vec::with_capacity(count);
    let mut weighted_partial = Vec::with_capacity(count);
    let mut increments = Vec::with_capacity(count);
    let mut tails = Vec::with_capacity(count);
    let mut constant = 0.0_f64;
    let (mut l1, mut w) = (0.0, 0.0);
    for &d in &distances {
        let (a, b) = (d - width, d);
        let shell_volume = profile.volume(b) - profile.volume(a);
        // unit-mass shell: ‖v‖₁ = 1 up to quadrature of S against the volume difference
        let mass = gl.integrate(|r| profile.area(r), a, b) / shell_volume;
        let green_mass = gl.integrate(|r| green_exact(profile, r).unwrap_or(f64::NAN) * profile.area(r), a, b)
            / shell_volume;
        if !green_mass.is_finite() {
            return Err(Error::Domain(format!("Green mass of shell at {d} is not finite")));
        }
        l1 += mass;
        w += green_mass;
        l1_partial.push(l1);
        weighted_partial.push(w);
        increments.push(green_mass);
        tails.push(f.tail(a));
        constant = constant.max(consts.c2 * consts.gamma * a * f.eval(a) / profile.volume(a));
    }
    Ok(SeparatingSequence {
        tail_certificate: constant * 0.5f64.powi(count as i32),
        distances,
        width,
        l1_partial,
        weighted_partial,
        increments,
        tails,
        constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_function_has_zero_norm() {
        let p = VolumeProfile::euclidean(5).unwrap();
        let w = l1g_norm(&p, |_| 0.0).unwrap();
        assert_eq!(w.total, 0.0);
        assert!(w.is_finite());
    }

    #[test]
    fn five_dimensional_cutoffs() {
        let p = VolumeProfile::euclidean(5).unwrap();
        assert!(l1g_norm(&p, |r| (1.0 + r).powi(-3)).unwrap().is_finite());
        assert!(!l1g_norm(&p, |r| (1.0 + r).powi(-2)).unwrap().is_finite());
        assert!(!l1_norm(&p, |r| (1.0 + r).powi(-3)).unwrap().0.is_finite());
    }

    #[test]
    fn classification_table() {
        let p = VolumeProfile::euclidean(5).unwrap();
        let c = powerlaw_classify(&p, 6.0).unwrap();
        assert!(c.in_l1 && c.in_l1g && c.agrees());
        let c = powerlaw_classify(&p, 3.0).unwrap();
        assert!(!c.in_l1 && c.in_l1g && c.agrees());
        let c = powerlaw_classify(&p, 2.0).unwrap();
        assert!(!c.in_l1 && !c.in_l1g && c.agrees());
    }

    #[test]
    fn classify_rejects_small_exponent() {
        let p = VolumeProfile::power_log(4, 2.0, 2.0, 1.0).unwrap();
        assert!(powerlaw_classify(&p, 3.0).is_err());
    }

    #[test]
    fn separating_sequence_spacing() {
        let p = VolumeProfile::euclidean(5).unwrap();
        let f = GrowthFunction::power(5.0, 1.0).unwrap();
        let s = build_separating_sequence(&p, &f, 6).unwrap();
        assert!(s.distances[0] >= 8.0);
        for w in s.distances.windows(2) {
            assert!(w[1] >= 4.0 * w[0]);
        }
        for (j, &t) in s.tails.iter().enumerate() {
            assert!(t <= 0.5f64.powi(j as i32 + 1) * (1.0 + 1e-9));
        }
    }

    #[test]
    fn separating_sequence_needs_integrable_f() {
        let p = VolumeProfile::euclidean(5).unwrap();
        let f = GrowthFunction::power(2.0, 1.0).unwrap();
        assert!(build_separating_sequence(&p, &f, 4).is_err());
    }
}
