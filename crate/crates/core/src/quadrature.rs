//! Adaptive Gauss–Kronrod quadrature, the algebraic tail map for `[a, ∞)`,
//! and fixed-order Gauss–Legendre rules for composite integration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Absolute/relative tolerance pair for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-12,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            ..Self::default()
        }
    }
}

// Kronrod 15-point abscissae and weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive G7/K15 integration of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, tol).map(|v| -v);
    }
    let (value, err) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, err });
    let mut total = value;
    let mut total_err = err;
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Quadrature {
                a,
                b,
                estimate: total_err,
            });
        }
        if total_err <= tol.abs.max(tol.rel * total.abs()) {
            return Ok(total);
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::Quadrature {
                a,
                b,
                estimate: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision
            heap.push(worst);
            let floor = heap.iter().map(|s| s.err).sum::<f64>();
            if floor <= 1e3 * tol.abs.max(tol.rel * total.abs()) {
                return Ok(total);
            }
            return Err(Error::Quadrature {
                a,
                b,
                estimate: floor,
            });
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
        // re-sum occasionally to avoid drift in the running error
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.err).sum();
        }
    }
}

/// `∫_a^∞ f(t) dt` for `a > 0`, via `t = a / s` on `s ∈ (0, 1]`.
///
/// Integrands decaying only logarithmically faster than `1/t` lose mass beyond
/// the largest representable `t`; use closed forms for those.
pub fn integrate_tail<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Result<f64> {
    if a <= 0.0 || !a.is_finite() {
        return Err(Error::Domain(format!(
            "tail integral needs a finite positive lower limit, got {a}"
        )));
    }
    let mapped = |s: f64| {
        let t = a / s;
        let v = f(t) * a / (s * s);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(mapped, 0.0, 1.0, tol)
}

/// Fixed-order Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }

    /// `(node, weight)` pairs on `[-1, 1]`.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Composite rule over consecutive breakpoints.
    pub fn integrate_over<F: Fn(f64) -> f64>(&self, f: F, breaks: &[f64]) -> f64 {
        breaks
            .windows(2)
            .map(|w| self.integrate(&f, w[0], w[1]))
            .sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Logarithmically spaced points from `start` to `end` inclusive.
pub fn log_space(start: f64, end: f64, count: usize) -> Vec<f64> {
    assert!(start > 0.0 && end > 0.0);
    if count <= 1 {
        return vec![start];
    }
    let (la, lb) = (start.ln(), end.ln());
    (0..count)
        .map(|i| {
            if i == count - 1 {
                end
            } else {
                (la + (lb - la) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, Tolerance::default()).unwrap();
        assert!((v - 0.0).abs() < 1e-13);
        let v = integrate(|x| x.powi(4), -1.0, 1.0, Tolerance::default()).unwrap();
        assert!((v - 0.4).abs() < 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^{-1/2} = 2
        let v = integrate(|x| x.powf(-0.5), 0.0, 1.0, Tolerance::default()).unwrap();
        assert!((v - 2.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn tail_of_power_law() {
        for p in [1.5_f64, 2.0, 3.0, 6.0] {
            for a in [0.5_f64, 1.0, 10.0] {
                let v = integrate_tail(|t| t.powf(-p), a, Tolerance::default()).unwrap();
                let exact = a.powf(1.0 - p) / (p - 1.0);
                assert!(((v - exact) / exact).abs() < 1e-8, "p={p} a={a} {v} {exact}");
            }
        }
    }

    #[test]
    fn divergent_tail_is_an_error() {
        assert!(integrate_tail(|t| 1.0 / t, 1.0, Tolerance::default()).is_err());
    }

    #[test]
    fn gauss_legendre_weights_and_exactness() {
        for n in [1usize, 2, 5, 10, 20] {
            let gl = GaussLegendre::new(n);
            let s: f64 = gl.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13);
            let deg = 2 * n - 1;
            let v = gl.integrate(|x| x.powi(deg as i32 - 1), 0.0, 1.0);
            assert!((v - 1.0 / deg as f64).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn log_space_endpoints() {
        let g = log_space(1.0, 1e4, 5);
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 1.0);
        assert_eq!(g[4], 1e4);
        assert!((g[2] - 100.0).abs() < 1e-10);
    }
}
