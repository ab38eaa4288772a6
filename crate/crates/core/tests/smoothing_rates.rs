use pme_green::geometry::{GrowthFunction, VolumeProfile};
use pme_green::quadrature::log_space;
use pme_green::smoothing::{
    corollary_rate, smoothing_bound_l1, smoothing_bound_l1g, Prefactors, ProfileClass, Regime,
    SmoothingBound,
};

fn loglog_slope(t0: f64, t1: f64, v0: f64, v1: f64) -> f64 {
    (v1 / v0).ln() / (t1 / t0).ln()
}

#[test]
fn euclidean_large_time_slope_matches_small_time_exponent() {
    for m in [1.5, 2.0, 3.0] {
        let profile = VolumeProfile::euclidean(3).unwrap();
        let f = GrowthFunction::power(3.0, 1.0).unwrap();
        let bound = SmoothingBound::from_growth(&profile, &f, m).unwrap();
        let a = smoothing_bound_l1(&bound, 1e8, 1.0).unwrap();
        let b = smoothing_bound_l1(&bound, 1e9, 1.0).unwrap();
        assert_eq!(a.regime, Regime::LargeTime);
        let expected = -3.0 / ((m - 1.0) * 3.0 + 2.0);
        let slope = loglog_slope(1e8, 1e9, a.bound_value, b.bound_value);
        assert!((slope - expected).abs() <= 1e-6, "m = {m}: {slope} vs {expected}");
    }
}

#[test]
fn power_class_slope_ignores_the_growth_exponent() {
    let m = 2.0;
    let lambda = 4.0;
    let expected = -lambda / ((m - 1.0) * lambda + 2.0);
    for k in [3.0, 3.5, 4.0] {
        let profile = VolumeProfile::power(5, lambda, 1.0).unwrap();
        let f = GrowthFunction::power(k, 1.0).unwrap();
        let bound = SmoothingBound::from_growth(&profile, &f, m).unwrap();
        let a = smoothing_bound_l1(&bound, 1e6, 1.0).unwrap().bound_value;
        let b = smoothing_bound_l1(&bound, 1e7, 1.0).unwrap().bound_value;
        let slope = loglog_slope(1e6, 1e7, a, b);
        assert!((slope - expected).abs() <= 1e-6, "k = {k}: {slope}");
        for delta in [0.0, 0.5] {
            let class = ProfileClass::PowerGrowth { k, delta, lambda };
            let c0 = corollary_rate(class, 5, m, 1e6, 1.0, 1.0).unwrap();
            let c1 = corollary_rate(class, 5, m, 1e7, 1.0, 1.0).unwrap();
            assert!((loglog_slope(1e6, 1e7, c0, c1) - expected).abs() <= 1e-12);
        }
    }
}

#[test]
fn log_class_rate_tracks_the_generic_bound() {
    let m = 2.0;
    let (lambda, sigma, delta) = (3.0, 1.0, 2.0);
    let profile = VolumeProfile::power_log(4, lambda, sigma, 1.0).unwrap();
    let f = GrowthFunction::power_log(2.0, delta, std::f64::consts::E).unwrap();
    let bound = SmoothingBound::from_growth(&profile, &f, m).unwrap();
    let class = ProfileClass::LogGrowth { delta, lambda, sigma };
    let norm = 100.0;
    let ratios: Vec<f64> = log_space(10.0, 1e6, 11)
        .into_iter()
        .map(|t| {
            let generic = smoothing_bound_l1(&bound, t, norm).unwrap();
            assert_eq!(generic.regime, Regime::LargeTime, "t = {t}");
            generic.bound_value / corollary_rate(class, 4, m, t, norm, 1.0).unwrap()
        })
        .collect();
    let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
    assert!(lo > 0.5 && hi < 2.0, "{ratios:?}");
    assert!(hi / lo < 1.5, "{ratios:?}");
}

#[test]
fn log_class_rejects_negative_log_exponent() {
    let class = ProfileClass::LogGrowth { delta: 2.0, lambda: 3.0, sigma: -2.0 };
    assert!(corollary_rate(class, 4, 2.0, 1e4, 1.0, 1.0).is_err());
}

#[test]
fn threshold_separates_the_two_regimes() {
    let profile = VolumeProfile::euclidean(3).unwrap();
    let f = GrowthFunction::power(3.0, 1.0).unwrap();
    let bound = SmoothingBound::from_growth(&profile, &f, 2.0).unwrap();
    let t_star = smoothing_bound_l1(&bound, 1.0, 1.0).unwrap().threshold_time;
    assert!((t_star - bound.k_threshold()).abs() <= 1e-12 * t_star);
    let before = smoothing_bound_l1(&bound, t_star * (1.0 - 1e-9), 1.0).unwrap();
    let at = smoothing_bound_l1(&bound, t_star, 1.0).unwrap();
    assert_eq!(before.regime, Regime::SmallTime);
    assert_eq!(at.regime, Regime::LargeTime);
    assert!((at.r_star.unwrap() - bound.r0()).abs() <= 1e-8);
}

#[test]
fn weighted_bound_switches_at_unit_scaled_time() {
    let m = 3.0;
    let norm: f64 = 4.0;
    let threshold = norm.powf(-(m - 1.0));
    let p = Prefactors::default();
    let small = smoothing_bound_l1g(m, 3, 0.5 * threshold, norm, p).unwrap();
    let large = smoothing_bound_l1g(m, 3, 2.0 * threshold, norm, p).unwrap();
    assert_eq!(small.regime, Regime::SmallTime);
    assert_eq!(large.regime, Regime::LargeTime);
    let expected = (2.0 * threshold).powf(-1.0 / m) * norm.powf(1.0 / m);
    assert!((large.bound_value - expected).abs() <= 1e-14 * expected);
}
