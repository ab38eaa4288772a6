use approx::assert_relative_eq;
use proptest::prelude::*;

use pme_green::geometry::{GrowthFunction, VolumeProfile};
use pme_green::green::{green_exact, green_surrogate, Potential, RadialDensity};
use pme_green::pme::{OuterBoundary, RadialGrid, RadialState, Solver, SolverConfig};
use pme_green::smoothing::{eval_h, lambert_w0, smoothing_bound_l1, SmoothingBound};
use pme_green::weighted::l1g_norm;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn lambert_w_solves_its_defining_equation(x in -0.3678794411714423f64..1e8) {
        let w = lambert_w0(x).unwrap();
        prop_assert!(w >= -1.0);
        let lhs = w * w.exp();
        prop_assert!((lhs - x).abs() <= 1e-12 * x.abs().max(1e-3), "w = {w}, x = {x}");
    }

    #[test]
    fn euclidean_green_decreases_and_is_surrogate_over_n(
        n in 3usize..8,
        r in 0.01f64..100.0,
        dr in 0.01f64..10.0,
    ) {
        let p = VolumeProfile::euclidean(n).unwrap();
        let (g1, g2) = (green_exact(&p, r).unwrap(), green_exact(&p, r + dr).unwrap());
        prop_assert!(g2 < g1);
        let ratio = g1 / green_surrogate(&p, r).unwrap();
        assert_relative_eq!(ratio, 1.0 / n as f64, max_relative = 1e-9);
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn theta_inverse_round_trips(k in 3.0f64..6.0, m in 1.2f64..4.0, scale in 0.0f64..6.0) {
        let n = k.ceil() as usize;
        let profile = VolumeProfile::power(n.max(3), k.min(n as f64), 1.0).unwrap();
        let f = GrowthFunction::power(k.min(n as f64), 1.0).unwrap();
        let bound = SmoothingBound::from_growth(&profile, &f, m).unwrap();
        let r = bound.r0() * 10f64.powf(scale);
        let s = bound.theta(r);
        let back = bound.invert_theta(s).unwrap();
        assert_relative_eq!(back, r, max_relative = 1e-8);
    }

    #[test]
    fn h_is_increasing(k in 3.0f64..6.0, a in 1.0f64..50.0, b in 1.0f64..50.0) {
        let f = GrowthFunction::power(k, 1.0).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-6);
        prop_assert!(eval_h(&f, lo).unwrap() < eval_h(&f, hi).unwrap());
    }

    #[test]
    fn smoothing_bound_decreases_in_time(m in 1.2f64..4.0, norm in 0.01f64..100.0, t in 1e-3f64..1e5) {
        let profile = VolumeProfile::euclidean(3).unwrap();
        let f = GrowthFunction::power(3.0, 1.0).unwrap();
        let bound = SmoothingBound::from_growth(&profile, &f, m).unwrap();
        let a = smoothing_bound_l1(&bound, t, norm).unwrap();
        let b = smoothing_bound_l1(&bound, 2.0 * t, norm).unwrap();
        if a.regime == b.regime {
            prop_assert!(b.bound_value < a.bound_value);
        }
    }

    #[test]
    fn potential_is_linear_and_positive(h1 in 0.1f64..5.0, h2 in 0.1f64..5.0, r in 0.05f64..6.0) {
        let profile = VolumeProfile::euclidean(3).unwrap();
        let a = RadialDensity::indicator(1.0, h1);
        let b = RadialDensity::indicator(1.0, h2);
        let sum = RadialDensity::indicator(1.0, h1 + h2);
        let ua = Potential::new(&profile, a).unwrap().value(r).unwrap();
        let ub = Potential::new(&profile, b).unwrap().value(r).unwrap();
        let us = Potential::new(&profile, sum).unwrap().value(r).unwrap();
        prop_assert!(ua > 0.0);
        assert_relative_eq!(us, ua + ub, max_relative = 1e-12);
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn l1g_norm_is_homogeneous_and_subadditive(
        c in 0.1f64..10.0,
        a in 2.5f64..5.0,
        b in 2.5f64..5.0,
    ) {
        let p = VolumeProfile::euclidean(3).unwrap();
        let u = move |r: f64| (1.0 + r).powf(-a);
        let v = move |r: f64| (1.0 + r).powf(-b) * (r - 2.0).signum();
        let nu = l1g_norm(&p, u).unwrap().total;
        let nv = l1g_norm(&p, v).unwrap().total;
        let scaled = l1g_norm(&p, move |r| c * u(r)).unwrap().total;
        let sum = l1g_norm(&p, move |r| u(r) + v(r)).unwrap().total;
        assert_relative_eq!(scaled, c * nu, max_relative = 1e-8);
        prop_assert!(sum <= (nu + nv) * (1.0 + 1e-8));
    }

    #[test]
    fn zero_flux_solver_keeps_mass_and_sign(
        m in 1.5f64..3.0,
        heights in prop::collection::vec(0.0f64..3.0, 8),
    ) {
        let profile = VolumeProfile::euclidean(3).unwrap();
        let grid = RadialGrid::uniform(&profile, 8.0, 160).unwrap();
        let u: Vec<f64> = grid
            .centers
            .iter()
            .map(|&r| {
                let i = (r as usize).min(heights.len() - 1);
                heights[i]
            })
            .collect();
        let mass0 = grid.integrate(&u);
        prop_assume!(mass0 > 0.0);
        let cfg = SolverConfig::explicit(m).with_boundary(OuterBoundary::ZeroFlux);
        let solver = Solver::new(&grid, cfg).unwrap();
        let run = solver.run(RadialState::new(u, 0.0).unwrap(), &[0.1, 0.5]).unwrap();
        for snap in &run.snapshots {
            prop_assert!(snap.iter().all(|&x| x >= 0.0));
        }
        let defect = run.conservation_defect();
        prop_assert!(defect <= 1e-10, "defect {defect}");
    }
}
