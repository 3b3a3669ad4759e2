use aot_core::bounds::generate::{random_measure, rng, standard_example, Shape};
use aot_core::bounds::report::ols;
use aot_core::bounds::suite::{run_suite, suite_scheme, SuiteKind};
use aot_core::bounds::topology::{run_topology_experiment, topology_fixture, Regime};
use aot_core::bounds::*;
use aot_core::smoothing::standard::standard_smooth_aw;
use aot_core::smoothing::{smooth_w, NoiseModel, Scheme};
use aot_core::Measure;
use statrs::distribution::{ContinuousCDF, Normal};

fn phi(z: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().cdf(z)
}

fn line(points: &[(f64, f64)]) -> Measure {
    Measure::new(1, 1, points.iter().map(|&(x, w)| (vec![x], w)).collect()).unwrap()
}

#[test]
fn awtv_examples() {
    let mu = standard_example(0.0);
    let r = check_awtv(&mu, &mu, 2.0, 1.0).unwrap();
    assert_eq!(r.lhs, 0.0);
    assert!(r.pass);
    for eps in [0.1, 0.5] {
        let r = check_awtv(&mu, &standard_example(eps), 1.0, 2.0).unwrap();
        assert!((r.lhs - (eps + 1.0)).abs() < 1e-12);
        assert!((r.rhs - 32.0).abs() < 1e-12);
        assert!(r.pass && !r.budget_dominated);
    }
}

#[test]
fn awsigma_on_standard_grid() {
    let mu = standard_example(0.0);
    let scheme = Scheme {
        grid_fraction: 0.1,
        radius_mult: 5.0,
        ..Scheme::default()
    };
    for eps in [0.25, 0.5] {
        for sigma in [0.25, 0.5, 1.0] {
            let noise = NoiseModel::gaussian(2, sigma).unwrap();
            let r = check_awsigma_w1(&mu, &standard_example(eps), 1.0, 2.0, &noise, &scheme).unwrap();
            let closed = standard_smooth_aw(eps, sigma, 1.0).unwrap();
            assert!(r.pass);
            assert!(closed <= r.rhs);
            // lhs is the grid value; the oracle sits inside its budget
            assert!(closed >= r.lhs - r.budget - 1e-9, "{eps} {sigma}: {} vs {closed}", r.lhs);
        }
    }
    let noise = NoiseModel::gaussian(2, 0.5).unwrap();
    let same = check_awsigma_w1(&mu, &mu, 2.0, 1.0, &noise, &suite_scheme()).unwrap();
    assert!(same.pass);
    assert_eq!(same.extra["w1"], 0.0);
}

#[test]
fn moment_variants() {
    let mu = standard_example(0.0);
    let nu = standard_example(0.5);
    let scheme = suite_scheme();
    let g = NoiseModel::gaussian(2, 0.5).unwrap();
    let a = check_moment_variant(&mu, &nu, 1.0, &g, &scheme, MomentVariant::Moment { q: 2.0 }).unwrap();
    // M_2(μ^σ) + M_2(ν^σ) = 1 + (1 + ε²) + 2·σ²·2
    assert!((a.extra["aux"] - (2.25 + 1.0)).abs() < 1e-12);
    assert!(a.pass);
    let b = check_moment_variant(&mu, &nu, 1.0, &NoiseModel::bump(2, 0.5).unwrap(), &scheme, MomentVariant::Compact)
        .unwrap();
    assert!((b.extra["aux"] - (4.0f64 + 1.0).sqrt()).abs() < 1e-12);
    assert!(b.pass);
    let c = check_moment_variant(
        &mu,
        &nu,
        2.0,
        &g,
        &scheme,
        MomentVariant::Gaussian {
            q: 4.0,
            sigma0: 0.5 / 2f64.sqrt(),
        },
    )
    .unwrap();
    assert!(c.pass);
    assert!(check_moment_variant(&mu, &nu, 1.0, &g, &scheme, MomentVariant::Compact).is_err());
    assert!(check_moment_variant(&mu, &nu, 2.0, &g, &scheme, MomentVariant::Moment { q: 2.0 }).is_err());
}

#[test]
fn projected_w1_lower_bound() {
    // exact in one dimension: compare with ∫|F - G|
    let mu = line(&[(0.0, 0.3), (1.0, 0.7)]);
    let nu = line(&[(-0.5, 0.5), (0.8, 0.5)]);
    let s0 = 0.4;
    let lower = smoothed_w1_lower(&mu, &nu, s0).unwrap();
    let cdf = |m: &Measure, x: f64| m.atoms().map(|(a, w)| w * phi((x - a[0]) / s0)).sum::<f64>();
    let n = 400_000;
    let dx = 16.0 / n as f64;
    let exact: f64 = (0..n)
        .map(|i| {
            let x = -8.0 + (i as f64 + 0.5) * dx;
            (cdf(&mu, x) - cdf(&nu, x)).abs() * dx
        })
        .sum();
    assert!((lower - exact).abs() < 1e-6, "{lower} vs {exact}");
    // in two dimensions it stays below the grid upper bound
    let mu = standard_example(0.0);
    let nu = standard_example(0.5);
    let lower = smoothed_w1_lower(&mu, &nu, 0.5).unwrap();
    let scheme = Scheme {
        grid_fraction: 0.5,
        radius_mult: 3.0,
        ..Scheme::default()
    };
    let grid = smooth_w(&mu, &nu, &NoiseModel::gaussian(2, 0.5).unwrap(), &scheme, 1.0).unwrap();
    assert!(lower > 0.0 && lower <= grid.upper(), "{lower} {grid:?}");
}

#[test]
fn bandwidth_examples() {
    let point = Measure::dirac(1, 2, vec![0.3, -0.2]).unwrap();
    let scheme = Scheme::default();
    for sigma in [0.2, 0.5] {
        let noise = NoiseModel::gaussian(2, sigma).unwrap();
        // the kernel is trivial, so AW_p^p = Σ_t E|σZ_t|^p
        let r1 = check_bandwidth(&point, 1.0, &noise, &scheme).unwrap();
        let exact1 = 2.0 * sigma * (2.0 / std::f64::consts::PI).sqrt();
        assert!((r1.lhs - exact1).abs() <= r1.budget, "{} vs {exact1}", r1.lhs);
        assert!(r1.pass);
        let r2 = check_bandwidth(&point, 2.0, &noise, &scheme).unwrap();
        let exact2 = sigma * 2f64.sqrt();
        assert!((r2.lhs - exact2).abs() <= r2.budget);
        assert!(r2.lhs <= sigma * noise.moment_p(2.0).sqrt() + r2.budget);
        assert!(r2.pass);
    }
    let eps = 0.4;
    for sigma in [eps / 4.0, eps, 4.0 * eps] {
        let noise = NoiseModel::gaussian(2, sigma).unwrap();
        for p in [1.0, 2.0] {
            let r = check_bandwidth(&standard_example(eps), p, &noise, &suite_scheme()).unwrap();
            assert!(r.pass, "{sigma} {p}: {r:?}");
        }
    }
}

#[test]
fn main_bound_examples() {
    let noise = NoiseModel::gaussian(2, 0.5).unwrap();
    let mu = standard_example(0.0);
    let same = check_main_bound(&mu, &mu, 1.0, 2.0, &noise, &suite_scheme()).unwrap();
    assert!(same.pass && same.lhs == 0.0);
    for n in [4.0f64, 16.0, 64.0] {
        let noise = NoiseModel::gaussian(2, n.powf(-0.5)).unwrap();
        let r = check_main_bound(&mu, &standard_example(1.0 / n), 1.0, 2.0, &noise, &suite_scheme()).unwrap();
        assert!(r.pass && r.slack > r.lhs, "{r:?}");
        assert!(r.extra["holder_ratio"].is_finite());
    }
}

#[test]
fn sandwich_examples() {
    let mu = standard_example(0.0);
    for r in check_tv_sandwich(&mu, &mu).unwrap() {
        assert!(r.pass && r.lhs == 0.0 && r.rhs == 0.0);
    }
    let [lo, hi] = check_tv_sandwich(&mu, &standard_example(0.3)).unwrap();
    assert_eq!((lo.lhs, lo.rhs), (1.0, 1.0));
    assert_eq!((hi.lhs, hi.rhs), (1.0, 3.0));
    let mut g = rng(4);
    for _ in 0..40 {
        let shape = Shape::new(1, 3, 4);
        let (a, b) = (random_measure(&mut g, shape), random_measure(&mut g, shape));
        assert!(check_tv_sandwich(&a, &b).unwrap().iter().all(|r| r.pass));
    }
}

#[test]
fn tv_smoothing_examples() {
    let noise = NoiseModel::gaussian(1, 0.5).unwrap();
    let a = line(&[(0.0, 1.0)]);
    let same = check_tv_smoothing(&a, &a, &noise, &Scheme::default()).unwrap();
    assert!(same.pass && same.lhs == 0.0);
    let shift = 0.7;
    let r = check_tv_smoothing(&a, &line(&[(shift, 1.0)]), &noise, &Scheme::relative(0.01)).unwrap();
    let exact = 2.0 * (2.0 * phi(shift / (2.0 * 0.5)) - 1.0);
    assert!(r.lhs <= exact && exact <= r.extra["tv_upper"]);
    assert!(r.pass);
}

#[test]
fn clipping_example() {
    let mu = Measure::new(1, 2, vec![(vec![0.0, 5.0], 0.5), (vec![1.0, -1.0], 0.5)]).unwrap();
    let r = check_clipping(&mu, 1.0, 2.0).unwrap();
    // only the first atom is clipped, by 3 at t = 2
    assert!((r.lhs - 1.5).abs() < 1e-12);
    assert!((r.rhs - 2.0 * 4.0 * 0.5 * 5.0).abs() < 1e-12);
    assert!(r.pass);
}

#[test]
fn report_semantics() {
    let r = BoundReport::new("x", serde_json::json!({"mu": 1}), 2.0, 1.0, 0.5);
    assert!(!r.pass && r.slack == -1.0);
    assert_eq!(r.instance["mu"], 1);
    let r = BoundReport::new("x", serde_json::Value::Null, 1.2, 1.0, 0.5);
    assert!(r.pass && r.budget_dominated);
    let r = BoundReport::new("x", serde_json::Value::Null, 0.0, 1.0, 0.4);
    assert!(r.pass && !r.budget_dominated);
    let text = serde_json::to_string(&r).unwrap();
    let back: BoundReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.verdict(), back.pass);
}

#[test]
fn fit_helpers() {
    let xs = [0.0, 1.0, 2.0, 3.0];
    let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x).collect();
    let (s, c) = ols(&xs, &ys);
    assert!((s + 0.5).abs() < 1e-12 && (c - 2.0).abs() < 1e-12);
    let ns = vec![10, 100, 1000];
    let fit = RateFit::fit(ns.clone(), ns.iter().map(|&n| 3.0 * (n as f64).powf(-0.5)).collect());
    assert!((fit.slope + 0.5).abs() < 1e-12 && fit.residual < 1e-12);
    assert_eq!(kendall_tau(&[3.0, 2.0, 1.0]), -1.0);
    assert_eq!(kendall_tau(&[1.0, 2.0, 3.0]), 1.0);
    assert!((kendall_tau(&[1.0, 3.0, 2.0]) - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn suites_are_deterministic() {
    let a = run_suite(SuiteKind::Core, 3).unwrap();
    let b = run_suite(SuiteKind::Core, 3).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(a.pass && a.first_failure().is_none());
    assert!(a.reports.iter().all(|r| r.verdict() == r.pass));
    let c = run_suite(SuiteKind::Core, 4).unwrap();
    assert_ne!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&c).unwrap());
}

#[test]
fn rate_reruns_reproduce() {
    let mu = default_rate_measure();
    let noise = NoiseModel::gaussian(2, 0.5).unwrap();
    let scheme = aot_core::bounds::rates::rate_scheme();
    let ns = [16, 64, 256];
    let a = run_rate_experiment(&mu, 1.0, &noise, &scheme, &ns, 4, 9).unwrap();
    let b = run_rate_experiment(&mu, 1.0, &noise, &scheme, &ns, 4, 9).unwrap();
    assert_eq!(a, b);
    assert!(a.slope < 0.0);
    assert!(run_rate_experiment(&mu, 1.0, &noise, &scheme, &ns, 0, 9).is_err());
}

#[test]
fn topology_matches_fixture() {
    let fx = topology_fixture();
    let slow = run_topology_experiment(Regime::Slow, fx.p, &fx.ns).unwrap();
    let fixed = run_topology_experiment(Regime::Fixed, fx.p, &fx.ns).unwrap();
    for (pt, want) in slow.points.iter().zip(&fx.slow_oracle) {
        assert!((pt.value - want).abs() < 1e-9);
    }
    for (pt, want) in fixed.points.iter().zip(&fx.fixed_oracle) {
        assert!((pt.value - want).abs() < 1e-9);
    }
    assert_eq!(slow.kendall_tau, -1.0);
}
