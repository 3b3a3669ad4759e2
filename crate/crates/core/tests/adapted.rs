use aot_core::adapted::{
    adapted_cost_matrix, av, aw_p, aw_p_value, bicausal_lp_oracle, mismatch_cost_matrix, Coupling,
};
use aot_core::bounds::generate::{random_measure, rng, standard_example, Shape};
use aot_core::ot::{wasserstein_p, CostMatrix, WeightedPoints};
use aot_core::{tv_distance, Measure, Measure32};

fn as_points(mu: &Measure) -> WeightedPoints {
    WeightedPoints::new(mu.dim() * mu.horizon(), mu.paths_flat().to_vec(), mu.weights().to_vec()).unwrap()
}

#[test]
fn standard_example_closed_form() {
    let mu = standard_example(0.0);
    for &eps in &[0.01, 0.1, 0.5, 1.0] {
        let me = standard_example(eps);
        for &p in &[1.0f64, 2.0, 3.0] {
            let (v, c) = aw_p(&mu, &me, p).unwrap();
            let want = (eps.powf(p) + 2f64.powf(p - 1.0)).powf(1.0 / p);
            assert!((v - want).abs() < 1e-12, "eps {eps} p {p}: {v} vs {want}");
            assert!(c.verify_bicausal().bicausal);
            assert!((c.adapted_cost(p) - v.powf(p)).abs() < 1e-12);
        }
    }
    let v = aw_p_value(&mu, &standard_example(0.1), 2.0).unwrap();
    assert!((v - (0.01f64 + 2.0).sqrt()).abs() < 1e-12);
}

#[test]
fn identical_measures_give_identity_coupling() {
    let mut r = rng(3);
    let mu = random_measure(&mut r, Shape::new(2, 3, 6));
    let (v, c) = aw_p(&mu, &mu, 1.5).unwrap();
    assert!(v.abs() < 1e-12);
    assert!(c.atoms().iter().all(|&(i, j, _)| i == j));
}

#[test]
fn av_examples() {
    let mu = standard_example(0.0);
    assert_eq!(av(&mu, &mu).unwrap(), 0.0);
    for &eps in &[0.01, 0.5] {
        let me = standard_example(eps);
        assert!((av(&mu, &me).unwrap() - 1.0).abs() < 1e-12);
        let oracle = bicausal_lp_oracle(&mu, &me, &mismatch_cost_matrix(&mu, &me).unwrap()).unwrap();
        assert!((oracle - 1.0).abs() < 1e-9);
    }
}

#[test]
fn oracle_basics() {
    let mu = standard_example(0.0);
    let me = standard_example(0.3);
    let zero = CostMatrix::new(2, 2, vec![0.0; 4]).unwrap();
    assert_eq!(bicausal_lp_oracle(&mu, &me, &zero).unwrap(), 0.0);
    let v = bicausal_lp_oracle(&mu, &me, &adapted_cost_matrix(&mu, &me, 1.0).unwrap()).unwrap();
    assert!((v - 1.3).abs() < 1e-9);
    let mut r = rng(1);
    let big = Measure::from_unnormalized(1, 2, (0..26).map(|_| rand::Rng::gen_range(&mut r, -2.0..2.0)).collect(), vec![1.0; 13]).unwrap();
    let err = bicausal_lp_oracle(&big, &big, &adapted_cost_matrix(&big, &big, 1.0).unwrap()).unwrap_err();
    assert!(err.to_string().starts_with("size error"));
}

#[test]
fn dpp_matches_oracle_on_random_instances() {
    let mut r = rng(11);
    for k in 0..60 {
        let shape = Shape::new(1 + k % 2, 2 + k % 2, 4);
        let mu = random_measure(&mut r, shape);
        let nu = random_measure(&mut r, shape);
        let p = [1.0, 2.0, 1.5][k % 3];
        let (v, c) = aw_p(&mu, &nu, p).unwrap();
        let o = bicausal_lp_oracle(&mu, &nu, &adapted_cost_matrix(&mu, &nu, p).unwrap()).unwrap();
        assert!((v.powf(p) - o).abs() <= 1e-7 * o.max(1.0), "instance {k}: {} vs {o}", v.powf(p));
        let report = c.verify_bicausal();
        assert!(report.bicausal, "instance {k}: {:?}", report.worst);
        assert!(c.marginal_residual() < 1e-9);
        assert!((c.adapted_cost(p) - v.powf(p)).abs() < 1e-9);
        let a = av(&mu, &nu).unwrap();
        let oa = bicausal_lp_oracle(&mu, &nu, &mismatch_cost_matrix(&mu, &nu).unwrap()).unwrap();
        assert!((a - oa).abs() <= 1e-7, "instance {k}: av {a} vs {oa}");
    }
}

#[test]
fn product_coupling_is_bicausal() {
    let mut r = rng(5);
    for _ in 0..20 {
        let mu = random_measure(&mut r, Shape::new(1, 3, 5));
        let nu = random_measure(&mut r, Shape::new(1, 3, 5));
        let c = Coupling::product(&mu, &nu).unwrap();
        assert!(c.verify_bicausal().bicausal);
    }
}

#[test]
fn non_adapted_plan_is_flagged() {
    let mu = standard_example(0.0);
    let me = standard_example(0.2);
    // W_p-optimal plan: (0,1) with (0.2,1), (0,-1) with (-0.2,-1).
    let (w, plan) = wasserstein_p(&as_points(&mu), &as_points(&me), 1.0).unwrap();
    assert!((w - 0.2).abs() < 1e-12);
    let c = Coupling::new(&mu, &me, plan.entries.clone()).unwrap();
    let report = c.verify_bicausal();
    assert!(!report.bicausal);
    let v = report.worst.unwrap();
    assert_eq!(v.t, 1);
    assert!(v.amount > 0.2);
    assert_eq!(v.left_prefix, vec![0.0]);
    assert!(v.right_prefix == vec![0.2] || v.right_prefix == vec![-0.2]);
}

#[test]
fn coupling_rejects_bad_marginals() {
    let mu = standard_example(0.0);
    let err = Coupling::new(&mu, &mu, vec![(0, 0, 0.5), (1, 1, 0.4)]).unwrap_err();
    assert!(err.to_string().starts_with("weight error"));
}

#[test]
fn metric_axioms_and_comparison_with_w() {
    let mut r = rng(21);
    for k in 0..60 {
        let shape = Shape::new(1 + k % 2, 2 + k % 2, 5);
        let a = random_measure(&mut r, shape);
        let b = random_measure(&mut r, shape);
        let c = random_measure(&mut r, shape);
        for &p in &[1.0f64, 2.0, 3.0] {
            let ab = aw_p_value(&a, &b, p).unwrap();
            let ba = aw_p_value(&b, &a, p).unwrap();
            let ac = aw_p_value(&a, &c, p).unwrap();
            let bc = aw_p_value(&b, &c, p).unwrap();
            assert!((ab - ba).abs() < 1e-9, "symmetry {ab} {ba}");
            assert!(ac <= ab + bc + 1e-7);
            let w = wasserstein_p(&as_points(&a), &as_points(&b), p).unwrap().0;
            let t = a.horizon() as f64;
            let cst = if p <= 2.0 { 1.0 } else { t.powf(0.5 - 1.0 / p) };
            assert!(w <= cst * ab + 1e-9, "W {w} vs C*AW {}", cst * ab);
        }
        let tab = tv_distance(&a, &b).unwrap();
        let tac = tv_distance(&a, &c).unwrap();
        let tbc = tv_distance(&b, &c).unwrap();
        assert!(tac <= tab + tbc + 1e-12);
        assert!((tab - tv_distance(&b, &a).unwrap()).abs() < 1e-15);
    }
}

#[test]
fn translation_invariance() {
    let mut r = rng(8);
    for _ in 0..20 {
        let shape = Shape::new(2, 2, 5);
        let a = random_measure(&mut r, shape);
        let b = random_measure(&mut r, shape);
        let shift = [0.3, -1.7, 2.5, 0.125];
        let v = aw_p_value(&a, &b, 2.0).unwrap();
        let vs = aw_p_value(&a.translate(&shift).unwrap(), &b.translate(&shift).unwrap(), 2.0).unwrap();
        assert!((v - vs).abs() < 1e-9);
    }
}

#[test]
fn single_precision_instantiation() {
    let mu: Measure32 = standard_example(0.0).cast();
    let me: Measure32 = standard_example(0.5).cast();
    let (v, _) = aw_p(&mu, &me, 1.0f32).unwrap();
    assert!((v - 1.5).abs() < 1e-5);
}

#[test]
fn dimension_mismatch_is_rejected() {
    let mu = standard_example(0.0);
    let other = Measure::dirac(1, 3, vec![0.0, 0.0, 0.0]).unwrap();
    assert!(aw_p(&mu, &other, 1.0).unwrap_err().to_string().starts_with("dimension error"));
    assert!(av(&mu, &other).is_err());
}
