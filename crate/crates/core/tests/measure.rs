use aot_core::adapted::aw_p_value;
use aot_core::bounds::generate::{heavy_tailed_measure, random_measure, rng, standard_example, Shape};
use aot_core::measure::{from_json, to_json};
use aot_core::{tv_distance, DisintegrationTree, Measure};
use proptest::prelude::*;

fn measure_strategy(d: usize, t: usize) -> impl Strategy<Value = Measure> {
    (1usize..=6).prop_flat_map(move |n| {
        (
            prop::collection::vec(-4i32..=4, n * d * t),
            prop::collection::vec(0.05..1.0f64, n),
        )
            .prop_map(move |(c, w)| {
                let c = c.into_iter().map(|k| k as f64 * 0.5).collect();
                Measure::from_unnormalized(d, t, c, w).unwrap()
            })
    })
}

fn same_atoms(a: &Measure, b: &Measure) -> bool {
    a.len() == b.len()
        && a.atoms().all(|(p, w)| {
            b.atoms().any(|(q, v)| p == q && (w - v).abs() < 1e-12)
        })
}

#[test]
fn disintegration_of_standard_example() {
    let tree = DisintegrationTree::build(&standard_example(0.25));
    let root = tree.node(tree.root());
    assert_eq!(root.children.len(), 2);
    for (k, &c) in root.children.iter().enumerate() {
        assert_eq!(root.cond[k], 0.5);
        let n = tree.node(c);
        assert_eq!(n.children.len(), 1);
        assert_eq!(n.cond, vec![1.0]);
    }
    assert_eq!(tree.node(root.children[0]).value, vec![0.25]);
    assert_eq!(tree.node(root.children[1]).value, vec![-0.25]);
}

#[test]
fn single_atom_is_a_chain() {
    let mu = Measure::dirac(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
    let tree = DisintegrationTree::build(&mu);
    for t in 0..3 {
        let &id = tree.level(t).first().unwrap();
        assert_eq!(tree.level(t).len(), 1);
        assert_eq!(tree.node(id).cond, vec![1.0]);
    }
    assert_eq!(tree.level(3).len(), 1);
}

#[test]
fn shared_prefix_groups_and_reflattens() {
    let mu = Measure::new(
        1,
        2,
        vec![
            (vec![0.0, 1.0], 0.1),
            (vec![0.0, 2.0], 0.3),
            (vec![1.0, 1.0], 0.4),
            (vec![2.0, 0.0], 0.2),
        ],
    )
    .unwrap();
    let tree = DisintegrationTree::build(&mu);
    assert_eq!(tree.level(1).len(), 3);
    let first = tree.node(tree.level(1)[0]);
    assert_eq!(first.children.len(), 2);
    assert!((first.cond[0] - 0.25).abs() < 1e-15 && (first.cond[1] - 0.75).abs() < 1e-15);
    assert!(same_atoms(&tree.flatten(), &mu));
    let (fut, w) = tree.future(tree.level(1)[0]);
    assert_eq!(fut, vec![1.0, 2.0]);
    assert!((w[0] - 0.25).abs() < 1e-15);
    assert_eq!(tree.prefix(first.children[1]), vec![0.0, 2.0]);
}

#[test]
fn construction_validates() {
    let e = Measure::new(1, 1, vec![(vec![0.0], 0.5), (vec![1.0], 0.4)]).unwrap_err();
    assert!(e.to_string().starts_with("weight error"));
    assert!(e.to_string().contains("deficit"));
    let e = Measure::new(1, 1, vec![(vec![0.0], 1.5), (vec![1.0], -0.5)]).unwrap_err();
    assert!(e.to_string().starts_with("weight error"));
    let e = Measure::new(1, 2, vec![(vec![0.0], 1.0)]).unwrap_err();
    assert!(e.to_string().starts_with("dimension error"));
    let e = Measure::new(1, 1, vec![(vec![f64::NAN], 1.0)]).unwrap_err();
    assert!(e.is_validation());
    let merged = Measure::new(1, 1, vec![(vec![0.0], 0.5), (vec![-0.0], 0.5)]).unwrap();
    assert_eq!(merged.len(), 1);
    assert_eq!(merged.weight(0), 1.0);
}

#[test]
fn moments_and_tails() {
    assert_eq!(Measure::dirac(2, 2, vec![0.0; 4]).unwrap().moment_p(3.0), 0.0);
    assert!((standard_example(0.0).moment_p(2.0) - 1.0).abs() < 1e-15);
    let mu = Measure::new(2, 1, vec![(vec![3.0, 4.0], 0.2), (vec![1.0, 0.0], 0.5), (vec![0.0, -2.0], 0.3)]).unwrap();
    let direct = 0.2 * 5f64.powf(1.5) + 0.5 * 1.0 + 0.3 * 2f64.powf(1.5);
    assert!((mu.moment_p(1.5) - direct).abs() < 1e-12);
    assert!((mu.tail_p(1.5, 2.0) - (0.2 * 5f64.powf(1.5) + 0.3 * 2f64.powf(1.5))).abs() < 1e-12);
    assert_eq!(mu.tail_p(1.0, 5.5), 0.0);
    assert!((mu.tail_p(2.0, 1e-12) - mu.moment_p(2.0)).abs() < 1e-15);
}

#[test]
fn tv_examples() {
    let mu = standard_example(0.0);
    assert_eq!(tv_distance(&mu, &mu).unwrap(), 0.0);
    assert_eq!(tv_distance(&mu, &standard_example(0.1)).unwrap(), 2.0);
    let a = Measure::new(1, 1, vec![(vec![0.0], 0.75), (vec![1.0], 0.25)]).unwrap();
    let b = Measure::new(1, 1, vec![(vec![0.0], 0.25), (vec![1.0], 0.75)]).unwrap();
    assert!((tv_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn clip_examples() {
    let mu = standard_example(0.5);
    assert_eq!(mu.clip(2.0).unwrap(), mu);
    let single = Measure::dirac(2, 2, vec![0.0, 4.0, 1.0, 0.0]).unwrap();
    let c = single.clip(2.0).unwrap();
    assert_eq!(c.path(0), &[0.0, 2.0, 1.0, 0.0]);
    let collide = Measure::new(1, 1, vec![(vec![3.0], 0.5), (vec![5.0], 0.5)]).unwrap();
    assert_eq!(collide.clip(1.0).unwrap().len(), 1);
}

#[test]
fn clipping_bound_on_heavy_tails() {
    let mut r = rng(77);
    for _ in 0..20 {
        let shape = Shape::new(1 + rand::Rng::gen_range(&mut r, 0..2), 2, 6);
        let mu = heavy_tailed_measure(&mut r, shape);
        for &p in &[1.0f64, 2.0] {
            let big_r = 2.0;
            let c = mu.clip(big_r).unwrap();
            let lhs = aw_p_value(&mu, &c, p).unwrap().powf(p);
            let t = mu.horizon() as f64;
            let rhs = 2f64.powf(p) * t * t * mu.tail_p(p, big_r);
            assert!(lhs <= rhs + 1e-9, "{lhs} > {rhs}");
        }
    }
}

#[test]
fn sampling() {
    let one = Measure::dirac(1, 2, vec![1.0, 2.0]).unwrap();
    assert_eq!(one.sample_empirical(17, 4).unwrap(), one);
    let two = Measure::new(1, 1, vec![(vec![0.0], 0.5), (vec![1.0], 0.5)]).unwrap();
    let n = 40_000;
    let e = two.sample_empirical(n, 9).unwrap();
    for &w in e.weights() {
        assert!((w - 0.5).abs() < 3.0 / (n as f64).sqrt());
    }
    assert_eq!(e, two.sample_empirical(n, 9).unwrap());
    assert_ne!(e, two.sample_empirical(n, 10).unwrap());
    assert!(two.sample_empirical(0, 1).is_err());
}

#[test]
fn quantize_examples() {
    let on_grid = Measure::new(1, 2, vec![(vec![0.5, 1.0], 0.5), (vec![-0.25, 0.0], 0.5)]).unwrap();
    let (q, b) = on_grid.quantize(0.25, 2.0).unwrap();
    assert_eq!(q, on_grid);
    assert_eq!(b, 0.0);
    let h = 0.5;
    let off = Measure::dirac(2, 1, vec![h / 4.0, -h / 4.0]).unwrap();
    let (q, b) = off.quantize(h, 1.0).unwrap();
    assert_eq!(q.path(0), &[0.0, 0.0]);
    let direct = ((h / 4.0) * (h / 4.0) * 2.0f64).sqrt();
    assert!((b - direct).abs() < 1e-15);
    assert!(b <= h * 2f64.sqrt() / 2.0);
    let pair = Measure::new(1, 1, vec![(vec![0.1], 0.3), (vec![-0.1], 0.7)]).unwrap();
    let (q, _) = pair.quantize(1.0, 1.0).unwrap();
    assert_eq!(q.len(), 1);
    assert_eq!(q.weight(0), 1.0);
}

#[test]
fn json_round_trip_and_errors() {
    let mu = standard_example(0.5);
    let text = to_json(&mu);
    assert_eq!(from_json::<f64>(&text).unwrap(), mu);
    let e = from_json::<f64>(r#"{"d":1,"T":2,"atoms":[{"path":[[0],[1]]}]}"#).unwrap_err();
    assert!(e.to_string().starts_with("parse error") && e.to_string().contains("weight"), "{e}");
    assert!(e.to_string().contains("column"));
    let e = from_json::<f64>(r#"{"d":1,"T":2,"atoms":[{"path":[[0],[1]],"weight":0.9}]}"#).unwrap_err();
    assert!(e.to_string().starts_with("weight error"));
    let e = from_json::<f64>(r#"{"d":2,"T":2,"atoms":[{"path":[[0],[1]],"weight":1}]}"#).unwrap_err();
    assert!(e.to_string().starts_with("dimension error"));
}

proptest! {
    #[test]
    fn flatten_inverts_disintegrate(mu in measure_strategy(1, 3)) {
        let tree = DisintegrationTree::build(&mu);
        prop_assert!(same_atoms(&tree.flatten(), &mu));
        for node in tree.nodes() {
            if !node.children.is_empty() {
                let s: f64 = node.cond.iter().sum();
                prop_assert!((s - 1.0).abs() < 1e-9);
            }
        }
        for &leaf in tree.level(3) {
            prop_assert_eq!(tree.node(leaf).depth, 3);
        }
        let again = DisintegrationTree::build(&tree.flatten());
        prop_assert_eq!(again.nodes().len(), tree.nodes().len());
    }

    #[test]
    fn tv_is_a_metric(a in measure_strategy(1, 2), b in measure_strategy(1, 2), c in measure_strategy(1, 2)) {
        let ab = tv_distance(&a, &b).unwrap();
        prop_assert!((ab - tv_distance(&b, &a).unwrap()).abs() < 1e-15);
        prop_assert!(tv_distance(&a, &c).unwrap() <= ab + tv_distance(&b, &c).unwrap() + 1e-12);
        prop_assert!(ab <= 2.0 + 1e-12);
        prop_assert_eq!(ab == 0.0, same_atoms(&a, &b) || ab < 1e-15);
    }

    #[test]
    fn clip_is_idempotent_and_shrinks_moments(mu in measure_strategy(2, 2), r in 0.3..3.0f64, p in 1.0..3.0f64) {
        let c = mu.clip(r).unwrap();
        let cc = c.clip(r).unwrap();
        prop_assert!(same_atoms(&c, &cc));
        prop_assert!(c.moment_p(p) <= mu.moment_p(p) + 1e-12);
    }

    #[test]
    fn tail_is_nonincreasing(mu in measure_strategy(2, 2), p in 1.0..3.0f64) {
        let mut last = f64::INFINITY;
        for k in 0..30 {
            let t = mu.tail_p(p, 0.01 + k as f64 * 0.2);
            prop_assert!(t <= last);
            last = t;
        }
        prop_assert_eq!(mu.tail_p(p, mu.max_norm() + 1e-9), 0.0);
    }
}

#[test]
fn random_generators_are_seeded() {
    let a = random_measure(&mut rng(5), Shape::new(2, 3, 6));
    let b = random_measure(&mut rng(5), Shape::new(2, 3, 6));
    assert_eq!(a, b);
}
