//! Seeded random instances. Coordinates lie in `[-2, 2]`, weights follow a
//! symmetric Dirichlet(1) law and atom counts are at most six.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::measure::PathMeasure;

pub use rand::SeedableRng;
pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dirichlet(rng: &mut Rng64, n: usize) -> Vec<f64> {
    let g = Gamma::<f64>::new(1.0, 1.0).expect("valid shape");
    let raw: Vec<f64> = (0..n).map(|_| g.sample(rng).max(1e-300)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

/// Shape of a random instance.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub d: usize,
    pub horizon: usize,
    pub max_atoms: usize,
    /// Snap coordinates to this lattice so prefixes are shared and kernels
    /// are nontrivial.
    pub lattice: Option<f64>,
}

impl Shape {
    pub fn new(d: usize, horizon: usize, max_atoms: usize) -> Self {
        Shape {
            d,
            horizon,
            max_atoms,
            lattice: Some(1.0),
        }
    }

    pub fn continuous(mut self) -> Self {
        self.lattice = None;
        self
    }
}

pub fn random_measure(rng: &mut Rng64, shape: Shape) -> PathMeasure {
    let n = rng.gen_range(1..=shape.max_atoms);
    let len = shape.d * shape.horizon;
    let paths: Vec<f64> = (0..n * len)
        .map(|_| {
            let x: f64 = rng.gen_range(-2.0..=2.0);
            match shape.lattice {
                Some(h) => (x / h).round() * h,
                None => x,
            }
        })
        .collect();
    let w = dirichlet(rng, n);
    PathMeasure::from_unnormalized(shape.d, shape.horizon, paths, w).expect("generated measure is valid")
}

/// Heavy-tailed instance: Pareto(1.5) radii in random directions per step.
pub fn heavy_tailed_measure(rng: &mut Rng64, shape: Shape) -> PathMeasure {
    let n = rng.gen_range(2..=shape.max_atoms.max(2));
    let mut paths = Vec::with_capacity(n * shape.d * shape.horizon);
    for _ in 0..n * shape.horizon {
        let u: f64 = rng.gen_range(1e-3..1.0);
        let r = u.powf(-1.0 / 1.5);
        let mut dir: Vec<f64> = (0..shape.d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
        dir.iter_mut().for_each(|x| *x *= r / norm);
        paths.extend(dir);
    }
    let w = dirichlet(rng, n);
    PathMeasure::from_unnormalized(shape.d, shape.horizon, paths, w).expect("generated measure is valid")
}

/// `½δ_{(0,1)} + ½δ_{(0,-1)}` when `eps = 0`, else `½δ_{(ε,1)} + ½δ_{(-ε,-1)}`.
pub fn standard_example(eps: f64) -> PathMeasure {
    PathMeasure::new(1, 2, vec![(vec![eps, 1.0], 0.5), (vec![-eps, -1.0], 0.5)]).expect("valid")
}
