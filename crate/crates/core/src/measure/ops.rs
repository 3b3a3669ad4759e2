use std::collections::HashMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::PathMeasure;
use crate::error::{Error, Result};
use crate::scalar::{norm, powp, Scalar};

impl<S: Scalar> PathMeasure<S> {
    /// `∫ |x|^p dμ` with the Euclidean norm on `R^{dT}`.
    pub fn moment_p(&self, p: S) -> S {
        self.atoms().map(|(x, w)| w * powp(norm(x), p)).sum()
    }

    /// `∫_{|x| >= r} |x|^p dμ`.
    pub fn tail_p(&self, p: S, r: S) -> S {
        self.atoms()
            .filter_map(|(x, w)| {
                let n = norm(x);
                (n >= r).then(|| w * powp(n, p))
            })
            .sum()
    }

    /// Largest Euclidean norm of an atom.
    pub fn max_norm(&self) -> S {
        self.atoms().map(|(x, _)| norm(x)).fold(S::zero(), S::max)
    }

    /// Radial projection of every time step onto the closed ball of radius `r`.
    /// Steps whose norm is within a relative `1e-12` of `r` are left alone so
    /// the map is exactly idempotent in floating point.
    pub fn clip(&self, r: S) -> Result<Self> {
        if !(r > S::zero()) {
            return Err(Error::param("R", r, "must be positive"));
        }
        let d = self.dim();
        self.map_paths(|p| {
            let mut q = p.to_vec();
            for x in q.chunks_mut(d) {
                let n = norm(x);
                if n > r * (S::one() + S::of(1e-12)) {
                    let s = r / n;
                    x.iter_mut().for_each(|v| *v = *v * s);
                }
            }
            q
        })
    }

    /// Empirical measure of `n` i.i.d. draws.
    pub fn sample_empirical(&self, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", n, "must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = self.weights().iter().map(|w| w.f64()).collect();
        let dist = WeightedIndex::new(&w).map_err(|e| Error::Weights(e.to_string()))?;
        let mut counts = vec![0usize; self.len()];
        for _ in 0..n {
            counts[dist.sample(&mut rng)] += 1;
        }
        let stride = self.dim() * self.horizon();
        let mut paths = Vec::new();
        let mut weights = Vec::new();
        for (i, &k) in counts.iter().enumerate() {
            if k > 0 {
                paths.extend_from_slice(&self.paths_flat()[i * stride..(i + 1) * stride]);
                weights.push(S::of(k as f64 / n as f64));
            }
        }
        Self::from_unnormalized(self.dim(), self.horizon(), paths, weights)
    }

    /// Rounds every coordinate to the nearest multiple of `h`. Returns the
    /// quantized measure and the transport cost `Σ w |x - q(x)|^p` it incurs.
    pub fn quantize(&self, h: S, p: S) -> Result<(Self, S)> {
        if !(h > S::zero()) || !h.is_finite() {
            return Err(Error::param("grid_step", h, "must be positive"));
        }
        let mut cost = S::zero();
        let mut paths = Vec::with_capacity(self.paths_flat().len());
        for (x, w) in self.atoms() {
            let q: Vec<S> = x.iter().map(|&v| (v / h).round() * h).collect();
            cost = cost + w * crate::scalar::dist_p(x, &q, p);
            paths.extend(q);
        }
        let out = Self::from_unnormalized(
            self.dim(),
            self.horizon(),
            paths,
            self.weights().to_vec(),
        )?;
        Ok((out, cost))
    }
}

/// `Σ |μ(x) - ν(x)|` over the union of atoms, matching paths exactly.
pub fn tv_distance<S: Scalar>(mu: &PathMeasure<S>, nu: &PathMeasure<S>) -> Result<S> {
    mu.same_shape(nu)?;
    let key = |p: &[S]| p.iter().map(|x| x.key()).collect::<Vec<u64>>();
    let mut diff: HashMap<Vec<u64>, S> = HashMap::with_capacity(mu.len() + nu.len());
    let mut order = Vec::new();
    for (p, w) in mu.atoms() {
        let k = key(p);
        order.push(k.clone());
        diff.insert(k, w);
    }
    for (p, w) in nu.atoms() {
        let k = key(p);
        match diff.get_mut(&k) {
            Some(v) => *v = *v - w,
            None => {
                order.push(k.clone());
                diff.insert(k, -w);
            }
        }
    }
    Ok(order.iter().map(|k| diff[k].abs()).sum())
}
