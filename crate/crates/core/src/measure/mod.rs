//! Finitely supported probability measures on `(R^d)^T`.

mod io;
mod ops;
mod tree;

use std::collections::HashMap;

pub use io::{from_json, to_json, to_json_value, MeasureJson};
pub use ops::tv_distance;
pub use tree::{DisintegrationTree, Node};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Weighted path atoms. Paths are stored flat, `T*d` coordinates per atom,
/// time-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PathMeasure<S = f64> {
    d: usize,
    horizon: usize,
    paths: Vec<S>,
    weights: Vec<S>,
}

impl<S: Scalar> PathMeasure<S> {
    /// Validating constructor. Duplicate paths are merged by summing weights.
    pub fn new(d: usize, horizon: usize, atoms: Vec<(Vec<S>, S)>) -> Result<Self> {
        let mut paths = Vec::with_capacity(atoms.len() * d * horizon);
        let mut weights = Vec::with_capacity(atoms.len());
        for (i, (p, w)) in atoms.into_iter().enumerate() {
            if p.len() != d * horizon {
                return Err(Error::Dimension(format!(
                    "atom {i} has {} coordinates, expected T*d = {}",
                    p.len(),
                    d * horizon
                )));
            }
            paths.extend(p);
            weights.push(w);
        }
        Self::from_flat(d, horizon, paths, weights)
    }

    pub fn from_flat(d: usize, horizon: usize, paths: Vec<S>, weights: Vec<S>) -> Result<Self> {
        Self::check_shape(d, horizon, &paths, &weights)?;
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w <= S::zero() {
                return Err(Error::NonPositiveWeight {
                    index: i,
                    weight: w.f64(),
                });
            }
        }
        let sum: f64 = weights.iter().map(|w| w.f64()).sum();
        if (sum - 1.0).abs() > S::TOL {
            return Err(Error::WeightSum {
                sum,
                deficit: 1.0 - sum,
            });
        }
        Ok(Self::merged(d, horizon, paths, weights))
    }

    /// Builds a measure from nonnegative weights of any total mass; zero weights
    /// are dropped and the rest renormalized.
    pub fn from_unnormalized(
        d: usize,
        horizon: usize,
        paths: Vec<S>,
        weights: Vec<S>,
    ) -> Result<Self> {
        Self::check_shape(d, horizon, &paths, &weights)?;
        let total: S = weights.iter().copied().sum();
        if !(total > S::zero()) || !total.is_finite() {
            return Err(Error::Weights(format!("total mass {total} is not positive")));
        }
        let stride = d * horizon;
        let mut kp = Vec::with_capacity(paths.len());
        let mut kw = Vec::with_capacity(weights.len());
        for (i, &w) in weights.iter().enumerate() {
            if w < S::zero() || !w.is_finite() {
                return Err(Error::NonPositiveWeight {
                    index: i,
                    weight: w.f64(),
                });
            }
            if w > S::zero() {
                kp.extend_from_slice(&paths[i * stride..(i + 1) * stride]);
                kw.push(w / total);
            }
        }
        Ok(Self::merged(d, horizon, kp, kw))
    }

    /// Trusted constructor for atoms known to be distinct; weights are
    /// renormalized but not merged.
    pub(crate) fn from_distinct(d: usize, horizon: usize, paths: Vec<S>, mut weights: Vec<S>) -> Result<Self> {
        Self::check_shape(d, horizon, &paths, &weights)?;
        let total: S = weights.iter().copied().sum();
        if !(total > S::zero()) {
            return Err(Error::Weights(format!("total mass {total} is not positive")));
        }
        weights.iter_mut().for_each(|w| *w = *w / total);
        Ok(PathMeasure {
            d,
            horizon,
            paths,
            weights,
        })
    }

    pub fn dirac(d: usize, horizon: usize, path: Vec<S>) -> Result<Self> {
        Self::new(d, horizon, vec![(path, S::one())])
    }

    fn check_shape(d: usize, horizon: usize, paths: &[S], weights: &[S]) -> Result<()> {
        if d == 0 || horizon == 0 {
            return Err(Error::Dimension(format!(
                "d = {d} and T = {horizon} must both be positive"
            )));
        }
        if weights.is_empty() {
            return Err(Error::Weights("measure has no atoms".into()));
        }
        if paths.len() != weights.len() * d * horizon {
            return Err(Error::Dimension(format!(
                "{} coordinates for {} atoms of length T*d = {}",
                paths.len(),
                weights.len(),
                d * horizon
            )));
        }
        if let Some(i) = paths.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                what: format!("coordinate in atom {}", i / (d * horizon)),
            });
        }
        Ok(())
    }

    fn merged(d: usize, horizon: usize, paths: Vec<S>, weights: Vec<S>) -> Self {
        let stride = d * horizon;
        let mut index: HashMap<Vec<u64>, usize> = HashMap::with_capacity(weights.len());
        let mut out_p = Vec::with_capacity(paths.len());
        let mut out_w: Vec<S> = Vec::with_capacity(weights.len());
        for (i, &w) in weights.iter().enumerate() {
            let p = &paths[i * stride..(i + 1) * stride];
            let key: Vec<u64> = p.iter().map(|x| x.key()).collect();
            match index.get(&key) {
                Some(&j) => out_w[j] = out_w[j] + w,
                None => {
                    index.insert(key, out_w.len());
                    out_p.extend(p.iter().map(|&x| if x == S::zero() { S::zero() } else { x }));
                    out_w.push(w);
                }
            }
        }
        PathMeasure {
            d,
            horizon,
            paths: out_p,
            weights: out_w,
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Number of distinct atoms.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn path(&self, i: usize) -> &[S] {
        let s = self.d * self.horizon;
        &self.paths[i * s..(i + 1) * s]
    }

    /// State of atom `i` at time `t` (0-based).
    pub fn step(&self, i: usize, t: usize) -> &[S] {
        let s = self.d * self.horizon;
        &self.paths[i * s + t * self.d..i * s + (t + 1) * self.d]
    }

    pub fn weight(&self, i: usize) -> S {
        self.weights[i]
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn paths_flat(&self) -> &[S] {
        &self.paths
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[S], S)> + '_ {
        self.paths
            .chunks_exact(self.d * self.horizon)
            .zip(self.weights.iter().copied())
    }

    /// Applies `f` to every path and merges atoms that collide.
    pub fn map_paths(&self, mut f: impl FnMut(&[S]) -> Vec<S>) -> Result<Self> {
        let mut paths = Vec::with_capacity(self.paths.len());
        for p in self.paths.chunks_exact(self.d * self.horizon) {
            let q = f(p);
            if q.len() != p.len() {
                return Err(Error::Dimension("path map changed the path length".into()));
            }
            paths.extend(q);
        }
        Self::check_shape(self.d, self.horizon, &paths, &self.weights)?;
        Ok(Self::merged(self.d, self.horizon, paths, self.weights.clone()))
    }

    /// Rigid translation by `shift`, a vector of length `T*d`.
    pub fn translate(&self, shift: &[S]) -> Result<Self> {
        if shift.len() != self.d * self.horizon {
            return Err(Error::Dimension(format!(
                "shift has {} entries, expected {}",
                shift.len(),
                self.d * self.horizon
            )));
        }
        self.map_paths(|p| p.iter().zip(shift).map(|(&x, &s)| x + s).collect())
    }

    pub fn cast<R: Scalar>(&self) -> PathMeasure<R> {
        PathMeasure {
            d: self.d,
            horizon: self.horizon,
            paths: self.paths.iter().map(|&x| R::of(x.f64())).collect(),
            weights: self.weights.iter().map(|&x| R::of(x.f64())).collect(),
        }
    }

    pub(crate) fn same_shape(&self, other: &Self) -> Result<()> {
        if self.d != other.d || self.horizon != other.horizon {
            return Err(Error::Dimension(format!(
                "measures differ in shape: (d, T) = ({}, {}) vs ({}, {})",
                self.d, self.horizon, other.d, other.horizon
            )));
        }
        Ok(())
    }
}
