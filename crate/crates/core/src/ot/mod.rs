//! Exact discrete optimal transport.

pub mod lp;
mod network;
mod onedim;
mod plan;

pub(crate) use onedim::{argsort, cost_1d, cost_1d_sorted, plan_1d};
pub use plan::{CostMatrix, TransportPlan};

use crate::error::{Error, Result};
use crate::scalar::{dist_p, root, Scalar};
use lp::{Lp, Rel};

/// Probability vector on points of `R^dim`, coordinates stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPoints<S = f64> {
    dim: usize,
    coords: Vec<S>,
    weights: Vec<S>,
}

impl<S: Scalar> WeightedPoints<S> {
    pub fn new(dim: usize, coords: Vec<S>, weights: Vec<S>) -> Result<Self> {
        if dim == 0 || coords.len() != dim * weights.len() || weights.is_empty() {
            return Err(Error::Dimension(format!(
                "{} coordinates for {} points of dimension {dim}",
                coords.len(),
                weights.len()
            )));
        }
        check_probability(&weights)?;
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                what: "point coordinate".into(),
            });
        }
        Ok(WeightedPoints {
            dim,
            coords,
            weights,
        })
    }

    /// One-dimensional points.
    pub fn line(points: Vec<S>, weights: Vec<S>) -> Result<Self> {
        Self::new(1, points, weights)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[S] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }
}

pub(crate) fn check_probability<S: Scalar>(w: &[S]) -> Result<()> {
    if let Some(i) = w.iter().position(|x| !x.is_finite() || *x <= S::zero()) {
        return Err(Error::NonPositiveWeight {
            index: i,
            weight: w[i].f64(),
        });
    }
    let sum: f64 = w.iter().map(|x| x.f64()).sum();
    if (sum - 1.0).abs() > S::TOL {
        return Err(Error::WeightSum {
            sum,
            deficit: 1.0 - sum,
        });
    }
    Ok(())
}

fn check_p<S: Scalar>(p: S) -> Result<()> {
    if !(p >= S::one()) || !p.is_finite() {
        return Err(Error::param("p", p, "must be a finite real >= 1"));
    }
    Ok(())
}

/// Optimal plan for an arbitrary finite ground cost. Weights must be
/// probability vectors.
pub fn transport<S: Scalar>(a: &[S], b: &[S], cost: &CostMatrix<S>) -> Result<TransportPlan<S>> {
    if cost.rows() != a.len() || cost.cols() != b.len() {
        return Err(Error::Dimension(format!(
            "cost is {}x{} but weights have lengths {} and {}",
            cost.rows(),
            cost.cols(),
            a.len(),
            b.len()
        )));
    }
    check_probability(a)?;
    check_probability(b)?;
    network::solve(a, b, cost.as_slice())
}

/// Solver entry without validation, for internal callers that already hold
/// consistent data.
pub(crate) fn transport_raw<S: Scalar>(a: &[S], b: &[S], cost: &[S]) -> Result<TransportPlan<S>> {
    network::solve(a, b, cost)
}

pub(crate) fn euclidean_cost<S: Scalar>(dim: usize, xa: &[S], xb: &[S], p: S) -> Vec<S> {
    let nb = xb.len() / dim;
    let mut c = Vec::with_capacity(xa.len() / dim * nb);
    for x in xa.chunks_exact(dim) {
        for y in xb.chunks_exact(dim) {
            c.push(dist_p(x, y, p));
        }
    }
    c
}

/// `W_p^p` without building a plan, choosing the 1-D path where possible.
pub(crate) fn wasserstein_pow<S: Scalar>(dim: usize, xa: &[S], wa: &[S], xb: &[S], wb: &[S], p: S) -> Result<S> {
    if dim == 1 {
        return Ok(cost_1d(xa, wa, xb, wb, p));
    }
    let c = euclidean_cost(dim, xa, xb, p);
    Ok(network::solve(wa, wb, &c)?.objective)
}

/// `W_p` with Euclidean ground cost, solved by network simplex.
pub fn wasserstein_p<S: Scalar>(
    mu: &WeightedPoints<S>,
    nu: &WeightedPoints<S>,
    p: S,
) -> Result<(S, TransportPlan<S>)> {
    check_p(p)?;
    if mu.dim != nu.dim {
        return Err(Error::Dimension(format!(
            "point dimensions differ: {} vs {}",
            mu.dim, nu.dim
        )));
    }
    let c = euclidean_cost(mu.dim, &mu.coords, &nu.coords, p);
    let plan = network::solve(&mu.weights, &nu.weights, &c)?;
    Ok((root(plan.objective, p), plan))
}

/// `W_p` on the line through the monotone coupling.
pub fn wasserstein_1d<S: Scalar>(mu: &WeightedPoints<S>, nu: &WeightedPoints<S>, p: S) -> Result<S> {
    check_p(p)?;
    if mu.dim != 1 || nu.dim != 1 {
        return Err(Error::Dimension("wasserstein_1d needs one-dimensional points".into()));
    }
    Ok(root(cost_1d(&mu.coords, &mu.weights, &nu.coords, &nu.weights, p), p))
}

/// Monotone plan on the line.
pub fn monotone_plan<S: Scalar>(mu: &WeightedPoints<S>, nu: &WeightedPoints<S>, p: S) -> Result<TransportPlan<S>> {
    check_p(p)?;
    if mu.dim != 1 || nu.dim != 1 {
        return Err(Error::Dimension("monotone plan needs one-dimensional points".into()));
    }
    Ok(plan_1d(&mu.coords, &mu.weights, &nu.coords, &nu.weights, p))
}

/// `max Σ π_ij gain_ij` over couplings of `a` and `b` with `Σ π_ij cost_ij <= budget`.
pub fn constrained_max_ot<S: Scalar>(
    a: &[S],
    b: &[S],
    gain: &CostMatrix<S>,
    cost: &CostMatrix<S>,
    budget: S,
) -> Result<(S, TransportPlan<S>)> {
    let (m, n) = (a.len(), b.len());
    for (name, c) in [("gain", gain), ("cost", cost)] {
        if c.rows() != m || c.cols() != n {
            return Err(Error::Dimension(format!(
                "{name} matrix is {}x{}, weights have lengths {m} and {n}",
                c.rows(),
                c.cols()
            )));
        }
    }
    check_probability(a)?;
    check_probability(b)?;
    if !(budget >= S::zero()) {
        return Err(Error::param("budget", budget, "must be nonnegative"));
    }
    let mut lp = Lp::new(m * n);
    for k in 0..m * n {
        lp.obj[k] = -gain.as_slice()[k].f64();
    }
    for i in 0..m {
        lp.row((0..n).map(|j| (i * n + j, 1.0)).collect(), Rel::Eq, a[i].f64());
    }
    for j in 0..n {
        lp.row((0..m).map(|i| (i * n + j, 1.0)).collect(), Rel::Eq, b[j].f64());
    }
    let budget_f = budget.f64();
    if budget_f.is_finite() {
        lp.row(
            (0..m * n).map(|k| (k, cost.as_slice()[k].f64())).collect(),
            Rel::Le,
            budget_f,
        );
    }
    let sol = lp.solve()?;
    let mut entries = Vec::new();
    let mut objective = S::zero();
    for (k, &x) in sol.x.iter().enumerate() {
        if x > 0.0 {
            let v = S::of(x);
            entries.push((k / n, k % n, v));
            objective = objective + v * gain.as_slice()[k];
        }
    }
    Ok((S::of(-sol.value).max(S::zero()), TransportPlan { entries, objective }))
}
