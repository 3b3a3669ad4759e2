//! Flat LP over the bicausal polytope. Causality in both directions is a set
//! of linear equalities once the marginals are fixed, so any path-pair cost
//! can be minimized directly. Intended as a test oracle for small instances.

use super::coupling::ancestors;
use crate::error::{Error, Result};
use crate::measure::{DisintegrationTree, PathMeasure};
use crate::ot::lp::{Lp, Rel};
use crate::ot::CostMatrix;
use crate::scalar::Scalar;

/// Largest number of path pairs the oracle accepts.
pub const ORACLE_MAX_PAIRS: usize = 144;

pub fn bicausal_lp_oracle<S: Scalar>(mu: &PathMeasure<S>, nu: &PathMeasure<S>, cost: &CostMatrix<S>) -> Result<S> {
    mu.same_shape(nu)?;
    let (nl, nr) = (mu.len(), nu.len());
    if nl * nr > ORACLE_MAX_PAIRS {
        return Err(Error::TooLarge(format!(
            "bicausal oracle refuses {nl}x{nr} = {} path pairs (cap {ORACLE_MAX_PAIRS})",
            nl * nr
        )));
    }
    if cost.rows() != nl || cost.cols() != nr {
        return Err(Error::Dimension(format!(
            "cost is {}x{}, measures have {nl} and {nr} atoms",
            cost.rows(),
            cost.cols()
        )));
    }
    let var = |i: usize, j: usize| i * nr + j;
    let mut lp = Lp::new(nl * nr);
    for k in 0..nl * nr {
        lp.obj[k] = cost.as_slice()[k].f64();
    }
    for i in 0..nl {
        lp.row((0..nr).map(|j| (var(i, j), 1.0)).collect(), Rel::Eq, mu.weight(i).f64());
    }
    for j in 0..nr {
        lp.row((0..nl).map(|i| (var(i, j), 1.0)).collect(), Rel::Eq, nu.weight(j).f64());
    }
    let lt = DisintegrationTree::build(mu);
    let rt = DisintegrationTree::build(nu);
    let la = ancestors(&lt, nl);
    let ra = ancestors(&rt, nr);
    for t in 1..mu.horizon() {
        // π(x, Y_{1:t} = b) = μ(x | x_{1:t}) π(X_{1:t} = x_{1:t}, Y_{1:t} = b)
        for i in 0..nl {
            let a = la[t][i];
            let ratio = mu.weight(i).f64() / lt.node(a).mass.f64();
            for &b in rt.level(t) {
                let mut row = Vec::new();
                for j in (0..nr).filter(|&j| ra[t][j] == b) {
                    for i2 in (0..nl).filter(|&i2| la[t][i2] == a) {
                        let own = if i2 == i { 1.0 } else { 0.0 };
                        row.push((var(i2, j), own - ratio));
                    }
                }
                lp.row(row, Rel::Eq, 0.0);
            }
        }
        for j in 0..nr {
            let b = ra[t][j];
            let ratio = nu.weight(j).f64() / rt.node(b).mass.f64();
            for &a in lt.level(t) {
                let mut row = Vec::new();
                for i in (0..nl).filter(|&i| la[t][i] == a) {
                    for j2 in (0..nr).filter(|&j2| ra[t][j2] == b) {
                        let own = if j2 == j { 1.0 } else { 0.0 };
                        row.push((var(i, j2), own - ratio));
                    }
                }
                lp.row(row, Rel::Eq, 0.0);
            }
        }
    }
    Ok(S::of(lp.solve()?.value.max(0.0)))
}

/// Per-pair adapted cost `Σ_t |x_t - y_t|^p` for use with the oracle.
pub fn adapted_cost_matrix<S: Scalar>(mu: &PathMeasure<S>, nu: &PathMeasure<S>, p: S) -> Result<CostMatrix<S>> {
    mu.same_shape(nu)?;
    CostMatrix::from_fn(mu.len(), nu.len(), |i, j| {
        (0..mu.horizon())
            .map(|t| crate::scalar::dist_p(mu.step(i, t), nu.step(j, t), p))
            .sum()
    })
}

/// `1{x != y}` per path pair.
pub fn mismatch_cost_matrix<S: Scalar>(mu: &PathMeasure<S>, nu: &PathMeasure<S>) -> Result<CostMatrix<S>> {
    mu.same_shape(nu)?;
    CostMatrix::from_fn(mu.len(), nu.len(), |i, j| {
        let same = mu.path(i).iter().zip(nu.path(j)).all(|(a, b)| a.key() == b.key());
        if same {
            S::zero()
        } else {
            S::one()
        }
    })
}
