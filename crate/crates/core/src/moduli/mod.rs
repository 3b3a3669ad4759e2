//! Modulus of continuity of the kernels of a path measure.
//!
//! `ω^{t,p}(δ)` recouples the prefix marginal at time `t` with itself under a
//! transport budget `δ^p` and maximizes the average `W_p^p` between the
//! kernels that get paired. The budget constraint is closed (`<=`).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{DisintegrationTree, PathMeasure};
use crate::ot::{constrained_max_ot, wasserstein_pow, CostMatrix};
use crate::scalar::{dist_p, powp, root, Scalar};

struct Level<S> {
    weights: Vec<S>,
    cost: CostMatrix<S>,
    gain: CostMatrix<S>,
    gain_bar: CostMatrix<S>,
}

/// Kernel distances of one measure, precomputed for every `t`.
pub struct ModulusContext<S = f64> {
    tree: DisintegrationTree<S>,
    p: S,
    levels: Vec<Level<S>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModulusSample {
    pub delta: f64,
    pub value: f64,
    /// The budget sits where the value function changes slope.
    pub breakpoint: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModulusCurve {
    pub t: usize,
    pub p: f64,
    pub samples: Vec<ModulusSample>,
}

impl<S: Scalar> ModulusContext<S> {
    pub fn new(mu: &PathMeasure<S>, p: S) -> Result<Self> {
        if !(p >= S::one()) || !p.is_finite() {
            return Err(Error::param("p", p, "must be a finite real >= 1"));
        }
        let tree = DisintegrationTree::build(mu);
        let d = tree.dim();
        let mut levels = Vec::new();
        for t in 1..tree.horizon() {
            let ids = tree.level(t).to_vec();
            let k = ids.len();
            let weights: Vec<S> = ids.iter().map(|&i| tree.node(i).mass).collect();
            let prefixes: Vec<Vec<S>> = ids.iter().map(|&i| tree.prefix(i)).collect();
            let kernels: Vec<(Vec<S>, Vec<S>)> = ids.iter().map(|&i| tree.kernel(i)).collect();
            let futures: Vec<(Vec<S>, Vec<S>)> = ids.iter().map(|&i| tree.future(i)).collect();
            let fdim = d * (tree.horizon() - t);
            let mut cost = vec![S::zero(); k * k];
            let mut gain = vec![S::zero(); k * k];
            let mut gain_bar = vec![S::zero(); k * k];
            for i in 0..k {
                for j in i + 1..k {
                    let c = dist_p(&prefixes[i], &prefixes[j], p);
                    let g = wasserstein_pow(d, &kernels[i].0, &kernels[i].1, &kernels[j].0, &kernels[j].1, p)?;
                    let gb = if t + 1 == tree.horizon() {
                        g
                    } else {
                        wasserstein_pow(fdim, &futures[i].0, &futures[i].1, &futures[j].0, &futures[j].1, p)?
                    };
                    for (m, v) in [(&mut cost, c), (&mut gain, g), (&mut gain_bar, gb)] {
                        m[i * k + j] = v;
                        m[j * k + i] = v;
                    }
                }
            }
            levels.push(Level {
                weights,
                cost: CostMatrix::new(k, k, cost)?,
                gain: CostMatrix::new(k, k, gain)?,
                gain_bar: CostMatrix::new(k, k, gain_bar)?,
            });
        }
        Ok(ModulusContext { tree, p, levels })
    }

    pub fn horizon(&self) -> usize {
        self.tree.horizon()
    }

    fn level(&self, t: usize) -> Result<&Level<S>> {
        if t == 0 || t >= self.tree.horizon() {
            return Err(Error::TimeOutOfRange {
                t,
                max: self.tree.horizon().saturating_sub(1),
            });
        }
        Ok(&self.levels[t - 1])
    }

    fn budgeted(&self, t: usize, delta: S, bar: bool) -> Result<S> {
        if !(delta >= S::zero()) {
            return Err(Error::param("delta", delta, "must be nonnegative"));
        }
        let lv = self.level(t)?;
        let gain = if bar { &lv.gain_bar } else { &lv.gain };
        let budget = if delta.is_infinite() { delta } else { powp(delta, self.p) };
        let (v, _) = constrained_max_ot(&lv.weights, &lv.weights, gain, &lv.cost, budget)?;
        Ok(root(v, self.p))
    }

    /// `ω^{t,p}(δ)`.
    pub fn omega(&self, t: usize, delta: S) -> Result<S> {
        self.budgeted(t, delta, false)
    }

    /// `ω̄^{t,p}(δ)`: the same LP with full-future conditional laws.
    pub fn omega_bar(&self, t: usize, delta: S) -> Result<S> {
        self.budgeted(t, delta, true)
    }

    /// `g^s = ω^s(δ + Σ_{ℓ=t}^{s-1} g^ℓ)` for `s = t..T-1`.
    pub fn g_recursion(&self, t: usize, delta: S) -> Result<Vec<S>> {
        self.level(t)?;
        let mut g: Vec<S> = Vec::new();
        for s in t..self.tree.horizon() {
            let arg = delta + g.iter().copied().sum::<S>();
            g.push(self.omega(s, arg)?);
        }
        Ok(g)
    }

    /// `h^0 = σ`, `h^t = ω^t(Σ_{s<t} h^s)` for `t = 1..T-1`.
    pub fn h_iteration(&self, sigma: S) -> Result<Vec<S>> {
        if !(sigma > S::zero()) {
            return Err(Error::param("sigma", sigma, "must be positive"));
        }
        let mut h = vec![sigma];
        for t in 1..self.tree.horizon() {
            let arg = h.iter().copied().sum::<S>();
            h.push(self.omega(t, arg)?);
        }
        Ok(h)
    }

    /// Samples `ω^{t,p}` on `deltas`, flagging budgets at slope changes of
    /// the LP value.
    pub fn curve(&self, t: usize, deltas: &[S]) -> Result<ModulusCurve> {
        let lv = self.level(t)?;
        let lp_value = |b: S| -> Result<f64> {
            Ok(constrained_max_ot(&lv.weights, &lv.weights, &lv.gain, &lv.cost, b.max(S::zero()))?.0.f64())
        };
        let mut samples = Vec::with_capacity(deltas.len());
        for &delta in deltas {
            let value = self.omega(t, delta)?.f64();
            let b = powp(delta, self.p).f64();
            let eta = 1e-6 * b.max(1e-9);
            let (lo, mid, hi) = (lp_value(S::of(b - eta))?, lp_value(S::of(b))?, lp_value(S::of(b + eta))?);
            let (sl, sr) = ((mid - lo) / eta, (hi - mid) / eta);
            let breakpoint = b > 0.0 && (sl - sr).abs() > 1e-4 * (1.0 + sl.abs());
            samples.push(ModulusSample {
                delta: delta.f64(),
                value,
                breakpoint,
            });
        }
        Ok(ModulusCurve {
            t,
            p: self.p.f64(),
            samples,
        })
    }

    /// Smallest `L` with `W_p(μ_x, μ_y) <= L |x - y|^α` over all prefix pairs.
    pub fn holder_constant(&self, alpha: S) -> S {
        let mut best = S::zero();
        for lv in &self.levels {
            let k = lv.weights.len();
            for i in 0..k {
                for j in i + 1..k {
                    let g = root(lv.gain.get(i, j), self.p);
                    let dist = root(lv.cost.get(i, j), self.p);
                    if dist == S::zero() {
                        if g > S::zero() {
                            return S::infinity();
                        }
                        continue;
                    }
                    best = best.max(g / dist.powf(alpha));
                }
            }
        }
        best
    }
}

pub fn modulus_omega<S: Scalar>(mu: &PathMeasure<S>, t: usize, p: S, delta: S) -> Result<S> {
    ModulusContext::new(mu, p)?.omega(t, delta)
}

pub fn extended_modulus_omega_bar<S: Scalar>(mu: &PathMeasure<S>, t: usize, p: S, delta: S) -> Result<S> {
    ModulusContext::new(mu, p)?.omega_bar(t, delta)
}

pub fn g_recursion<S: Scalar>(mu: &PathMeasure<S>, t: usize, p: S, delta: S) -> Result<Vec<S>> {
    ModulusContext::new(mu, p)?.g_recursion(t, delta)
}

pub fn h_iteration<S: Scalar>(mu: &PathMeasure<S>, p: S, sigma: S) -> Result<Vec<S>> {
    ModulusContext::new(mu, p)?.h_iteration(sigma)
}

pub fn holder_constant<S: Scalar>(mu: &PathMeasure<S>, p: S, alpha: S) -> Result<S> {
    Ok(ModulusContext::new(mu, p)?.holder_constant(alpha))
}

/// `(δ/ε) ∧ 2`, the modulus of the two-branch example at `t = 1`.
pub fn modulus_standard_example(eps: f64, delta: f64) -> f64 {
    (delta / eps).min(2.0)
}
