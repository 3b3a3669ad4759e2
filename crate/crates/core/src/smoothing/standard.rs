//! Closed forms and one-dimensional quadratures for the two-path example
//! `μ = ½δ(0,1) + ½δ(0,-1)`, `μ_ε = ½δ(ε,1) + ½δ(-ε,-1)` under Gaussian noise.

use super::special::{norm_cdf, norm_pdf, norm_sf, quad};
use crate::error::{Error, Result};

/// `W_p(μ, μ_ε) = ε` for every `p`.
pub fn standard_w(eps: f64) -> f64 {
    eps.abs()
}

/// `AW_p(μ, μ_ε) = (ε^p + 2^{p-1})^{1/p}` for `ε > 0`, zero at `ε = 0`.
pub fn standard_aw(eps: f64, p: f64) -> f64 {
    if eps == 0.0 {
        return 0.0;
    }
    (eps.abs().powf(p) + 2f64.powf(p - 1.0)).powf(1.0 / p)
}

/// Limit of `AW_p^{(σ)}(μ, μ_ε)` as `ε/σ → ∞` and `σ → 0`.
pub fn standard_smooth_limit(p: f64) -> f64 {
    2f64.powf((p - 1.0) / p)
}

/// Equal-variance Gaussian mixture on the line.
#[derive(Debug, Clone)]
pub struct Mixture1d {
    pub comps: Vec<(f64, f64)>,
    pub sigma: f64,
}

impl Mixture1d {
    pub fn new(comps: Vec<(f64, f64)>, sigma: f64) -> Self {
        Mixture1d { comps, sigma }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.comps.iter().map(|&(w, m)| w * norm_cdf((x - m) / self.sigma)).sum()
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.comps.iter().map(|&(w, m)| w * norm_sf((x - m) / self.sigma)).sum()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.comps.iter().map(|&(w, m)| w * norm_pdf((x - m) / self.sigma)).sum::<f64>() / self.sigma
    }

    fn span(&self) -> (f64, f64) {
        let lo = self.comps.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        let hi = self.comps.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
        (lo - 40.0 * self.sigma, hi + 40.0 * self.sigma)
    }

    /// Inverse CDF. `upper` selects whether `u` is a lower- or an upper-tail
    /// probability, so that both tails keep full precision.
    pub fn quantile_tail(&self, u: f64, upper: bool) -> f64 {
        let (mut lo, mut hi) = self.span();
        // g increasing in x, root where g = 0
        let g = |x: f64| if upper { u - self.sf(x) } else { self.cdf(x) - u };
        let mut x = self.comps.iter().map(|&(w, m)| w * m).sum::<f64>();
        for _ in 0..200 {
            let v = g(x);
            if v == 0.0 {
                return x;
            }
            if v < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let d = self.pdf(x);
            let nx = x - v / d;
            x = if d > 0.0 && nx > lo && nx < hi { nx } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-13 * (1.0 + x.abs()) {
                break;
            }
        }
        x
    }

    pub fn quantile(&self, u: f64) -> f64 {
        if u <= 0.5 {
            self.quantile_tail(u, false)
        } else {
            self.quantile_tail(1.0 - u, true)
        }
    }
}

/// `W_p^p` between two mixtures. `p = 1` integrates `|F - G|`; other `p`
/// integrate the quantile difference, cut where either quantile crosses a gap
/// between components, with upper pieces integrated in `1 - u`.
pub fn mixture_w_pp(f: &Mixture1d, g: &Mixture1d, p: f64) -> Result<f64> {
    if p == 1.0 {
        let sigma = f.sigma.min(g.sigma);
        let mut edges: Vec<f64> = f
            .comps
            .iter()
            .chain(&g.comps)
            .flat_map(|c| [-8.0, -3.0, 0.0, 3.0, 8.0].map(|k| c.1 + k * sigma))
            .collect();
        let (a0, a1) = f.span();
        let (b0, b1) = g.span();
        edges.extend([a0.min(b0), a1.max(b1)]);
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let mid = 0.5 * (edges[0] + edges[edges.len() - 1]);
        let diff = |x: f64| {
            if x <= mid {
                f.cdf(x) - g.cdf(x)
            } else {
                g.sf(x) - f.sf(x)
            }
        };
        // |F - G| has kinks where the CDFs cross; cut there
        let mut cuts = Vec::with_capacity(edges.len());
        for w in edges.windows(2) {
            cuts.push(w[0]);
            let k = 32;
            let step = (w[1] - w[0]) / k as f64;
            let mut prev = diff(w[0]);
            for j in 1..=k {
                let x = if j == k { w[1] } else { w[0] + j as f64 * step };
                let cur = diff(x);
                if cur == 0.0 && j < k {
                    cuts.push(x);
                } else if prev * cur < 0.0 {
                    let (mut lo, mut hi) = (x - step, x);
                    for _ in 0..100 {
                        let m = 0.5 * (lo + hi);
                        if (diff(m) < 0.0) == (prev < 0.0) {
                            lo = m;
                        } else {
                            hi = m;
                        }
                    }
                    cuts.push(0.5 * (lo + hi));
                }
                prev = cur;
            }
        }
        cuts.push(edges[edges.len() - 1]);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            total += quad(|x| diff(x).abs(), w[0], w[1], 1e-11)?;
        }
        return Ok(total);
    }
    // cut points as (lower-tail u, upper-tail 1-u)
    let mut cuts: Vec<(f64, f64)> = vec![(0.5, 0.5)];
    for m in [f, g] {
        let mut means: Vec<f64> = m.comps.iter().map(|c| c.1).collect();
        means.sort_by(f64::total_cmp);
        for w in means.windows(2) {
            let c = 0.5 * (w[0] + w[1]);
            cuts.push((m.cdf(c), m.sf(c)));
        }
    }
    let mut lower: Vec<f64> = cuts.iter().filter(|c| c.0 <= 0.5).map(|c| c.0).collect();
    let mut upper: Vec<f64> = cuts.iter().filter(|c| c.0 >= 0.5).map(|c| c.1).collect();
    lower.push(0.0);
    upper.push(0.0);
    lower.sort_by(f64::total_cmp);
    upper.sort_by(f64::total_cmp);
    lower.dedup();
    upper.dedup();
    let h = |u: f64, up: bool| (f.quantile_tail(u, up) - g.quantile_tail(u, up)).abs().powf(p);
    let mut total = 0.0;
    for (edges, up) in [(&lower, false), (&upper, true)] {
        for w in edges.windows(2) {
            total += quad(|u| h(u, up), w[0], w[1], 1e-8)?;
        }
    }
    Ok(total)
}

/// `AW_p(μ*ξ_σ, μ_ε*ξ_σ)` for the standard example with Gaussian noise,
/// from the first-marginal transport plus the averaged kernel cost.
pub fn standard_smooth_aw(eps: f64, sigma: f64, p: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::param("sigma", sigma, "must be positive"));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::param("p", p, "must be at least 1"));
    }
    let eps = eps.abs();
    if eps == 0.0 {
        return Ok(0.0);
    }
    let first = mixture_w_pp(
        &Mixture1d::new(vec![(1.0, 0.0)], sigma),
        &Mixture1d::new(vec![(0.5, eps), (0.5, -eps)], sigma),
        p,
    )?;
    let kernel = Mixture1d::new(vec![(0.5, 1.0), (0.5, -1.0)], sigma);
    // kernel of μ_ε*ξ_σ at first coordinate y puts weight a(y) on the +1 branch
    let a = |y: f64| 1.0 / (1.0 + (-2.0 * eps * y / (sigma * sigma)).exp());
    let failed = std::cell::Cell::new(None);
    let inner = |y: f64| -> f64 {
        let ay = a(y);
        if p == 1.0 {
            return 2.0 * (ay - 0.5).abs();
        }
        mixture_w_pp(&kernel, &Mixture1d::new(vec![(ay, 1.0), (1.0 - ay, -1.0)], sigma), p).unwrap_or_else(|e| {
            failed.set(Some(e));
            0.0
        })
    };
    // the inner cost is even in y, so average over the +ε component only
    let outer = |z: f64| norm_pdf(z) * inner(eps + sigma * z);
    let split = -eps / sigma;
    let tol = if p == 1.0 { 1e-12 } else { 1e-6 };
    let mut edges = vec![-40.0, -8.0, -3.0, 0.0, 3.0, 8.0, 40.0];
    if split > -40.0 {
        edges.push(split);
    }
    edges.sort_by(f64::total_cmp);
    let mut second = 0.0;
    for w in edges.windows(2) {
        second += quad(outer, w[0], w[1], tol)?;
    }
    if let Some(e) = failed.take() {
        return Err(e);
    }
    Ok((first + second).powf(1.0 / p))
}
