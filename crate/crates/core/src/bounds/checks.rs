use serde_json::{json, Value};

use super::report::BoundReport;
use crate::adapted::{av, aw_p_value};
use crate::error::{Error, Result};
use crate::measure::{to_json_value, tv_distance, PathMeasure};
use crate::moduli::ModulusContext;
use crate::ot::wasserstein_pow;
use crate::scalar::dist_p;
use crate::smoothing::standard::{mixture_w_pp, Mixture1d};
use crate::smoothing::{convolve_quantized, tv_smoothed, NoiseKind, NoiseModel, Scheme, SmoothedApprox};

fn pair(mu: &PathMeasure, nu: &PathMeasure, params: Value) -> Value {
    json!({ "mu": to_json_value(mu), "nu": to_json_value(nu), "params": params })
}

/// `W_1` on the flattened path space `R^{dT}`.
pub fn w1_flat(mu: &PathMeasure, nu: &PathMeasure) -> Result<f64> {
    mu.same_shape(nu)?;
    let n = mu.dim() * mu.horizon();
    wasserstein_pow(n, mu.paths_flat(), mu.weights(), nu.paths_flat(), nu.weights(), 1.0)
}

/// `6^{p-1} T 2^T`.
fn awtv_const(p: f64, horizon: usize) -> f64 {
    6f64.powf(p - 1.0) * horizon as f64 * 2f64.powi(horizon as i32)
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::param("p", p, "must be at least 1"));
    }
    Ok(())
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::param("R", r, "must be positive"));
    }
    Ok(())
}

/// `AW_p^p <= 6^{p-1}T2^T (R^p TV + tail_p(μ,R) + tail_p(ν,R))`.
pub fn check_awtv(mu: &PathMeasure, nu: &PathMeasure, p: f64, r: f64) -> Result<BoundReport> {
    check_p(p)?;
    check_r(r)?;
    let lhs = aw_p_value(mu, nu, p)?.powf(p);
    let tv = tv_distance(mu, nu)?;
    let rhs = awtv_const(p, mu.horizon()) * (r.powf(p) * tv + mu.tail_p(p, r) + nu.tail_p(p, r));
    Ok(BoundReport::new("awtv", pair(mu, nu, json!({ "p": p, "R": r })), lhs, rhs, 0.0).with("tv", tv))
}

/// Smoothed `AW_p` between grid approximations with the amount by which the
/// exact `p`-th power may sit below the grid value.
struct SmoothAw {
    a: SmoothedApprox,
    b: SmoothedApprox,
    value: f64,
    budget: f64,
}

impl SmoothAw {
    fn new(mu: &PathMeasure, nu: &PathMeasure, noise: &NoiseModel, scheme: &Scheme, p: f64) -> Result<Self> {
        mu.same_shape(nu)?;
        let a = convolve_quantized(mu, noise, scheme)?;
        let b = convolve_quantized(nu, noise, scheme)?;
        let value = aw_p_value(&a.approx, &b.approx, p)?;
        let budget = a.aw_budget_p(p) + b.aw_budget_p(p);
        Ok(SmoothAw { a, b, value, budget })
    }

    fn lhs(&self, p: f64) -> (f64, f64) {
        let v = self.value.powf(p);
        (v, v - (self.value - self.budget).max(0.0).powf(p))
    }
}

fn smooth_params(p: f64, noise: &NoiseModel, scheme: &Scheme, more: Value) -> Value {
    let mut v = json!({ "p": p, "noise": noise, "scheme": scheme });
    if let (Value::Object(m), Value::Object(extra)) = (&mut v, more) {
        m.extend(extra);
    }
    v
}

/// `AW_p^{(σ)}(μ,ν)^p <= 6^{p-1}T2^T (R^p ‖∇f‖ W_1/σ + tails of μ^σ, ν^σ)`.
/// The smoothed tails enter through certified lower bounds.
pub fn check_awsigma_w1(
    mu: &PathMeasure,
    nu: &PathMeasure,
    p: f64,
    r: f64,
    noise: &NoiseModel,
    scheme: &Scheme,
) -> Result<BoundReport> {
    check_p(p)?;
    check_r(r)?;
    let s = SmoothAw::new(mu, nu, noise, scheme, p)?;
    let (lhs, budget) = s.lhs(p);
    let w1 = w1_flat(mu, nu)?;
    let tails = s.a.tail_lower(p, r) + s.b.tail_lower(p, r);
    let rhs = awtv_const(p, mu.horizon()) * (r.powf(p) * noise.grad_l1() * w1 / noise.sigma + tails);
    let inst = pair(mu, nu, smooth_params(p, noise, scheme, json!({ "R": r })));
    Ok(BoundReport::new("awsigma_w1", inst, lhs, rhs, budget).with("w1", w1))
}

/// Which moment form of the smoothed bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum MomentVariant {
    /// Finite `q`-th moments.
    Moment { q: f64 },
    /// Bounded supports of `μ`, `ν` and the noise.
    Compact,
    /// Gaussian noise, comparing against `W_1^{(σ0)}`.
    Gaussian { q: f64, sigma0: f64 },
}

/// Lower bound on `M_q(μ^σ) + M_q(ν^σ)`: exact for `q = 2`.
fn smoothed_moment_lower(s: &SmoothAw, noise: &NoiseModel, q: f64) -> f64 {
    if q == 2.0 {
        let add = noise.sigma.powi(2) * noise.moment_p(2.0);
        s.a.base.moment_p(2.0) + s.b.base.moment_p(2.0) + 2.0 * add
    } else {
        s.a.moment_lower(q) + s.b.moment_lower(q)
    }
}

/// Largest Euclidean distance between two support points of `μ` and `ν`.
pub fn support_diameter(mu: &PathMeasure, nu: &PathMeasure) -> f64 {
    let pts: Vec<&[f64]> = mu.atoms().chain(nu.atoms()).map(|(x, _)| x).collect();
    let mut d: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d = d.max(dist_p(pts[i], pts[j], 2.0).sqrt());
        }
    }
    d
}

/// Lower bound on `W_1(μ*N(0,σ0²I), ν*N(0,σ0²I))` from one-dimensional
/// projections, each exact for the projected Gaussian mixtures.
pub fn smoothed_w1_lower(mu: &PathMeasure, nu: &PathMeasure, sigma0: f64) -> Result<f64> {
    mu.same_shape(nu)?;
    let n = mu.dim() * mu.horizon();
    let mut dirs: Vec<Vec<f64>> = (0..n)
        .map(|c| {
            let mut e = vec![0.0; n];
            e[c] = 1.0;
            e
        })
        .collect();
    if n > 1 {
        dirs.push(vec![1.0; n]);
        dirs.push((0..n).map(|c| if c % 2 == 0 { 1.0 } else { -1.0 }).collect());
    }
    let mean = |m: &PathMeasure| {
        let mut v = vec![0.0; n];
        for (x, w) in m.atoms() {
            v.iter_mut().zip(x).for_each(|(a, b)| *a += w * b);
        }
        v
    };
    let diff: Vec<f64> = mean(mu).iter().zip(mean(nu)).map(|(a, b)| a - b).collect();
    if diff.iter().any(|&x| x != 0.0) {
        dirs.push(diff);
    }
    let mut best: f64 = 0.0;
    for u in dirs {
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let proj = |m: &PathMeasure| {
            Mixture1d::new(
                m.atoms().map(|(x, w)| (w, x.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>() / norm)).collect(),
                sigma0,
            )
        };
        best = best.max(mixture_w_pp(&proj(mu), &proj(nu), 1.0)?);
    }
    Ok(best)
}

pub fn check_moment_variant(
    mu: &PathMeasure,
    nu: &PathMeasure,
    p: f64,
    noise: &NoiseModel,
    scheme: &Scheme,
    variant: MomentVariant,
) -> Result<BoundReport> {
    check_p(p)?;
    let t = mu.horizon();
    let base = 6f64.powf(p - 1.0) * t as f64;
    let s = SmoothAw::new(mu, nu, noise, scheme, p)?;
    let (lhs, budget) = s.lhs(p);
    let w1 = w1_flat(mu, nu)?;
    let g = noise.grad_l1();
    let sigma = noise.sigma;
    let (id, rhs, extra) = match variant {
        MomentVariant::Moment { q } => {
            if !(q > p) {
                return Err(Error::param("q", q, "must exceed p"));
            }
            let m = smoothed_moment_lower(&s, noise, q);
            let rhs = base * 2f64.powi(t as i32 + 1) * m.powf(p / q) * (g * w1 / sigma).powf(1.0 - p / q);
            ("moment_q", rhs, m)
        }
        MomentVariant::Compact => {
            let dx = noise
                .support_diameter()
                .ok_or_else(|| Error::param("noise", "gaussian", "compact variant needs bounded noise"))?;
            let diam = support_diameter(mu, nu);
            let rhs = base * 2f64.powi(t as i32 + 2) * (diam + sigma * dx).powf(p) / sigma * g * w1;
            ("moment_compact", rhs, diam)
        }
        MomentVariant::Gaussian { q, sigma0 } => {
            if noise.kind != NoiseKind::Gaussian {
                return Err(Error::param("noise", "bump", "gaussian variant needs gaussian noise"));
            }
            if !(q > p) {
                return Err(Error::param("q", q, "must exceed p"));
            }
            if !(sigma0 > 0.0 && sigma0 < sigma) {
                return Err(Error::param("sigma0", sigma0, "must lie in (0, sigma)"));
            }
            let m = smoothed_moment_lower(&s, noise, q);
            let w0 = smoothed_w1_lower(mu, nu, sigma0)?;
            let rhs = base
                * 2f64.powi(t as i32 + 1)
                * g.powf(1.0 - p / q)
                * m.powf(p / q)
                * (w0 / (sigma * sigma - sigma0 * sigma0).sqrt()).powf(1.0 - p / q);
            ("moment_gaussian", rhs, w0)
        }
    };
    let inst = pair(mu, nu, smooth_params(p, noise, scheme, json!({ "variant": variant })));
    Ok(BoundReport::new(id, inst, lhs, rhs, budget).with("w1", w1).with("aux", extra))
}

/// `AW_p(μ, μ^σ) <= T(1 ∨ M_p(ξ)^{1/p}) Σ_t h^{t,p}_μ(σ)`, on distances.
pub fn check_bandwidth(mu: &PathMeasure, p: f64, noise: &NoiseModel, scheme: &Scheme) -> Result<BoundReport> {
    check_p(p)?;
    let a = convolve_quantized(mu, noise, scheme)?;
    let lhs = aw_p_value(&a.approx, mu, p)?;
    let budget = a.aw_budget_p(p);
    let h = ModulusContext::new(mu, p)?.h_iteration(noise.sigma)?;
    let hsum: f64 = h.iter().sum();
    let rhs = mu.horizon() as f64 * noise.moment_p(p).powf(1.0 / p).max(1.0) * hsum;
    let inst = json!({ "mu": to_json_value(mu), "params": smooth_params(p, noise, scheme, json!({})) });
    Ok(BoundReport::new("bandwidth", inst, lhs, rhs, budget).with("h_sum", hsum))
}

/// The four-term bound on `AW_p(μ,ν)^p` through an auxiliary smoothing.
/// Also reports `AW_p / W_1^{1/(p+1)}`, the Lipschitz-kernel power law with
/// an unknown constant.
pub fn check_main_bound(
    mu: &PathMeasure,
    nu: &PathMeasure,
    p: f64,
    r: f64,
    noise: &NoiseModel,
    scheme: &Scheme,
) -> Result<BoundReport> {
    check_p(p)?;
    check_r(r)?;
    mu.same_shape(nu)?;
    let t = mu.horizon() as f64;
    let aw = aw_p_value(mu, nu, p)?;
    let w1 = w1_flat(mu, nu)?;
    let a = convolve_quantized(mu, noise, scheme)?;
    let b = convolve_quantized(nu, noise, scheme)?;
    let tails = a.tail_lower(p, r) + b.tail_lower(p, r);
    let big = 18f64.powf(p - 1.0) * t * 2f64.powi(mu.horizon() as i32);
    let small = 3f64.powf(p - 1.0) * t.powf(p) * noise.moment_p(p).max(1.0);
    let hm: f64 = ModulusContext::new(mu, p)?.h_iteration(noise.sigma)?.iter().sum();
    let hn: f64 = ModulusContext::new(nu, p)?.h_iteration(noise.sigma)?.iter().sum();
    let rhs = big * r.powf(p) * noise.grad_l1() * w1 / noise.sigma + big * tails + small * (hm.powf(p) + hn.powf(p));
    let ratio = if w1 > 0.0 { aw / w1.powf(1.0 / (p + 1.0)) } else { 0.0 };
    let inst = pair(mu, nu, smooth_params(p, noise, scheme, json!({ "R": r })));
    Ok(BoundReport::new("main_bound", inst, aw.powf(p), rhs, 0.0)
        .with("w1", w1)
        .with("holder_ratio", ratio))
}

/// Both sides of `½TV <= AV <= ((2^T - 1)/2) TV`.
pub fn check_tv_sandwich(mu: &PathMeasure, nu: &PathMeasure) -> Result<[BoundReport; 2]> {
    let tv = tv_distance(mu, nu)?;
    let a = av(mu, nu)?;
    let c = (2f64.powi(mu.horizon() as i32) - 1.0) / 2.0;
    let inst = pair(mu, nu, json!({}));
    Ok([
        BoundReport::new("tv_av_lower", inst.clone(), 0.5 * tv, a, 0.0),
        BoundReport::new("tv_av_upper", inst, a, c * tv, 0.0),
    ])
}

/// `‖μ^σ - ν^σ‖_TV <= ‖∇f‖_{L¹} W_1(μ,ν)/σ`. The grid TV is a certified
/// lower bound, so no budget enters the verdict.
pub fn check_tv_smoothing(mu: &PathMeasure, nu: &PathMeasure, noise: &NoiseModel, scheme: &Scheme) -> Result<BoundReport> {
    let g = tv_smoothed(mu, nu, noise, scheme)?;
    let w1 = w1_flat(mu, nu)?;
    let rhs = noise.grad_l1() * w1 / noise.sigma;
    let inst = pair(mu, nu, json!({ "noise": noise, "scheme": scheme }));
    Ok(BoundReport::new("tv_smoothing", inst, g.tv, rhs, 0.0)
        .with("tv_upper", g.tv + g.budget)
        .with("w1", w1))
}

/// `AW_p(μ, Φ^{(R)}μ)^p <= 2^p T² tail_p(μ, R)`.
pub fn check_clipping(mu: &PathMeasure, p: f64, r: f64) -> Result<BoundReport> {
    check_p(p)?;
    check_r(r)?;
    let clipped = mu.clip(r)?;
    let lhs = aw_p_value(mu, &clipped, p)?.powf(p);
    let t = mu.horizon() as f64;
    let rhs = 2f64.powf(p) * t * t * mu.tail_p(p, r);
    let inst = json!({ "mu": to_json_value(mu), "params": { "p": p, "R": r } });
    Ok(BoundReport::new("clipping", inst, lhs, rhs, 0.0))
}
