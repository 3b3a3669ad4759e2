use serde::Serialize;

use super::convolve::{convolve_quantized, Scheme, SmoothedApprox};
use super::noise::NoiseModel;
use crate::adapted::aw_p_value;
use crate::error::{Error, Result};
use crate::measure::PathMeasure;
use crate::ot::wasserstein_pow;

/// Pairs of support points beyond which the smoothed `W_p` refuses to solve.
pub const SMOOTH_W_MAX_PAIRS: usize = 4_000_000;

/// A grid estimate with a two-sided error budget: the exact distance lies in
/// `[value - budget, value + budget]`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SmoothDistance {
    pub value: f64,
    pub budget: f64,
    pub cells: usize,
}

impl SmoothDistance {
    pub fn lower(&self) -> f64 {
        (self.value - self.budget).max(0.0)
    }

    pub fn upper(&self) -> f64 {
        self.value + self.budget
    }
}

fn approximations(
    mu: &PathMeasure,
    nu: &PathMeasure,
    noise: &NoiseModel,
    scheme: &Scheme,
) -> Result<(SmoothedApprox, SmoothedApprox)> {
    mu.same_shape(nu)?;
    let a = convolve_quantized(mu, noise, scheme)?;
    let b = convolve_quantized(nu, noise, scheme)?;
    Ok((a, b))
}

/// `W_p` between two (already smoothed) grid approximations.
pub fn approx_w(a: &SmoothedApprox, b: &SmoothedApprox, p: f64) -> Result<f64> {
    let n = a.noise.dim;
    let (x, y) = (&a.approx, &b.approx);
    if n > 1 && x.len() * y.len() > SMOOTH_W_MAX_PAIRS {
        return Err(Error::TooLarge(format!(
            "smoothed W_p needs a {}x{} transport problem; coarsen the grid",
            x.len(),
            y.len()
        )));
    }
    let v = wasserstein_pow(n, x.paths_flat(), x.weights(), y.paths_flat(), y.weights(), p)?;
    Ok(v.max(0.0).powf(1.0 / p))
}

/// `W_p(μ*ξ_σ, ν*ξ_σ)` on the path space flattened to `R^{dT}`.
pub fn smooth_w(mu: &PathMeasure, nu: &PathMeasure, noise: &NoiseModel, scheme: &Scheme, p: f64) -> Result<SmoothDistance> {
    let (a, b) = approximations(mu, nu, noise, scheme)?;
    Ok(SmoothDistance {
        value: approx_w(&a, &b, p)?,
        budget: a.budget_p(p) + b.budget_p(p),
        cells: a.approx.len() + b.approx.len(),
    })
}

/// `AW_p(μ*ξ_σ, ν*ξ_σ)` solved exactly between the grid approximations.
pub fn smooth_aw(mu: &PathMeasure, nu: &PathMeasure, noise: &NoiseModel, scheme: &Scheme, p: f64) -> Result<SmoothDistance> {
    let (a, b) = approximations(mu, nu, noise, scheme)?;
    Ok(SmoothDistance {
        value: aw_p_value(&a.approx, &b.approx, p)?,
        budget: a.aw_budget_p(p) + b.aw_budget_p(p),
        cells: a.approx.len() + b.approx.len(),
    })
}

/// `AW_p(μ*ξ_σ, μ)`: smoothed measure against its own discrete base.
pub fn aw_to_base(mu: &PathMeasure, noise: &NoiseModel, scheme: &Scheme, p: f64) -> Result<SmoothDistance> {
    let a = convolve_quantized(mu, noise, scheme)?;
    Ok(SmoothDistance {
        value: aw_p_value(&a.approx, mu, p)?,
        budget: a.aw_budget_p(p),
        cells: a.approx.len(),
    })
}
