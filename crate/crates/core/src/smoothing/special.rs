use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub(crate) const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / SQRT_2PI
}

/// Upper tail `P(Z > z)`.
pub fn norm_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

pub fn norm_cdf(z: f64) -> f64 {
    norm_sf(-z)
}

/// `P(lo <= Z <= hi)`, accurate in both tails.
pub fn norm_interval(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        0.0
    } else if lo >= 0.0 {
        norm_sf(lo) - norm_sf(hi)
    } else if hi <= 0.0 {
        norm_sf(-hi) - norm_sf(-lo)
    } else {
        1.0 - norm_sf(-lo) - norm_sf(hi)
    }
}

/// `E|Z|^p` for a standard Gaussian on `R^n`.
pub fn chi_moment(n: usize, p: f64) -> f64 {
    let k = n as f64;
    (0.5 * p * 2f64.ln() + ln_gamma(0.5 * (k + p)) - ln_gamma(0.5 * k)).exp()
}

/// Double-exponential quadrature that fails loudly when the error estimate
/// stays far above the request.
pub fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let out = quadrature::integrate(f, a, b, tol);
    if !out.integral.is_finite() || out.error_estimate > tol.max(1e-300) * 1e3 {
        return Err(Error::Numeric(format!(
            "quadrature on [{a}, {b}] did not converge: residual estimate {:e}",
            out.error_estimate
        )));
    }
    Ok(out.integral)
}
