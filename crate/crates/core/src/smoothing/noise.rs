use serde::Serialize;

use super::special::{chi_moment, norm_interval, quad};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Gaussian,
    /// Product of biweight bumps `(15/16)(1 - x^2)^2` on `[-1, 1]^N`: C¹,
    /// compactly supported, Fourier transform vanishing only on a null set.
    Bump,
}

/// `ξ_σ`: the law of `σZ` with `Z` from `kind` on `R^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub dim: usize,
    pub sigma: f64,
}

const BUMP_C: f64 = 15.0 / 16.0;

fn bump_cdf(x: f64) -> f64 {
    if x <= -1.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        0.5 + BUMP_C * (x - 2.0 * x.powi(3) / 3.0 + x.powi(5) / 5.0)
    }
}

fn bump_pdf(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        BUMP_C * (1.0 - x * x).powi(2)
    }
}

fn bump_dpdf(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        -4.0 * BUMP_C * x * (1.0 - x * x)
    }
}

/// `E|B|^p` for one biweight coordinate.
fn bump_abs_moment(p: f64) -> f64 {
    2.0 * BUMP_C * (1.0 / (p + 1.0) - 2.0 / (p + 3.0) + 1.0 / (p + 5.0))
}

/// Integral over `[0,1]^2` of a function with possible corner singularities.
fn quad2(f: impl Fn(f64, f64) -> f64) -> Result<f64> {
    quad(|x| quad(|y| f(x, y), 0.0, 1.0, 1e-12).unwrap_or(f64::NAN), 0.0, 1.0, 1e-10)
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, dim: usize, sigma: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("noise dimension must be positive".into()));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::param("sigma", sigma, "must be positive"));
        }
        Ok(NoiseModel { kind, dim, sigma })
    }

    pub fn gaussian(dim: usize, sigma: f64) -> Result<Self> {
        Self::new(NoiseKind::Gaussian, dim, sigma)
    }

    pub fn bump(dim: usize, sigma: f64) -> Result<Self> {
        Self::new(NoiseKind::Bump, dim, sigma)
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(self.kind, self.dim, sigma)
    }

    /// `M_p(ξ) = E|Z|^p` at unit scale. Exact for Gaussians and for the bump
    /// with `dim <= 2` or `p = 2`; otherwise an upper bound.
    pub fn moment_p(&self, p: f64) -> f64 {
        match self.kind {
            NoiseKind::Gaussian => chi_moment(self.dim, p),
            NoiseKind::Bump => {
                let n = self.dim as f64;
                if self.dim == 1 {
                    bump_abs_moment(p)
                } else if p == 2.0 {
                    n * bump_abs_moment(2.0)
                } else if self.dim == 2 {
                    let v = quad2(|x, y| (x * x + y * y).powf(0.5 * p) * bump_pdf(x) * bump_pdf(y));
                    v.map(|v| 4.0 * v).unwrap_or_else(|_| self.moment_upper(p))
                } else {
                    self.moment_upper(p)
                }
            }
        }
    }

    fn moment_upper(&self, p: f64) -> f64 {
        let n = self.dim as f64;
        if p <= 2.0 {
            (n * bump_abs_moment(2.0)).powf(0.5 * p)
        } else {
            n.powf(0.5 * p) * bump_abs_moment(p)
        }
    }

    /// `‖∇f‖_{L¹}` of the unit-scale density. Exact for Gaussians and for the
    /// bump with `dim <= 2`; the coordinate-sum upper bound otherwise.
    pub fn grad_l1(&self) -> f64 {
        match self.kind {
            NoiseKind::Gaussian => gaussian_grad_l1(self.dim),
            NoiseKind::Bump => {
                let one = 2.0 * bump_pdf(0.0);
                match self.dim {
                    1 => one,
                    2 => quad2(|x, y| {
                        let (a, b) = (bump_dpdf(x) * bump_pdf(y), bump_pdf(x) * bump_dpdf(y));
                        (a * a + b * b).sqrt()
                    })
                    .map(|v| 4.0 * v)
                    .unwrap_or(2.0 * one),
                    n => n as f64 * one,
                }
            }
        }
    }

    /// Diameter of the unit-scale support, if bounded.
    pub fn support_diameter(&self) -> Option<f64> {
        match self.kind {
            NoiseKind::Gaussian => None,
            NoiseKind::Bump => Some(2.0 * (self.dim as f64).sqrt()),
        }
    }

    /// Probability that one unit-scale coordinate falls in `[lo, hi]`.
    pub fn interval_mass(&self, lo: f64, hi: f64) -> f64 {
        match self.kind {
            NoiseKind::Gaussian => norm_interval(lo, hi),
            NoiseKind::Bump => (bump_cdf(hi) - bump_cdf(lo)).max(0.0),
        }
    }

    /// One-coordinate CDF at unit scale.
    pub fn cdf_1d(&self, z: f64) -> f64 {
        match self.kind {
            NoiseKind::Gaussian => super::special::norm_cdf(z),
            NoiseKind::Bump => bump_cdf(z),
        }
    }

    /// Per-coordinate half-width (unit scale) beyond which the density vanishes.
    pub(crate) fn support_radius(&self) -> f64 {
        match self.kind {
            NoiseKind::Gaussian => f64::INFINITY,
            NoiseKind::Bump => 1.0,
        }
    }
}

/// `E|Z|` for a standard Gaussian on `R^n`, equal to `‖∇φ‖_{L¹}`.
pub fn gaussian_grad_l1(n: usize) -> f64 {
    chi_moment(n, 1.0)
}
