//! Gaussian and compactly supported noise, grid convolutions with error
//! budgets, and smoothed distances.

mod convolve;
mod distance;
mod noise;
pub mod special;
pub mod standard;

pub use convolve::{convolve_quantized, tv_smoothed, GridTv, Scheme, SmoothedApprox};
pub use distance::{approx_w, aw_to_base, smooth_aw, smooth_w, SmoothDistance, SMOOTH_W_MAX_PAIRS};
pub use noise::{gaussian_grad_l1, NoiseKind, NoiseModel};
pub use crate::moduli::modulus_standard_example;
