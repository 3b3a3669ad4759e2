use rayon::prelude::*;

use super::report::RateFit;
use crate::error::{Error, Result};
use crate::measure::PathMeasure;
use crate::smoothing::{convolve_quantized, NoiseModel, Scheme};
use crate::adapted::aw_p_value;

/// Eight-atom measure with `d = 1`, `T = 2` used by the default experiment.
pub fn default_rate_measure() -> PathMeasure {
    let pts = [
        (-1.0, -1.5),
        (-1.0, -0.5),
        (-1.0, 0.5),
        (-1.0, 1.5),
        (1.0, -1.0),
        (1.0, 0.0),
        (1.0, 1.0),
        (1.0, 2.0),
    ];
    let atoms = pts
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| (vec![a, b], (k + 1) as f64 / 36.0))
        .collect();
    PathMeasure::new(1, 2, atoms).expect("valid")
}

pub fn default_rate_ns() -> Vec<usize> {
    (5..=11).map(|k| 1usize << k).collect()
}

/// Grid used by the rate experiment.
pub fn rate_scheme() -> Scheme {
    Scheme {
        grid_fraction: 0.2,
        radius_mult: 5.0,
        ..Scheme::default()
    }
}

/// SplitMix64 finalizer, for deriving independent per-task seeds.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed-averaged `AW^{(σ)}_p(μ, μ_n)^p` over `n`, with a log-log fit.
/// Both measures are convolved on one lattice, so grid error largely cancels.
pub fn run_rate_experiment(
    mu: &PathMeasure,
    p: f64,
    noise: &NoiseModel,
    scheme: &Scheme,
    ns: &[usize],
    seeds: usize,
    seed: u64,
) -> Result<RateFit> {
    if seeds == 0 {
        return Err(Error::param("seeds", seeds, "must be positive"));
    }
    if ns.len() < 2 {
        return Err(Error::param("ns", ns.len(), "need at least two sample sizes"));
    }
    let base = convolve_quantized(mu, noise, scheme)?;
    let tasks: Vec<(usize, usize)> = ns.iter().flat_map(|&n| (0..seeds).map(move |s| (n, s))).collect();
    let vals: Vec<f64> = tasks
        .par_iter()
        .map(|&(n, s)| -> Result<f64> {
            let emp = mu.sample_empirical(n, mix_seed(seed, mix_seed(n as u64, s as u64)))?;
            let a = convolve_quantized(&emp, noise, scheme)?;
            Ok(aw_p_value(&base.approx, &a.approx, p)?.powf(p))
        })
        .collect::<Result<_>>()?;
    let means: Vec<f64> = vals.chunks(seeds).map(|c| c.iter().sum::<f64>() / seeds as f64).collect();
    Ok(RateFit::fit(ns.to_vec(), means))
}
