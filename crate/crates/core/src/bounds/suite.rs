//! Seeded default suites. Every instance draws from its own stream, so
//! results do not depend on scheduling.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::checks::*;
use super::generate::{heavy_tailed_measure, random_measure, rng, Rng64, Shape};
use super::rates::{default_rate_measure, default_rate_ns, mix_seed, rate_scheme, run_rate_experiment};
use super::report::{BoundReport, RateFit};
use super::topology::{gate, run_topology_experiment, topology_fixture, Regime, TrendGate, TrendReport};
use crate::error::{Error, Result};
use crate::measure::PathMeasure;
use crate::smoothing::{NoiseModel, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    Core,
    Smoothing,
    Topology,
    Rates,
}

impl std::str::FromStr for SuiteKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "core" => Ok(SuiteKind::Core),
            "smoothing" => Ok(SuiteKind::Smoothing),
            "topology" => Ok(SuiteKind::Topology),
            "rates" => Ok(SuiteKind::Rates),
            _ => Err(Error::param("suite", s, "expected core, smoothing, topology or rates")),
        }
    }
}

pub const AWTV_INSTANCES: usize = 100;
pub const SANDWICH_INSTANCES: usize = 200;
pub const CLIP_INSTANCES: usize = 50;
pub const SMOOTH_INSTANCES: usize = 50;
/// Per moment variant.
pub const MOMENT_INSTANCES: usize = 20;
/// Rate experiment gate on the fitted log-log slope.
pub const RATE_MAX_SLOPE: f64 = -0.25;
pub const RATE_SEEDS: usize = 20;

/// Coarse grid shared by the smoothed checks.
pub fn suite_scheme() -> Scheme {
    Scheme {
        grid_fraction: 0.25,
        radius_mult: 4.0,
        ..Scheme::default()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub bound_id: String,
    pub instances: usize,
    pub passed: usize,
    pub budget_dominated: usize,
    /// Largest value of each auxiliary quantity across the suite.
    pub max_extra: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrendOutcome {
    pub report: TrendReport,
    pub gate: TrendGate,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateOutcome {
    pub fit: RateFit,
    pub max_slope: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: SuiteKind,
    pub seed: u64,
    pub pass: bool,
    pub summary: Vec<SuiteSummary>,
    pub reports: Vec<BoundReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trends: Vec<TrendOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<RateOutcome>,
}

impl SuiteReport {
    pub fn first_failure(&self) -> Option<&BoundReport> {
        self.reports.iter().find(|r| !r.pass)
    }
}

pub fn summarize(reports: &[BoundReport]) -> Vec<SuiteSummary> {
    let mut by: BTreeMap<&str, SuiteSummary> = BTreeMap::new();
    for r in reports {
        let s = by.entry(&r.bound_id).or_insert_with(|| SuiteSummary {
            bound_id: r.bound_id.clone(),
            instances: 0,
            passed: 0,
            budget_dominated: 0,
            max_extra: BTreeMap::new(),
        });
        s.instances += 1;
        s.passed += r.pass as usize;
        s.budget_dominated += r.budget_dominated as usize;
        for (k, &v) in &r.extra {
            let e = s.max_extra.entry(k.clone()).or_insert(v);
            *e = e.max(v);
        }
    }
    by.into_values().collect()
}

fn pick<T: Copy>(rng: &mut Rng64, xs: &[T]) -> T {
    xs[rng.gen_range(0..xs.len())]
}

fn run_family(
    seed: u64,
    family: u64,
    count: usize,
    f: impl Fn(usize, &mut Rng64) -> Result<Vec<BoundReport>> + Sync,
) -> Result<Vec<BoundReport>> {
    let chunks: Vec<Vec<BoundReport>> = (0..count)
        .into_par_iter()
        .map(|i| f(i, &mut rng(mix_seed(seed, mix_seed(family, i as u64)))))
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// A second measure on the support of `mu` with fresh weights, or an
/// independent draw.
fn partner(rng: &mut Rng64, mu: &PathMeasure, shape: Shape) -> PathMeasure {
    if rng.gen_bool(0.5) {
        let w = super::generate::dirichlet(rng, mu.len());
        PathMeasure::from_unnormalized(mu.dim(), mu.horizon(), mu.paths_flat().to_vec(), w).expect("valid")
    } else {
        random_measure(rng, shape)
    }
}

fn core(seed: u64) -> Result<Vec<BoundReport>> {
    let mut out = run_family(seed, 1, AWTV_INSTANCES, |_, g| {
        let mut shape = Shape::new(pick(g, &[1, 2]), pick(g, &[1, 2, 3]), 6);
        if g.gen_bool(0.5) {
            shape = shape.continuous();
        }
        let mu = random_measure(g, shape);
        let nu = partner(g, &mu, shape);
        Ok(vec![check_awtv(&mu, &nu, pick(g, &[1.0, 2.0, 3.0]), pick(g, &[0.5, 1.0, 2.0, 4.0]))?])
    })?;
    out.extend(run_family(seed, 2, SANDWICH_INSTANCES, |_, g| {
        let shape = Shape::new(1, pick(g, &[2, 3]), 5);
        let mu = random_measure(g, shape);
        let nu = partner(g, &mu, shape);
        Ok(check_tv_sandwich(&mu, &nu)?.to_vec())
    })?);
    out.extend(run_family(seed, 3, CLIP_INSTANCES, |_, g| {
        let shape = Shape::new(pick(g, &[1, 2]), pick(g, &[1, 2, 3]), 6);
        let mu = heavy_tailed_measure(g, shape);
        Ok(vec![check_clipping(&mu, pick(g, &[1.0, 2.0]), pick(g, &[1.0, 2.0, 5.0]))?])
    })?);
    Ok(out)
}

fn smooth_pair(g: &mut Rng64) -> (PathMeasure, PathMeasure) {
    let shape = Shape {
        lattice: Some(0.5),
        ..Shape::new(1, 2, 4)
    };
    let mu = random_measure(g, shape);
    let nu = partner(g, &mu, shape);
    (mu, nu)
}

fn smoothing(seed: u64) -> Result<Vec<BoundReport>> {
    let scheme = suite_scheme();
    let sigmas = [0.25, 0.5, 1.0];
    let mut out = run_family(seed, 10, SMOOTH_INSTANCES, |_, g| {
        let (mu, nu) = smooth_pair(g);
        let noise = NoiseModel::gaussian(2, pick(g, &sigmas))?;
        let p = pick(g, &[1.0, 2.0]);
        Ok(vec![check_awsigma_w1(&mu, &nu, p, pick(g, &[1.0, 2.0, 3.0]), &noise, &scheme)?])
    })?;
    out.extend(run_family(seed, 11, 3 * MOMENT_INSTANCES, |i, g| {
        let (mu, nu) = smooth_pair(g);
        let p = pick(g, &[1.0, 2.0]);
        let sigma = pick(g, &sigmas);
        let r = match i % 3 {
            0 => check_moment_variant(&mu, &nu, p, &NoiseModel::gaussian(2, sigma)?, &scheme, MomentVariant::Moment { q: 2.0 * p })?,
            1 => check_moment_variant(&mu, &nu, p, &NoiseModel::bump(2, sigma)?, &scheme, MomentVariant::Compact)?,
            _ => check_moment_variant(
                &mu,
                &nu,
                p,
                &NoiseModel::gaussian(2, sigma)?,
                &scheme,
                MomentVariant::Gaussian {
                    q: 2.0 * p,
                    sigma0: sigma / 2f64.sqrt(),
                },
            )?,
        };
        Ok(vec![r])
    })?);
    out.extend(run_family(seed, 12, SMOOTH_INSTANCES, |_, g| {
        let (mu, _) = smooth_pair(g);
        let noise = NoiseModel::gaussian(2, pick(g, &[0.1, 0.25, 0.5, 1.0]))?;
        Ok(vec![check_bandwidth(&mu, pick(g, &[1.0, 2.0]), &noise, &scheme)?])
    })?);
    out.extend(run_family(seed, 13, SMOOTH_INSTANCES, |_, g| {
        let (mu, nu) = smooth_pair(g);
        let noise = NoiseModel::gaussian(2, pick(g, &sigmas))?;
        let p = pick(g, &[1.0, 2.0]);
        Ok(vec![check_main_bound(&mu, &nu, p, pick(g, &[1.0, 2.0, 3.0]), &noise, &scheme)?])
    })?);
    out.extend(run_family(seed, 14, SMOOTH_INSTANCES, |_, g| {
        let (mu, nu) = smooth_pair(g);
        let noise = NoiseModel::gaussian(2, pick(g, &sigmas))?;
        Ok(vec![check_tv_smoothing(&mu, &nu, &noise, &Scheme::default())?])
    })?);
    Ok(out)
}

pub fn run_topology_suite() -> Result<Vec<TrendOutcome>> {
    let fx = topology_fixture();
    let ns = fx.ns.clone();
    [Regime::Slow, Regime::Fast, Regime::Fixed]
        .into_iter()
        .map(|regime| {
            let report = run_topology_experiment(regime, fx.p, &ns)?;
            let gate = gate(&report, &fx);
            Ok(TrendOutcome { report, gate })
        })
        .collect()
}

pub fn run_rate_suite(seed: u64) -> Result<RateOutcome> {
    let noise = NoiseModel::gaussian(2, 0.5)?;
    let fit = run_rate_experiment(&default_rate_measure(), 1.0, &noise, &rate_scheme(), &default_rate_ns(), RATE_SEEDS, seed)?;
    Ok(RateOutcome {
        pass: fit.slope.is_finite() && fit.slope <= RATE_MAX_SLOPE,
        max_slope: RATE_MAX_SLOPE,
        fit,
    })
}

pub fn run_suite(kind: SuiteKind, seed: u64) -> Result<SuiteReport> {
    let (reports, trends, rate) = match kind {
        SuiteKind::Core => (core(seed)?, Vec::new(), None),
        SuiteKind::Smoothing => (smoothing(seed)?, Vec::new(), None),
        SuiteKind::Topology => (Vec::new(), run_topology_suite()?, None),
        SuiteKind::Rates => (Vec::new(), Vec::new(), Some(run_rate_suite(seed)?)),
    };
    let pass = reports.iter().all(|r| r.pass)
        && trends.iter().all(|t| t.gate.pass)
        && rate.as_ref().map_or(true, |r| r.pass);
    Ok(SuiteReport {
        suite: kind,
        seed,
        pass,
        summary: summarize(&reports),
        reports,
        trends,
        rate,
    })
}
