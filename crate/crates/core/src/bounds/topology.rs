//! Sequences of the two-path example under vanishing noise.

use serde::{Deserialize, Serialize};

use super::generate::standard_example;
use super::report::kendall_tau;
use crate::adapted::aw_p_value;
use crate::error::{Error, Result};
use crate::moduli::modulus_standard_example;
use crate::smoothing::standard::{standard_smooth_aw, standard_w};
use crate::smoothing::{aw_to_base, NoiseModel, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `ε_n = 1/n`, `σ_n = n^{-1/2}`: `AW^{(σ_n)}(μ, μ_n)`.
    Slow,
    /// `ε_n = n^{-1/2}`, `σ_n = 1/n`: `AW(μ_n^{σ_n}, μ_n)` against `AW(μ, μ_n)`.
    Fast,
    /// `ε_n = 1/n` at a fixed `σ`: `AW^{(σ)}(μ, μ_n)` against `W_p(μ, μ_n)`.
    Fixed,
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "slow" => Ok(Regime::Slow),
            "fast" => Ok(Regime::Fast),
            "fixed" => Ok(Regime::Fixed),
            _ => Err(Error::param("regime", s, "expected slow, fast or fixed")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub n: usize,
    pub eps: f64,
    pub sigma: f64,
    /// The tracked distance.
    pub value: f64,
    /// Approximation budget on `value` (zero for quadrature values).
    pub budget: f64,
    /// The comparison distance: `AW(μ, μ_n)` when fast, `W_p` when fixed.
    pub reference: Option<f64>,
    /// `ω^{1,p}_{μ_n}(σ_n)` in the fast regime.
    pub modulus: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    pub regime: Regime,
    pub p: f64,
    pub points: Vec<TrendPoint>,
    pub final_over_initial: f64,
    pub kendall_tau: f64,
}

/// Fixed noise level of the [`Regime::Fixed`] sequence.
pub const FIXED_SIGMA: f64 = 0.5;

pub fn default_ns() -> Vec<usize> {
    (2..=8).map(|k| 1usize << k).collect()
}

pub fn sequence(regime: Regime, n: usize) -> (f64, f64) {
    let n = n as f64;
    match regime {
        Regime::Slow => (1.0 / n, n.powf(-0.5)),
        Regime::Fast => (n.powf(-0.5), 1.0 / n),
        Regime::Fixed => (1.0 / n, FIXED_SIGMA),
    }
}

pub fn run_topology_experiment(regime: Regime, p: f64, ns: &[usize]) -> Result<TrendReport> {
    if ns.is_empty() {
        return Err(Error::param("ns", "[]", "need at least one index"));
    }
    let mut points = Vec::with_capacity(ns.len());
    for &n in ns {
        if n == 0 {
            return Err(Error::param("n", n, "must be positive"));
        }
        let (eps, sigma) = sequence(regime, n);
        let point = match regime {
            Regime::Slow => TrendPoint {
                n,
                eps,
                sigma,
                value: standard_smooth_aw(eps, sigma, p)?,
                budget: 0.0,
                reference: None,
                modulus: None,
            },
            Regime::Fixed => TrendPoint {
                n,
                eps,
                sigma,
                value: standard_smooth_aw(eps, sigma, p)?,
                budget: 0.0,
                reference: Some(standard_w(eps)),
                modulus: None,
            },
            Regime::Fast => {
                let mu = standard_example(0.0);
                let mu_n = standard_example(eps);
                let d = aw_to_base(&mu_n, &NoiseModel::gaussian(2, sigma)?, &Scheme::default(), p)?;
                TrendPoint {
                    n,
                    eps,
                    sigma,
                    value: d.value,
                    budget: d.budget,
                    reference: Some(aw_p_value(&mu, &mu_n, p)?),
                    modulus: Some(modulus_standard_example(eps, sigma)),
                }
            }
        };
        points.push(point);
    }
    let values: Vec<f64> = points.iter().map(|q| q.value).collect();
    Ok(TrendReport {
        regime,
        p,
        final_over_initial: values[values.len() - 1] / values[0],
        kendall_tau: kendall_tau(&values),
        points,
    })
}

/// Oracle series and thresholds stored with the crate.
#[derive(Debug, Clone, Deserialize)]
pub struct TopologyFixture {
    pub note: String,
    pub ns: Vec<usize>,
    pub p: f64,
    pub slow_oracle: Vec<f64>,
    pub slow_max_ratio: f64,
    pub fast_max_final: f64,
    pub fixed_oracle: Vec<f64>,
    /// Bounds on `AW^{(σ)} / W_p` along the fixed-σ sequence.
    pub fixed_ratio_range: [f64; 2],
}

pub fn topology_fixture() -> TopologyFixture {
    serde_json::from_str(include_str!("../../fixtures/topology.json")).expect("bundled fixture parses")
}

/// Gate outcome of one regime against the stored fixture.
#[derive(Debug, Clone, Serialize)]
pub struct TrendGate {
    pub regime: Regime,
    pub pass: bool,
    pub detail: String,
}

pub fn gate(report: &TrendReport, fx: &TopologyFixture) -> TrendGate {
    let (pass, detail) = match report.regime {
        Regime::Slow => {
            let r = report.final_over_initial;
            (
                r < fx.slow_max_ratio && report.kendall_tau == -1.0,
                format!("final/initial {r:.4} (< {}), tau {}", fx.slow_max_ratio, report.kendall_tau),
            )
        }
        Regime::Fast => {
            let last = report.points.last().expect("nonempty");
            let upper = last.value + last.budget;
            let floor = 2f64.powf((report.p - 1.0) / report.p) - 1e-6;
            let min_ref = report
                .points
                .iter()
                .filter_map(|q| q.reference)
                .fold(f64::INFINITY, f64::min);
            (
                upper < fx.fast_max_final && min_ref >= floor,
                format!(
                    "final AW(mu_n^s, mu_n) <= {upper:.4} (< {}), min AW(mu, mu_n) {min_ref:.6} (>= {floor:.6})",
                    fx.fast_max_final
                ),
            )
        }
        Regime::Fixed => {
            let ratios: Vec<f64> = report
                .points
                .iter()
                .map(|q| q.value / q.reference.expect("fixed regime has W_p"))
                .collect();
            let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = ratios.iter().copied().fold(0.0, f64::max);
            (
                lo >= fx.fixed_ratio_range[0] && hi <= fx.fixed_ratio_range[1] && report.kendall_tau == -1.0,
                format!("AW^s/W ratio in [{lo:.4}, {hi:.4}], tau {}", report.kendall_tau),
            )
        }
    };
    TrendGate {
        regime: report.regime,
        pass,
        detail,
    }
}
