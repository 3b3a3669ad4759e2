use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Absolute slack added to every verdict.
pub const VERDICT_TOL: f64 = 1e-9;

/// One evaluated inequality `lhs <= rhs`, with the approximation budget kept
/// apart from the slack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_id: String,
    /// Everything needed to replay the check.
    pub instance: serde_json::Value,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub budget: f64,
    pub pass: bool,
    /// Passed, but the budget exceeds half the slack.
    pub budget_dominated: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

impl BoundReport {
    pub fn new(bound_id: impl Into<String>, instance: serde_json::Value, lhs: f64, rhs: f64, budget: f64) -> Self {
        let mut r = BoundReport {
            bound_id: bound_id.into(),
            instance,
            lhs,
            rhs,
            slack: rhs - lhs,
            budget,
            pass: false,
            budget_dominated: false,
            extra: BTreeMap::new(),
        };
        r.pass = r.verdict();
        r.budget_dominated = r.pass && r.budget > 0.0 && r.budget > 0.5 * r.slack;
        r
    }

    /// Recomputes the verdict from the numeric fields.
    pub fn verdict(&self) -> bool {
        self.lhs <= self.rhs + self.budget + VERDICT_TOL
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }
}

/// Least-squares line through `(ln n, ln value)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub ns: Vec<usize>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

impl RateFit {
    pub fn fit(ns: Vec<usize>, values: Vec<f64>) -> Self {
        let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
        let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
        let (slope, intercept) = ols(&xs, &ys);
        let residual = (xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum::<f64>()
            / xs.len().max(1) as f64)
            .sqrt();
        RateFit {
            ns,
            values,
            slope,
            intercept,
            residual,
        }
    }
}

pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Kendall's tau-a of a series against its index.
pub fn kendall_tau(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mut s = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            s += match values[j].partial_cmp(&values[i]) {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    s as f64 / (n * (n - 1) / 2) as f64
}
