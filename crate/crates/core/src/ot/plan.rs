use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major ground cost.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix<S = f64> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> CostMatrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "cost matrix has {} entries, expected {rows}x{cols}",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|c| !c.is_finite() || *c < S::zero()) {
            return Err(Error::param(
                "cost",
                format!("entry ({}, {}) = {}", k / cols, k % cols, data[k]),
                "must be finite and nonnegative",
            ));
        }
        Ok(CostMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }
}

/// Sparse coupling `(i, j, mass)` with its objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan<S = f64> {
    pub entries: Vec<(usize, usize, S)>,
    pub objective: S,
}

impl<S: Scalar> TransportPlan<S> {
    pub fn row_sums(&self, rows: usize) -> Vec<S> {
        let mut r = vec![S::zero(); rows];
        for &(i, _, m) in &self.entries {
            r[i] = r[i] + m;
        }
        r
    }

    pub fn col_sums(&self, cols: usize) -> Vec<S> {
        let mut c = vec![S::zero(); cols];
        for &(_, j, m) in &self.entries {
            c[j] = c[j] + m;
        }
        c
    }

    /// Recomputes `Σ mass * c_ij`.
    pub fn cost_under(&self, cost: &CostMatrix<S>) -> S {
        self.entries
            .iter()
            .map(|&(i, j, m)| m * cost.get(i, j))
            .sum()
    }
}
