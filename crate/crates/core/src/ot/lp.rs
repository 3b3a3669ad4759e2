//! Dense two-phase tableau simplex with Bland's rule. Meant for the small
//! LPs of the budgeted transport problem and the bicausal oracle.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Eq,
    Le,
    Ge,
}

/// `min c·x` subject to sparse rows and `x >= 0`.
#[derive(Debug, Clone, Default)]
pub struct Lp {
    pub n: usize,
    pub obj: Vec<f64>,
    pub rows: Vec<(Vec<(usize, f64)>, Rel, f64)>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

const PIV: f64 = 1e-11;

impl Lp {
    pub fn new(n: usize) -> Self {
        Lp {
            n,
            obj: vec![0.0; n],
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, coef: Vec<(usize, f64)>, rel: Rel, rhs: f64) {
        self.rows.push((coef, rel, rhs));
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let m = self.rows.len();
        let n = self.n;
        let mut rel = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut dense = vec![vec![0.0; n]; m];
        for (r, (coef, re, b)) in self.rows.iter().enumerate() {
            let flip = *b < 0.0;
            for &(j, v) in coef {
                dense[r][j] += if flip { -v } else { v };
            }
            rhs.push(b.abs());
            rel.push(match (re, flip) {
                (Rel::Eq, _) => Rel::Eq,
                (Rel::Le, false) | (Rel::Ge, true) => Rel::Le,
                _ => Rel::Ge,
            });
        }
        let n_slack = rel.iter().filter(|r| **r != Rel::Eq).count();
        let n_art = rel.iter().filter(|r| **r != Rel::Le).count();
        let cols = n + n_slack + n_art;
        let art0 = n + n_slack;
        let mut t = vec![vec![0.0; cols + 1]; m];
        let mut basis = vec![0usize; m];
        let (mut s, mut a) = (n, art0);
        for r in 0..m {
            t[r][..n].copy_from_slice(&dense[r]);
            t[r][cols] = rhs[r];
            match rel[r] {
                Rel::Le => {
                    t[r][s] = 1.0;
                    basis[r] = s;
                    s += 1;
                }
                Rel::Ge => {
                    t[r][s] = -1.0;
                    s += 1;
                    t[r][a] = 1.0;
                    basis[r] = a;
                    a += 1;
                }
                Rel::Eq => {
                    t[r][a] = 1.0;
                    basis[r] = a;
                    a += 1;
                }
            }
        }
        let mut tab = Tableau {
            t,
            basis,
            cols,
            allowed: cols,
            iters: 0,
        };
        if n_art > 0 {
            let mut c1 = vec![0.0; cols];
            c1[art0..cols].iter_mut().for_each(|v| *v = 1.0);
            let z = tab.optimize(&c1)?;
            let scale = 1.0 + rhs.iter().fold(0.0f64, |x, y| x.max(*y));
            if z > 1e-9 * scale {
                return Err(Error::Infeasible(format!("phase one residual {z:e}")));
            }
            tab.evict_artificials(art0);
        }
        tab.allowed = art0;
        let mut c2 = vec![0.0; cols];
        c2[..n].copy_from_slice(&self.obj);
        let value = tab.optimize(&c2)?;
        let mut x = vec![0.0; n];
        for (r, &b) in tab.basis.iter().enumerate() {
            if b < n {
                x[b] = tab.t[r][cols].max(0.0);
            }
        }
        Ok(LpSolution { x, value })
    }
}

struct Tableau {
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    /// Columns `>= allowed` may not enter the basis.
    allowed: usize,
    iters: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.cols + 1;
        let p = self.t[r][c];
        for k in 0..w {
            self.t[r][k] /= p;
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for k in 0..w {
                        row[k] -= f * prow[k];
                    }
                    row[c] = 0.0;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `c·x` from the current basic feasible solution.
    fn optimize(&mut self, c: &[f64]) -> Result<f64> {
        let cap = 50_000 + 200 * (self.cols + self.t.len());
        loop {
            let mut rc = c.to_vec();
            for (r, &b) in self.basis.iter().enumerate() {
                let cb = c[b];
                if cb != 0.0 {
                    for k in 0..self.cols {
                        rc[k] -= cb * self.t[r][k];
                    }
                }
            }
            let scale = 1.0 + c.iter().fold(0.0f64, |x, y| x.max(y.abs()));
            let enter = (0..self.allowed).find(|&k| rc[k] < -1e-10 * scale);
            let Some(e) = enter else {
                let z = self
                    .basis
                    .iter()
                    .enumerate()
                    .map(|(r, &b)| c[b] * self.t[r][self.cols])
                    .sum();
                return Ok(z);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.t.len() {
                let a = self.t[r][e];
                if a > PIV {
                    let ratio = self.t[r][self.cols].max(0.0) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lv)) => {
                            if ratio < lv - 1e-13 || (ratio <= lv + 1e-13 && self.basis[r] < self.basis[lr]) {
                                Some((r, ratio))
                            } else {
                                Some((lr, lv))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::Numeric("linear program is unbounded".into()));
            };
            self.pivot(r, e);
            self.iters += 1;
            if self.iters > cap {
                return Err(Error::Stalled { iterations: self.iters });
            }
        }
    }

    /// Pivots zero-level artificials out of the basis; rows where that is
    /// impossible are linearly dependent and get dropped.
    fn evict_artificials(&mut self, art0: usize) {
        let mut r = 0;
        while r < self.t.len() {
            if self.basis[r] >= art0 {
                let col = (0..art0)
                    .filter(|&k| self.t[r][k].abs() > 1e-9)
                    .max_by(|&a, &b| self.t[r][a].abs().total_cmp(&self.t[r][b].abs()));
                match col {
                    Some(k) => self.pivot(r, k),
                    None => {
                        self.t.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }
}
