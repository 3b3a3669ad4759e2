//! Backward induction over pairs of disintegration-tree nodes.

use rayon::prelude::*;

use crate::error::Result;
use crate::measure::DisintegrationTree;
use crate::ot::{argsort, cost_1d_sorted, plan_1d, transport_raw};
use crate::scalar::{dist_p, Scalar};

/// `V_t` for every pair of depth-`t` nodes, row-major by level slot.
#[derive(Debug, Clone)]
pub struct ValueTable<S = f64> {
    levels: Vec<Vec<S>>,
    widths: Vec<usize>,
}

impl<S: Scalar> ValueTable<S> {
    /// `V_t(a, b)` by node ids.
    pub fn get(&self, lt: &DisintegrationTree<S>, rt: &DisintegrationTree<S>, a: usize, b: usize) -> S {
        let t = lt.node(a).depth;
        if t == lt.horizon() {
            return S::zero();
        }
        self.levels[t][lt.node(a).slot * self.widths[t] + rt.node(b).slot]
    }
}

pub(crate) struct AwSolver<'t, S> {
    pub lt: &'t DisintegrationTree<S>,
    pub rt: &'t DisintegrationTree<S>,
    p: S,
    /// Sorted child order for nodes one step above the leaves when `d == 1`.
    lsort: Vec<Vec<usize>>,
    rsort: Vec<Vec<usize>>,
    pub table: ValueTable<S>,
}

fn child_values<S: Scalar>(tree: &DisintegrationTree<S>, id: usize) -> Vec<S> {
    tree.node(id)
        .children
        .iter()
        .flat_map(|&c| tree.node(c).value.iter().copied())
        .collect()
}

impl<'t, S: Scalar> AwSolver<'t, S> {
    pub fn new(lt: &'t DisintegrationTree<S>, rt: &'t DisintegrationTree<S>, p: S) -> Self {
        let horizon = lt.horizon();
        let one_d = lt.dim() == 1;
        let presort = |tree: &DisintegrationTree<S>| -> Vec<Vec<usize>> {
            if !one_d {
                return Vec::new();
            }
            tree.level(horizon - 1)
                .iter()
                .map(|&id| argsort(&child_values(tree, id)))
                .collect()
        };
        let lsort = presort(lt);
        let rsort = presort(rt);
        AwSolver {
            lt,
            rt,
            p,
            lsort,
            rsort,
            table: ValueTable {
                levels: vec![Vec::new(); horizon],
                widths: (0..horizon).map(|t| rt.level(t).len()).collect(),
            },
        }
    }

    fn stage_cost(&self, a: usize, b: usize) -> Vec<S> {
        let (na, nb) = (self.lt.node(a), self.rt.node(b));
        let next = na.depth + 1;
        let last = next == self.lt.horizon();
        let mut c = Vec::with_capacity(na.children.len() * nb.children.len());
        for &ca in &na.children {
            let x = &self.lt.node(ca).value;
            for &cb in &nb.children {
                let y = &self.rt.node(cb).value;
                let mut v = dist_p(x, y, self.p);
                if !last {
                    v = v + self.table.levels[next][self.lt.node(ca).slot * self.table.widths[next] + self.rt.node(cb).slot];
                }
                c.push(v);
            }
        }
        c
    }

    fn last_stage_1d(&self, a: usize, b: usize) -> S {
        let (na, nb) = (self.lt.node(a), self.rt.node(b));
        let xa = child_values(self.lt, a);
        let xb = child_values(self.rt, b);
        cost_1d_sorted(&xa, &na.cond, &self.lsort[na.slot], &xb, &nb.cond, &self.rsort[nb.slot], self.p)
    }

    fn pair_value(&self, a: usize, b: usize) -> Result<S> {
        let (na, nb) = (self.lt.node(a), self.rt.node(b));
        if na.depth + 1 == self.lt.horizon() && self.lt.dim() == 1 {
            return Ok(self.last_stage_1d(a, b));
        }
        let c = self.stage_cost(a, b);
        Ok(transport_raw(&na.cond, &nb.cond, &c)?.objective)
    }

    /// Fills `V_t` for all `t` and returns `V_0` at the roots.
    pub fn solve(&mut self) -> Result<S> {
        let horizon = self.lt.horizon();
        for t in (0..horizon).rev() {
            let la = self.lt.level(t);
            let rb = self.rt.level(t);
            let w = rb.len();
            let vals: Result<Vec<S>> = (0..la.len() * w)
                .into_par_iter()
                .map(|k| self.pair_value(la[k / w], rb[k % w]))
                .collect();
            self.table.levels[t] = vals?;
        }
        Ok(self.table.levels[0][0])
    }

    /// Composes stage-optimal plans top-down into a leaf-level coupling.
    pub fn extract(&self) -> Result<Vec<(usize, usize, S)>> {
        let horizon = self.lt.horizon();
        let mut out = Vec::new();
        let mut stack = vec![(self.lt.root(), self.rt.root(), S::one())];
        while let Some((a, b, mass)) = stack.pop() {
            let (na, nb) = (self.lt.node(a), self.rt.node(b));
            if na.depth == horizon {
                out.push((na.atom.expect("leaf"), nb.atom.expect("leaf"), mass));
                continue;
            }
            let plan = if na.depth + 1 == horizon && self.lt.dim() == 1 {
                plan_1d(&child_values(self.lt, a), &na.cond, &child_values(self.rt, b), &nb.cond, self.p)
            } else {
                transport_raw(&na.cond, &nb.cond, &self.stage_cost(a, b))?
            };
            for &(i, j, m) in plan.entries.iter().rev() {
                stack.push((na.children[i], nb.children[j], mass * m));
            }
        }
        out.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        Ok(out)
    }
}

/// Absorbing-mismatch recursion for adapted total variation. Only pairs of
/// nodes with identical prefixes are ever visited.
pub(crate) fn av_value<S: Scalar>(lt: &DisintegrationTree<S>, rt: &DisintegrationTree<S>, a: usize, b: usize) -> Result<S> {
    let (na, nb) = (lt.node(a), rt.node(b));
    if na.children.is_empty() {
        return Ok(S::zero());
    }
    let mut c = Vec::with_capacity(na.children.len() * nb.children.len());
    for &ca in &na.children {
        let x = &lt.node(ca).value;
        for &cb in &nb.children {
            let y = &rt.node(cb).value;
            let same = x.iter().zip(y).all(|(u, v)| u.key() == v.key());
            c.push(if same { av_value(lt, rt, ca, cb)? } else { S::one() });
        }
    }
    Ok(transport_raw(&na.cond, &nb.cond, &c)?.objective)
}
