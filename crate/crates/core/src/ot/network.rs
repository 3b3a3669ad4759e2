//! Primal network simplex specialised to the transportation problem.
//!
//! Nodes `0..m` are sources, `m..m+n` sinks, `m+n` an artificial root joined
//! to every node by a big-M arc. Pricing is block search; the leaving arc is
//! chosen so the spanning tree stays strongly feasible, which rules out
//! cycling on degenerate pivots.

use super::plan::TransportPlan;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub(crate) fn solve<S: Scalar>(a: &[S], b: &[S], cost: &[S]) -> Result<TransportPlan<S>> {
    let (m, n) = (a.len(), b.len());
    debug_assert_eq!(cost.len(), m * n);
    if m == 1 || n == 1 {
        let entries: Vec<(usize, usize, S)> = if m == 1 {
            (0..n).map(|j| (0, j, b[j])).collect()
        } else {
            (0..m).map(|i| (i, 0, a[i])).collect()
        };
        let objective = entries.iter().map(|&(i, j, w)| w * cost[i * n + j]).sum();
        return Ok(TransportPlan { entries, objective });
    }
    let mut s = Simplex::new(a, b, cost);
    s.run()?;
    Ok(s.plan())
}

struct Simplex<'a, S> {
    m: usize,
    n: usize,
    cost: &'a [S],
    art: S,
    flow: Vec<S>,
    in_tree: Vec<bool>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    up: Vec<bool>,
    depth: Vec<usize>,
    pi: Vec<S>,
    adj: Vec<Vec<usize>>,
    next_arc: usize,
    block: usize,
    eps: S,
}

impl<'a, S: Scalar> Simplex<'a, S> {
    fn new(a: &[S], b: &[S], cost: &'a [S]) -> Self {
        let (m, n) = (a.len(), b.len());
        let nodes = m + n + 1;
        let root = m + n;
        let arcs = m * n + m + n;
        let maxc = cost.iter().copied().fold(S::zero(), |x, y| x.max(y.abs()));
        let art = (maxc + S::one()) * S::of(nodes as f64);
        let mut flow = vec![S::zero(); arcs];
        let mut in_tree = vec![false; arcs];
        let mut parent = vec![usize::MAX; nodes];
        let mut pred = vec![usize::MAX; nodes];
        let mut up = vec![false; nodes];
        let mut depth = vec![0; nodes];
        let mut pi = vec![S::zero(); nodes];
        let mut adj = vec![Vec::new(); nodes];
        for u in 0..m + n {
            let e = m * n + u;
            in_tree[e] = true;
            parent[u] = root;
            pred[u] = e;
            depth[u] = 1;
            adj[u].push(e);
            adj[root].push(e);
            if u < m {
                up[u] = true;
                flow[e] = a[u];
                pi[u] = -art;
            } else {
                flow[e] = b[u - m];
                pi[u] = art;
            }
        }
        let block = ((arcs as f64).sqrt() as usize).max(10);
        Simplex {
            m,
            n,
            cost,
            art,
            flow,
            in_tree,
            parent,
            pred,
            up,
            depth,
            pi,
            adj,
            next_arc: 0,
            block,
            eps: S::epsilon() * S::of(64.0) * art,
        }
    }

    #[inline]
    fn ends(&self, e: usize) -> (usize, usize) {
        let real = self.m * self.n;
        if e < real {
            (e / self.n, self.m + e % self.n)
        } else {
            let u = e - real;
            if u < self.m {
                (u, self.m + self.n)
            } else {
                (self.m + self.n, u)
            }
        }
    }

    #[inline]
    fn arc_cost(&self, e: usize) -> S {
        if e < self.m * self.n {
            self.cost[e]
        } else {
            self.art
        }
    }

    #[inline]
    fn reduced(&self, e: usize) -> S {
        let (s, t) = self.ends(e);
        self.arc_cost(e) + self.pi[s] - self.pi[t]
    }

    fn entering(&mut self) -> Option<usize> {
        let arcs = self.flow.len();
        let mut best = None;
        let mut min = S::zero();
        let mut cnt = self.block;
        let start = self.next_arc;
        for k in 0..arcs {
            let e = (start + k) % arcs;
            if !self.in_tree[e] {
                let rc = self.reduced(e);
                if rc < min {
                    min = rc;
                    best = Some(e);
                }
            }
            cnt -= 1;
            if cnt == 0 {
                if min < -self.eps {
                    self.next_arc = (e + 1) % arcs;
                    return best;
                }
                cnt = self.block;
            }
        }
        if min < -self.eps {
            self.next_arc = best.map_or(0, |e| (e + 1) % arcs);
            return best;
        }
        None
    }

    fn run(&mut self) -> Result<()> {
        let cap = 200 * (self.m + self.n) * self.m.max(self.n) + 10_000;
        for _ in 0..cap {
            let Some(ein) = self.entering() else {
                return Ok(());
            };
            self.pivot(ein)?;
        }
        Err(Error::Stalled { iterations: cap })
    }

    fn pivot(&mut self, ein: usize) -> Result<()> {
        let (u1, u2) = self.ends(ein);
        let (mut x, mut y) = (u1, u2);
        while x != y {
            if self.depth[x] > self.depth[y] {
                x = self.parent[x];
            } else if self.depth[y] > self.depth[x] {
                y = self.parent[y];
            } else {
                x = self.parent[x];
                y = self.parent[y];
            }
        }
        let join = x;
        let mut delta = S::infinity();
        let mut out = usize::MAX;
        let mut side = 0;
        let mut u = u1;
        while u != join {
            if self.up[u] && self.flow[self.pred[u]] < delta {
                delta = self.flow[self.pred[u]];
                out = u;
                side = 1;
            }
            u = self.parent[u];
        }
        u = u2;
        while u != join {
            if !self.up[u] && self.flow[self.pred[u]] <= delta {
                delta = self.flow[self.pred[u]];
                out = u;
                side = 2;
            }
            u = self.parent[u];
        }
        if out == usize::MAX {
            return Err(Error::Numeric("transport cycle is unbounded".into()));
        }
        if delta > S::zero() {
            self.flow[ein] = self.flow[ein] + delta;
            u = u1;
            while u != join {
                let e = self.pred[u];
                self.flow[e] = if self.up[u] { self.flow[e] - delta } else { self.flow[e] + delta };
                u = self.parent[u];
            }
            u = u2;
            while u != join {
                let e = self.pred[u];
                self.flow[e] = if self.up[u] { self.flow[e] + delta } else { self.flow[e] - delta };
                u = self.parent[u];
            }
        }
        let eout = self.pred[out];
        self.flow[eout] = S::zero();
        let po = self.parent[out];
        self.adj[out].retain(|&f| f != eout);
        self.adj[po].retain(|&f| f != eout);
        self.in_tree[eout] = false;
        self.in_tree[ein] = true;
        self.adj[u1].push(ein);
        self.adj[u2].push(ein);
        let (sub, attach) = if side == 1 { (u1, u2) } else { (u2, u1) };
        let mut stack = vec![(sub, attach, ein)];
        while let Some((v, par, e)) = stack.pop() {
            self.parent[v] = par;
            self.pred[v] = e;
            let is_up = self.ends(e).0 == v;
            self.up[v] = is_up;
            self.depth[v] = self.depth[par] + 1;
            let c = self.arc_cost(e);
            self.pi[v] = if is_up { self.pi[par] - c } else { self.pi[par] + c };
            for &f in &self.adj[v] {
                if f != e {
                    let (s, t) = self.ends(f);
                    stack.push((if s == v { t } else { s }, v, f));
                }
            }
        }
        Ok(())
    }

    fn plan(&self) -> TransportPlan<S> {
        let mut entries = Vec::new();
        let mut objective = S::zero();
        for e in 0..self.m * self.n {
            let f = self.flow[e];
            if f > S::zero() {
                entries.push((e / self.n, e % self.n, f));
                objective = objective + f * self.cost[e];
            }
        }
        TransportPlan { entries, objective }
    }
}
