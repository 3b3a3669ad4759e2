use std::collections::HashMap;

use super::PathMeasure;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct Node<S> {
    pub depth: usize,
    pub parent: Option<usize>,
    /// State at time `depth` (empty at the root).
    pub value: Vec<S>,
    pub mass: S,
    pub children: Vec<usize>,
    /// Conditional weights of `children`, summing to one.
    pub cond: Vec<S>,
    /// Source atom index for leaves.
    pub atom: Option<usize>,
    /// Position of this node inside its level.
    pub slot: usize,
}

/// Trie of conditional kernels. Children are kept in order of first
/// appearance in the source measure, so the layout is deterministic.
#[derive(Debug, Clone)]
pub struct DisintegrationTree<S = f64> {
    d: usize,
    horizon: usize,
    nodes: Vec<Node<S>>,
    levels: Vec<Vec<usize>>,
}

impl<S: Scalar> DisintegrationTree<S> {
    pub fn build(mu: &PathMeasure<S>) -> Self {
        let (d, horizon) = (mu.dim(), mu.horizon());
        let mut nodes = vec![Node {
            depth: 0,
            parent: None,
            value: Vec::new(),
            mass: S::zero(),
            children: Vec::new(),
            cond: Vec::new(),
            atom: None,
            slot: 0,
        }];
        let mut levels = vec![vec![0usize]];
        levels.resize(horizon + 1, Vec::new());
        let mut lookup: HashMap<(usize, Vec<u64>), usize> = HashMap::new();
        for (i, (path, w)) in mu.atoms().enumerate() {
            let mut cur = 0;
            nodes[0].mass = nodes[0].mass + w;
            for t in 0..horizon {
                let x = &path[t * d..(t + 1) * d];
                let key = (cur, x.iter().map(|v| v.key()).collect::<Vec<_>>());
                let next = match lookup.get(&key) {
                    Some(&c) => c,
                    None => {
                        let id = nodes.len();
                        nodes.push(Node {
                            depth: t + 1,
                            parent: Some(cur),
                            value: x.to_vec(),
                            mass: S::zero(),
                            children: Vec::new(),
                            cond: Vec::new(),
                            atom: None,
                            slot: levels[t + 1].len(),
                        });
                        levels[t + 1].push(id);
                        nodes[cur].children.push(id);
                        lookup.insert(key, id);
                        id
                    }
                };
                nodes[next].mass = nodes[next].mass + w;
                cur = next;
            }
            nodes[cur].atom = Some(i);
        }
        for id in 0..nodes.len() {
            let m = nodes[id].mass;
            let cond = nodes[id].children.iter().map(|&c| nodes[c].mass / m).collect();
            nodes[id].cond = cond;
        }
        DisintegrationTree {
            d,
            horizon,
            nodes,
            levels,
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn node(&self, id: usize) -> &Node<S> {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node<S>] {
        &self.nodes
    }

    /// Node ids at depth `t`.
    pub fn level(&self, t: usize) -> &[usize] {
        &self.levels[t]
    }

    /// Concatenated states `x_{1:t}` leading to `id`.
    pub fn prefix(&self, id: usize) -> Vec<S> {
        let mut chain = Vec::new();
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            chain.push(cur);
            cur = p;
        }
        chain
            .iter()
            .rev()
            .flat_map(|&c| self.nodes[c].value.iter().copied())
            .collect()
    }

    /// Kernel at `id`: next-step states (flat, `d` per child) and conditional weights.
    pub fn kernel(&self, id: usize) -> (Vec<S>, Vec<S>) {
        let n = &self.nodes[id];
        let pts = n
            .children
            .iter()
            .flat_map(|&c| self.nodes[c].value.iter().copied())
            .collect();
        (pts, n.cond.clone())
    }

    /// Conditional law of the whole future `x_{t+1:T}` given the prefix at `id`.
    pub fn future(&self, id: usize) -> (Vec<S>, Vec<S>) {
        let m = self.nodes[id].mass;
        let mut pts = Vec::new();
        let mut wts = Vec::new();
        let mut stack = vec![(id, Vec::<S>::new())];
        let mut out: Vec<(Vec<S>, S)> = Vec::new();
        while let Some((cur, acc)) = stack.pop() {
            let n = &self.nodes[cur];
            if n.children.is_empty() {
                out.push((acc, n.mass / m));
                continue;
            }
            for &c in n.children.iter().rev() {
                let mut a = acc.clone();
                a.extend_from_slice(&self.nodes[c].value);
                stack.push((c, a));
            }
        }
        for (p, w) in out {
            pts.extend(p);
            wts.push(w);
        }
        (pts, wts)
    }

    /// Pushes conditional weights down to the leaves.
    pub fn flatten(&self) -> PathMeasure<S> {
        let mut paths = Vec::new();
        let mut weights = Vec::new();
        let mut stack = vec![(0usize, S::one(), Vec::<S>::new())];
        while let Some((cur, w, acc)) = stack.pop() {
            let n = &self.nodes[cur];
            if n.children.is_empty() {
                paths.extend(acc);
                weights.push(w);
                continue;
            }
            for (k, &c) in n.children.iter().enumerate().rev() {
                let mut a = acc.clone();
                a.extend_from_slice(&self.nodes[c].value);
                stack.push((c, w * n.cond[k], a));
            }
        }
        PathMeasure::from_unnormalized(self.d, self.horizon, paths, weights)
            .expect("tree leaves form a valid measure")
    }
}
