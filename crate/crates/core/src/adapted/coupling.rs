use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{DisintegrationTree, PathMeasure};
use crate::scalar::{dist_p, Scalar};

/// Joint weights on pairs of atoms `(left index, right index, mass)`.
#[derive(Debug, Clone)]
pub struct Coupling<'a, S = f64> {
    left: &'a PathMeasure<S>,
    right: &'a PathMeasure<S>,
    atoms: Vec<(usize, usize, S)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Right prefix independent of the left future, given the left prefix.
    LeftToRight,
    RightToLeft,
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub direction: Direction,
    pub t: usize,
    pub left_prefix: Vec<f64>,
    pub right_prefix: Vec<f64>,
    pub amount: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BicausalReport {
    pub bicausal: bool,
    pub worst: Option<Violation>,
}

pub const BICAUSAL_TOL: f64 = 1e-7;

impl<'a, S: Scalar> Coupling<'a, S> {
    /// Validates marginals within the weight tolerance.
    pub fn new(left: &'a PathMeasure<S>, right: &'a PathMeasure<S>, atoms: Vec<(usize, usize, S)>) -> Result<Self> {
        left.same_shape(right)?;
        let c = Coupling { left, right, atoms };
        if let Some(i) = c.atoms.iter().position(|a| a.0 >= left.len() || a.1 >= right.len() || !(a.2 > S::zero())) {
            return Err(Error::Weights(format!("coupling atom {i} is out of range or non-positive")));
        }
        let r = c.marginal_residual();
        if r > S::TOL {
            return Err(Error::Weights(format!("coupling marginals off by {r:e}")));
        }
        Ok(c)
    }

    pub(crate) fn trusted(left: &'a PathMeasure<S>, right: &'a PathMeasure<S>, atoms: Vec<(usize, usize, S)>) -> Self {
        Coupling { left, right, atoms }
    }

    pub fn product(left: &'a PathMeasure<S>, right: &'a PathMeasure<S>) -> Result<Self> {
        let mut atoms = Vec::with_capacity(left.len() * right.len());
        for i in 0..left.len() {
            for j in 0..right.len() {
                atoms.push((i, j, left.weight(i) * right.weight(j)));
            }
        }
        Self::new(left, right, atoms)
    }

    pub fn left(&self) -> &PathMeasure<S> {
        self.left
    }

    pub fn right(&self) -> &PathMeasure<S> {
        self.right
    }

    pub fn atoms(&self) -> &[(usize, usize, S)] {
        &self.atoms
    }

    /// Largest absolute deviation of either marginal from its measure.
    pub fn marginal_residual(&self) -> f64 {
        let mut l = vec![0.0; self.left.len()];
        let mut r = vec![0.0; self.right.len()];
        for &(i, j, m) in &self.atoms {
            l[i] += m.f64();
            r[j] += m.f64();
        }
        let dl = l.iter().zip(self.left.weights()).map(|(a, b)| (a - b.f64()).abs());
        let dr = r.iter().zip(self.right.weights()).map(|(a, b)| (a - b.f64()).abs());
        dl.chain(dr).fold(0.0, f64::max)
    }

    /// `Σ π(x, y) Σ_t |x_t - y_t|^p`.
    pub fn adapted_cost(&self, p: S) -> S {
        let horizon = self.left.horizon();
        self.atoms
            .iter()
            .map(|&(i, j, m)| {
                let c: S = (0..horizon)
                    .map(|t| dist_p(self.left.step(i, t), self.right.step(j, t), p))
                    .sum();
                m * c
            })
            .sum()
    }

    /// Probability that the two paths differ.
    pub fn mismatch(&self) -> S {
        self.atoms
            .iter()
            .filter(|&&(i, j, _)| self.left.path(i).iter().zip(self.right.path(j)).any(|(a, b)| a.key() != b.key()))
            .map(|a| a.2)
            .sum()
    }

    /// Checks both conditional-independence factorizations at every time.
    pub fn verify_bicausal(&self) -> BicausalReport {
        let lt = DisintegrationTree::build(self.left);
        let rt = DisintegrationTree::build(self.right);
        let la = ancestors(&lt, self.left.len());
        let ra = ancestors(&rt, self.right.len());
        let horizon = self.left.horizon();
        let mut worst: Option<Violation> = None;
        for t in 1..horizon {
            for dir in [Direction::LeftToRight, Direction::RightToLeft] {
                let (own_tree, own_anc, own_measure, other_anc) = match dir {
                    Direction::LeftToRight => (&lt, &la, self.left, &ra),
                    Direction::RightToLeft => (&rt, &ra, self.right, &la),
                };
                // joint[(own atom, other node)] and prefix[(own node, other node)]
                let mut joint: HashMap<(usize, usize), f64> = HashMap::new();
                let mut prefix: HashMap<(usize, usize), f64> = HashMap::new();
                for &(i, j, m) in &self.atoms {
                    let (own, other) = match dir {
                        Direction::LeftToRight => (i, j),
                        Direction::RightToLeft => (j, i),
                    };
                    let b = other_anc[t][other];
                    *joint.entry((own, b)).or_insert(0.0) += m.f64();
                    *prefix.entry((own_anc[t][own], b)).or_insert(0.0) += m.f64();
                }
                // Pairs (own atom, other node) absent from `joint` still need
                // checking when the prefix pair carries mass.
                let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
                for own in 0..own_measure.len() {
                    members.entry(own_anc[t][own]).or_default().push(own);
                }
                let mut keys: Vec<&(usize, usize)> = prefix.keys().collect();
                keys.sort();
                for &(a, b) in keys {
                    let ma = own_tree.node(a).mass.f64();
                    let pab = prefix[&(a, b)];
                    for &own in &members[&a] {
                        let pib = joint.get(&(own, b)).copied().unwrap_or(0.0);
                        let w = own_measure.weight(own).f64();
                        let amount = (pib / ma - (w / ma) * (pab / ma)).abs();
                        if worst.as_ref().is_none_or(|v| amount > v.amount) {
                            let other_tree = match dir {
                                Direction::LeftToRight => &rt,
                                Direction::RightToLeft => &lt,
                            };
                            let ap: Vec<f64> = own_tree.prefix(a).iter().map(|x| x.f64()).collect();
                            let bp: Vec<f64> = other_tree.prefix(b).iter().map(|x| x.f64()).collect();
                            let (left_prefix, right_prefix) = match dir {
                                Direction::LeftToRight => (ap, bp),
                                Direction::RightToLeft => (bp, ap),
                            };
                            worst = Some(Violation {
                                direction: dir,
                                t,
                                left_prefix,
                                right_prefix,
                                amount,
                            });
                        }
                    }
                }
            }
        }
        BicausalReport {
            bicausal: worst.as_ref().is_none_or(|v| v.amount <= BICAUSAL_TOL),
            worst,
        }
    }
}

/// `anc[t][atom]`: id of the depth-`t` node on the atom's path.
pub(crate) fn ancestors<S: Scalar>(tree: &DisintegrationTree<S>, atoms: usize) -> Vec<Vec<usize>> {
    let horizon = tree.horizon();
    let mut anc = vec![vec![0usize; atoms]; horizon + 1];
    for &leaf in tree.level(horizon) {
        let i = tree.node(leaf).atom.expect("leaf carries an atom");
        let mut cur = leaf;
        for t in (0..=horizon).rev() {
            anc[t][i] = cur;
            if let Some(p) = tree.node(cur).parent {
                cur = p;
            }
        }
    }
    anc
}
