//! Adapted (bicausal) transport between path measures.

mod coupling;
mod dpp;
mod oracle;

pub use coupling::{BicausalReport, Coupling, Direction, Violation, BICAUSAL_TOL};
pub use dpp::ValueTable;
pub use oracle::{adapted_cost_matrix, bicausal_lp_oracle, mismatch_cost_matrix, ORACLE_MAX_PAIRS};

use crate::error::{Error, Result};
use crate::measure::{DisintegrationTree, PathMeasure};
use crate::scalar::{root, Scalar};
use dpp::{av_value, AwSolver};

fn check<S: Scalar>(mu: &PathMeasure<S>, nu: &PathMeasure<S>, p: S) -> Result<()> {
    mu.same_shape(nu)?;
    if !(p >= S::one()) || !p.is_finite() {
        return Err(Error::param("p", p, "must be a finite real >= 1"));
    }
    Ok(())
}

/// `AW_p` and an optimal bicausal coupling.
pub fn aw_p<'a, S: Scalar>(mu: &'a PathMeasure<S>, nu: &'a PathMeasure<S>, p: S) -> Result<(S, Coupling<'a, S>)> {
    check(mu, nu, p)?;
    let lt = DisintegrationTree::build(mu);
    let rt = DisintegrationTree::build(nu);
    let mut solver = AwSolver::new(&lt, &rt, p);
    let v = solver.solve()?;
    let atoms = solver.extract()?;
    Ok((root(v, p), Coupling::trusted(mu, nu, atoms)))
}

/// `AW_p` without assembling a coupling.
pub fn aw_p_value<S: Scalar>(mu: &PathMeasure<S>, nu: &PathMeasure<S>, p: S) -> Result<S> {
    check(mu, nu, p)?;
    aw_p_trees(&DisintegrationTree::build(mu), &DisintegrationTree::build(nu), p)
}

/// `AW_p` between already disintegrated measures.
pub fn aw_p_trees<S: Scalar>(lt: &DisintegrationTree<S>, rt: &DisintegrationTree<S>, p: S) -> Result<S> {
    if lt.dim() != rt.dim() || lt.horizon() != rt.horizon() {
        return Err(Error::Dimension("trees differ in shape".into()));
    }
    let mut solver = AwSolver::new(lt, rt, p);
    Ok(root(solver.solve()?, p))
}

/// Adapted total variation: least mismatch probability over bicausal couplings.
pub fn av<S: Scalar>(mu: &PathMeasure<S>, nu: &PathMeasure<S>) -> Result<S> {
    mu.same_shape(nu)?;
    let lt = DisintegrationTree::build(mu);
    let rt = DisintegrationTree::build(nu);
    Ok(av_value(&lt, &rt, lt.root(), rt.root())?.max(S::zero()).min(S::one()))
}
