use std::cmp::Ordering;

use super::plan::TransportPlan;
use crate::scalar::{powp, Scalar};

/// Indices of `x` in ascending order.
pub(crate) fn argsort<S: Scalar>(x: &[S]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&i, &j| x[i].partial_cmp(&x[j]).unwrap_or(Ordering::Equal));
    idx
}

/// Monotone (quantile) coupling of two sorted 1-D measures given by index
/// orders; calls `emit(i, j, mass)` for each block.
pub(crate) fn quantile_merge<S: Scalar>(
    wa: &[S],
    oa: &[usize],
    wb: &[S],
    ob: &[usize],
    mut emit: impl FnMut(usize, usize, S),
) {
    let (mut i, mut j) = (0, 0);
    let mut ra = wa[oa[0]];
    let mut rb = wb[ob[0]];
    loop {
        let m = ra.min(rb);
        emit(oa[i], ob[j], m);
        ra = ra - m;
        rb = rb - m;
        let last_a = i + 1 == oa.len();
        let last_b = j + 1 == ob.len();
        if last_a && last_b {
            break;
        }
        // Advance whichever side is exhausted; round-off leftovers are
        // dropped at the final atom of either side.
        if (ra <= rb && !last_a) || last_b {
            i += 1;
            ra = wa[oa[i]];
            if last_b {
                rb = S::infinity();
            }
        } else {
            j += 1;
            rb = wb[ob[j]];
            if last_a {
                ra = S::infinity();
            }
        }
    }
}

/// `W_p^p` between two 1-D measures via the quantile coupling.
pub(crate) fn cost_1d<S: Scalar>(xa: &[S], wa: &[S], xb: &[S], wb: &[S], p: S) -> S {
    let oa = argsort(xa);
    let ob = argsort(xb);
    cost_1d_sorted(xa, wa, &oa, xb, wb, &ob, p)
}

pub(crate) fn cost_1d_sorted<S: Scalar>(
    xa: &[S],
    wa: &[S],
    oa: &[usize],
    xb: &[S],
    wb: &[S],
    ob: &[usize],
    p: S,
) -> S {
    let mut acc = S::zero();
    quantile_merge(wa, oa, wb, ob, |i, j, m| {
        if m > S::zero() && m.is_finite() {
            acc = acc + m * powp(xa[i] - xb[j], p);
        }
    });
    acc
}

pub(crate) fn plan_1d<S: Scalar>(xa: &[S], wa: &[S], xb: &[S], wb: &[S], p: S) -> TransportPlan<S> {
    let oa = argsort(xa);
    let ob = argsort(xb);
    let mut entries = Vec::new();
    let mut objective = S::zero();
    quantile_merge(wa, &oa, wb, &ob, |i, j, m| {
        if m > S::zero() && m.is_finite() {
            entries.push((i, j, m));
            objective = objective + m * powp(xa[i] - xb[j], p);
        }
    });
    TransportPlan { entries, objective }
}
