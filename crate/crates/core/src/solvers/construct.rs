use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::problem::{DenseCosts, Instance, Route};
use crate::solvers::dense;

/// Greedy walk from `start` to the cheapest unvisited node, ties to the
/// lowest index.
pub fn nearest_neighbor<T: Scalar>(instance: &Instance<T>, start: usize) -> Result<Route> {
    let n = instance.n();
    if start >= n {
        return Err(Error::BadStart { start, n });
    }
    let d = dense(instance)?;
    Ok(Route::new(greedy_walk(&d, start)))
}

pub(crate) fn greedy_walk<T: Scalar>(d: &DenseCosts<T>, start: usize) -> Vec<usize> {
    let n = d.n;
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut cur = start;
    visited[cur] = true;
    order.push(cur);
    for _ in 1..n {
        let mut next = usize::MAX;
        for v in 0..n {
            if !visited[v] && (next == usize::MAX || d.at(cur, v) < d.at(cur, next)) {
                next = v;
            }
        }
        visited[next] = true;
        order.push(next);
        cur = next;
    }
    order
}

/// Cheapest nearest-neighbor route over every start node, ties to the
/// lowest start.
pub fn best_nearest_neighbor<T: Scalar>(instance: &Instance<T>) -> Result<Route> {
    let d = dense(instance)?;
    let mut best: Option<(T, Vec<usize>)> = None;
    for start in 0..d.n {
        let walk = greedy_walk(&d, start);
        let cost = d.path_cost(&walk);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, walk));
        }
    }
    Ok(Route::new(best.map(|(_, r)| r).unwrap_or_default()))
}
