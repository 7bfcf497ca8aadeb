use crate::error::Result;
use crate::num::{improvement_threshold, Scalar};
use crate::problem::{DenseCosts, Instance, Route};
use crate::solvers::moves::{apply_two_opt, two_opt_delta, OrOpt};
use crate::solvers::{checked_route, dense, MoveSet, SolverConfig};

/// First-improvement descent alternating 2-opt and Or-opt passes until a
/// full round over the enabled moves changes nothing.
pub fn local_search<T: Scalar>(instance: &Instance<T>, route: &Route, config: &SolverConfig) -> Result<Route> {
    checked_route(instance, route)?;
    let d = dense(instance)?;
    let mut order = route.order().to_vec();
    descend(&d, &mut order, &config.moves);
    Ok(Route::new(order))
}

/// Improves `order` in place; returns the final cost.
pub(crate) fn descend<T: Scalar>(d: &DenseCosts<T>, order: &mut [usize], moves: &MoveSet) -> T {
    let mut cost = d.path_cost(order);
    if order.len() < 3 {
        return cost;
    }
    loop {
        let mut improved = false;
        if moves.two_opt {
            improved |= two_opt_pass(d, order, &mut cost);
        }
        for (enabled, len) in [(moves.or_opt_1, 1), (moves.or_opt_2, 2)] {
            if enabled {
                improved |= or_opt_pass(d, order, &mut cost, len);
            }
        }
        if !improved {
            return d.path_cost(order);
        }
    }
}

fn two_opt_pass<T: Scalar>(d: &DenseCosts<T>, order: &mut [usize], cost: &mut T) -> bool {
    let n = order.len();
    let mut improved = false;
    for i in 0..n - 1 {
        for j in i + 1..n {
            let delta = two_opt_delta(d, order, i, j);
            if delta < -improvement_threshold(*cost) {
                apply_two_opt(order, i, j);
                *cost = *cost + delta;
                improved = true;
            }
        }
    }
    improved
}

fn or_opt_pass<T: Scalar>(d: &DenseCosts<T>, order: &mut [usize], cost: &mut T, len: usize) -> bool {
    let n = order.len();
    if len >= n {
        return false;
    }
    let mut improved = false;
    for start in 0..=n - len {
        for insert_at in 0..=n - len {
            for reversed in [false, true] {
                let mv = OrOpt { start, len, insert_at, reversed };
                if (reversed && len == 1) || mv.is_noop() {
                    continue;
                }
                let delta = mv.delta(d, order);
                if delta < -improvement_threshold(*cost) {
                    mv.apply(order);
                    *cost = *cost + delta;
                    improved = true;
                }
            }
        }
    }
    improved
}
