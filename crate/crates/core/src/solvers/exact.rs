use std::time::Instant;

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::problem::{Instance, Route};
use crate::solvers::{dense, SolveResult};

pub const BRUTE_FORCE_MAX_N: usize = 10;
pub const HELD_KARP_MAX_N: usize = 24;

/// Lexicographic successor of `perm`; false once `perm` is the last one.
fn next_permutation(perm: &mut [usize]) -> bool {
    let Some(i) = perm.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = perm.iter().rposition(|&x| x > perm[i]).expect("a larger element exists");
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}

/// Exhaustive enumeration of open paths. Only the orientation starting at
/// the smaller endpoint is scored; ties keep the lexicographically first
/// route.
pub fn brute_force<T: Scalar>(instance: &Instance<T>) -> Result<SolveResult<T>> {
    let started = Instant::now();
    let n = instance.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge { n, max: BRUTE_FORCE_MAX_N });
    }
    let d = dense(instance)?;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = perm.clone();
    let mut best_cost = d.path_cost(&perm);
    while next_permutation(&mut perm) {
        if perm[0] > perm[n - 1] {
            continue;
        }
        let cost = d.path_cost(&perm);
        if cost < best_cost {
            best_cost = cost;
            best.copy_from_slice(&perm);
        }
    }
    Ok(SolveResult {
        route: Route::new(best),
        cost: best_cost,
        solver_id: "brute_force".into(),
        seed: 0,
        runtime_seconds: started.elapsed().as_secs_f64(),
        optimal: true,
        lower_bound: Some(best_cost),
    })
}

/// Position of `mask` (which excludes bit `last`) among the `n − 1`-bit
/// subsets of the other nodes.
#[inline(always)]
fn squeeze(mask: usize, last: usize) -> usize {
    (mask & ((1 << last) - 1)) | ((mask >> (last + 1)) << last)
}

/// Dynamic program over (visited set, last node) with every node allowed
/// as the start: singleton sets cost zero, and the answer is the best
/// full-set state.
pub fn held_karp<T: Scalar>(instance: &Instance<T>) -> Result<SolveResult<T>> {
    let started = Instant::now();
    let n = instance.n();
    if n > HELD_KARP_MAX_N {
        return Err(Error::TooLarge { n, max: HELD_KARP_MAX_N });
    }
    let d = dense(instance)?;
    let half = 1usize << (n - 1);
    let full = (1usize << n) - 1;
    // cost[last * half + squeeze(set without last, last)]
    let mut cost = vec![T::infinity(); n * half];
    let at = |set: usize, last: usize| last * half + squeeze(set & !(1 << last), last);

    for set in 1..=full {
        let mut lasts = set;
        while lasts != 0 {
            let last = lasts.trailing_zeros() as usize;
            lasts &= lasts - 1;
            let rest = set & !(1 << last);
            if rest == 0 {
                cost[at(set, last)] = T::zero();
                continue;
            }
            let mut best = T::infinity();
            let mut prevs = rest;
            while prevs != 0 {
                let prev = prevs.trailing_zeros() as usize;
                prevs &= prevs - 1;
                let c = cost[at(rest, prev)] + d.at(prev, last);
                if c < best {
                    best = c;
                }
            }
            cost[at(set, last)] = best;
        }
    }

    let mut end = 0;
    for last in 1..n {
        if cost[at(full, last)] < cost[at(full, end)] {
            end = last;
        }
    }
    // Walk back, picking the lowest predecessor that reproduces each value.
    let mut reversed = vec![end];
    let mut set = full;
    let mut last = end;
    while set != 1 << last {
        let rest = set & !(1 << last);
        let target = cost[at(set, last)];
        let prev = (0..n)
            .filter(|&p| rest & (1 << p) != 0)
            .find(|&p| cost[at(rest, p)] + d.at(p, last) == target)
            .expect("dynamic program value has a witness");
        reversed.push(prev);
        set = rest;
        last = prev;
    }
    reversed.reverse();
    let route = Route::new(reversed).canonical();
    let route_cost = d.path_cost(route.order());
    Ok(SolveResult {
        route,
        cost: route_cost,
        solver_id: "held_karp".into(),
        seed: 0,
        runtime_seconds: started.elapsed().as_secs_f64(),
        optimal: true,
        lower_bound: Some(route_cost.min(cost[at(full, end)])),
    })
}
