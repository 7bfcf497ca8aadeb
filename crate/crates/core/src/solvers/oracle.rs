//! Guidance oracles: external proposal sources consulted by portfolio
//! workers. A proposal may jump far from the worker's current route; the
//! worker decides whether to adopt it.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::num::Scalar;
use crate::problem::{Instance, Route};
use crate::rng::SolverRng;

pub trait GuidanceOracle<T>: Sync {
    /// A candidate full route derived from `incumbent`, or `None`. Given the
    /// same rng state the answer must be the same.
    fn propose(&self, instance: &Instance<T>, incumbent: &Route, rng: &mut SolverRng) -> Option<Route>;
}

/// Never proposes anything.
#[derive(Clone, Copy, Debug, Default)]
pub struct NullOracle;

impl<T> GuidanceOracle<T> for NullOracle {
    fn propose(&self, _: &Instance<T>, _: &Route, _: &mut SolverRng) -> Option<Route> {
        None
    }
}

/// Ruin and recreate: cut out a random contiguous segment of `⌈n/5⌉` nodes
/// and reinsert them one by one, in random order, at their cheapest position.
#[derive(Clone, Copy, Debug, Default)]
pub struct RuinAndRecreate;

impl<T: Scalar> GuidanceOracle<T> for RuinAndRecreate {
    fn propose(&self, instance: &Instance<T>, incumbent: &Route, rng: &mut SolverRng) -> Option<Route> {
        let n = incumbent.len();
        if n < 3 {
            return None;
        }
        let cost = |a: usize, b: usize| instance.costs.get(a, b).expect("metric-complete instance");
        let len = n.div_ceil(5);
        let start = rng.gen_range(0..=n - len);
        let order = incumbent.order();
        let mut removed = order[start..start + len].to_vec();
        let mut kept: Vec<usize> = order[..start].iter().chain(&order[start + len..]).copied().collect();
        removed.shuffle(rng);
        for v in removed {
            if kept.is_empty() {
                kept.push(v);
                continue;
            }
            let m = kept.len();
            let mut best_pos = 0;
            let mut best = cost(v, kept[0]);
            for pos in 1..=m {
                let added = if pos == m {
                    cost(kept[m - 1], v)
                } else {
                    cost(kept[pos - 1], v) + cost(v, kept[pos]) - cost(kept[pos - 1], kept[pos])
                };
                if added < best {
                    best = added;
                    best_pos = pos;
                }
            }
            kept.insert(best_pos, v);
        }
        Some(Route::new(kept))
    }
}
