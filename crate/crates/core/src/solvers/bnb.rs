//! Depth-first branch and bound over partial open paths.
//!
//! A partial path ending at `e` with unvisited set `U` still needs `|U|`
//! edges. Two admissible bounds on their total are combined:
//!
//! * every remaining edge enters a distinct node of `U`, so the sum over
//!   `u ∈ U` of the cheapest edge from `u` into `U ∪ {e}` is a bound;
//! * counting endpoints, `e` and the final node have degree one and every
//!   other node of `U` degree two, so half of
//!   `cheapest(e) + Σ (first + second cheapest)(u) − max second(u)` is a
//!   bound as well.
//!
//! Only paths whose first node is smaller than their last are completed,
//! which removes mirrored duplicates.

use std::time::Instant;

use crate::error::Result;
use crate::num::{improvement_threshold, Scalar};
use crate::problem::{DenseCosts, Instance, Route};
use crate::solvers::construct::greedy_walk;
use crate::solvers::{checked_route, dense, Deadline, SolveResult, SolverConfig, DEADLINE_CHECK_INTERVAL};

/// Exact search with a time limit. `optimal` is set when the search space
/// was exhausted; otherwise the incumbent comes back with the smallest
/// bound among unexplored nodes as `lower_bound`.
///
/// Starts from `config.warm_start` when given, else the nearest-neighbor
/// route from node 0.
pub fn branch_and_bound<T: Scalar>(instance: &Instance<T>, config: &SolverConfig) -> Result<SolveResult<T>> {
    let started = Instant::now();
    config.validate()?;
    let d = dense(instance)?;
    let n = instance.n();
    let incumbent = match &config.warm_start {
        Some(route) => {
            checked_route(instance, route)?;
            route.clone().canonical().into_inner()
        }
        None => Route::new(greedy_walk(&d, 0)).canonical().into_inner(),
    };
    let mut search = Search {
        incumbent_cost: d.path_cost(&incumbent),
        incumbent,
        sorted: (0..n)
            .map(|u| {
                let mut others: Vec<usize> = (0..n).filter(|&v| v != u).collect();
                others.sort_by(|&a, &b| d.at(u, a).partial_cmp(&d.at(u, b)).unwrap().then(a.cmp(&b)));
                others
            })
            .collect(),
        d,
        deadline: config.deadline(started),
        expanded: 0,
        timed_out: false,
        open_bound: T::infinity(),
        visited: vec![false; n],
        path: Vec::with_capacity(n),
    };
    if n > 1 {
        // the smaller endpoint comes first, so the last node never starts
        for start in 0..n - 1 {
            search.visited[start] = true;
            search.path.push(start);
            search.dfs(T::zero());
            search.path.pop();
            search.visited[start] = false;
        }
    }
    let lower_bound = if search.timed_out {
        search.open_bound.min(search.incumbent_cost)
    } else {
        search.incumbent_cost
    };
    Ok(SolveResult {
        route: Route::new(search.incumbent),
        cost: search.incumbent_cost,
        solver_id: "branch_and_bound".into(),
        seed: config.seed,
        runtime_seconds: started.elapsed().as_secs_f64(),
        optimal: !search.timed_out,
        lower_bound: Some(lower_bound),
    })
}

struct Search<T> {
    d: DenseCosts<T>,
    /// Other nodes of each node, cheapest first.
    sorted: Vec<Vec<usize>>,
    incumbent: Vec<usize>,
    incumbent_cost: T,
    deadline: Deadline,
    expanded: u64,
    timed_out: bool,
    /// Smallest bound among nodes left unexplored after the deadline.
    open_bound: T,
    visited: Vec<bool>,
    path: Vec<usize>,
}

impl<T: Scalar> Search<T> {
    fn dfs(&mut self, cost: T) {
        let n = self.d.n;
        let start = self.path[0];
        let end = *self.path.last().unwrap();
        if self.path.len() == n {
            if start < end && cost < self.incumbent_cost - improvement_threshold(self.incumbent_cost) {
                self.incumbent.copy_from_slice(&self.path);
                self.incumbent_cost = cost;
            }
            return;
        }
        // some unvisited node must end the path and be larger than the start
        if !(start + 1..n).any(|v| !self.visited[v]) {
            return;
        }
        let bound = cost + self.remaining_bound(end);
        self.expanded += 1;
        if !self.timed_out && self.expanded % DEADLINE_CHECK_INTERVAL == 0 && self.deadline.expired() {
            self.timed_out = true;
        }
        if self.timed_out {
            self.open_bound = self.open_bound.min(bound);
            return;
        }
        if bound >= self.incumbent_cost - improvement_threshold(self.incumbent_cost) {
            return;
        }
        for k in 0..n - 1 {
            let next = self.sorted[end][k];
            if self.visited[next] {
                continue;
            }
            self.visited[next] = true;
            self.path.push(next);
            self.dfs(cost + self.d.at(end, next));
            self.path.pop();
            self.visited[next] = false;
        }
    }

    fn remaining_bound(&self, end: usize) -> T {
        let n = self.d.n;
        let open = |v: usize| !self.visited[v] || v == end;
        let mut entering = T::zero();
        let mut degree_sum = T::zero();
        let mut max_second = T::neg_infinity();
        let mut unvisited = 0;
        for u in (0..n).filter(|&u| !self.visited[u]) {
            unvisited += 1;
            let mut cheapest = self.sorted[u].iter().copied().filter(|&v| open(v));
            let first = self.d.at(u, cheapest.next().expect("end is always open"));
            entering = entering + first;
            if let Some(v) = cheapest.next() {
                let second = self.d.at(u, v);
                degree_sum = degree_sum + first + second;
                max_second = max_second.max(second);
            }
        }
        if unvisited < 2 {
            return entering;
        }
        let from_end = self.sorted[end].iter().copied().find(|&v| !self.visited[v]).map(|v| self.d.at(end, v)).unwrap();
        let half_degree = (from_end + degree_sum - max_second) * T::of(0.5);
        entering.max(half_degree)
    }
}
