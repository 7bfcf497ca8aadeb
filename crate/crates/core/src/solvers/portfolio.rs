//! Parallel portfolio: independent annealing workers that periodically
//! consult a guidance oracle, finish with local search and publish into a
//! shared best-so-far register.

use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use crate::error::Result;
use crate::num::Scalar;
use crate::problem::{Instance, Route};
use crate::rng::derive_seed;
use crate::solvers::annealing::{anneal, initial_route};
use crate::solvers::local_search::descend;
use crate::solvers::oracle::GuidanceOracle;
use crate::solvers::{dense, SolveResult, SolverConfig};

/// Seed of worker `index` under the portfolio seed.
pub fn worker_seed(seed: u64, index: usize) -> u64 {
    derive_seed(seed, &[index as u64])
}

#[derive(Clone, Debug)]
pub struct PortfolioOutcome<T> {
    pub result: SolveResult<T>,
    /// Final (route, cost) of each worker, by worker index.
    pub workers: Vec<(Route, T)>,
}

/// Best-so-far register. Ties on cost go to the lexicographically smaller
/// route, so the final content does not depend on thread scheduling.
struct BestRegister<T> {
    best: Mutex<Option<(T, Vec<usize>)>>,
}

impl<T: Scalar> BestRegister<T> {
    fn offer(&self, route: &[usize], cost: T) {
        let mut slot = self.best.lock().expect("register lock");
        let better = match slot.as_ref() {
            None => true,
            Some((c, r)) => cost < *c || (cost == *c && route < r.as_slice()),
        };
        if better {
            *slot = Some((cost, route.to_vec()));
        }
    }
}

pub fn portfolio_solve<T: Scalar, O: GuidanceOracle<T>>(
    instance: &Instance<T>,
    config: &SolverConfig,
    oracle: &O,
) -> Result<SolveResult<T>> {
    portfolio_solve_detailed(instance, config, oracle).map(|o| o.result)
}

/// Runs `config.thread_count` workers. Worker `w` anneals with seed
/// `worker_seed(config.seed, w)`, handing its best route to `oracle` every
/// `oracle_interval` temperature steps, then applies local search. Workers
/// share only the instance and the register, so the result is the same
/// however the threads are scheduled (unless the time limit cuts in).
pub fn portfolio_solve_detailed<T: Scalar, O: GuidanceOracle<T>>(
    instance: &Instance<T>,
    config: &SolverConfig,
    oracle: &O,
) -> Result<PortfolioOutcome<T>> {
    let started = Instant::now();
    config.validate()?;
    let d = dense(instance)?;
    let start = initial_route(instance, &d, config)?;
    let deadline = config.deadline(started);
    let register = BestRegister { best: Mutex::new(None) };

    let workers: Vec<(Route, T)> = thread::scope(|scope| {
        let handles: Vec<_> = (0..config.thread_count)
            .map(|w| {
                let (d, start, register) = (&d, start.clone(), &register);
                scope.spawn(move || {
                    let seed = worker_seed(config.seed, w);
                    // incremental costs can drift by an ulp; publish exact sums
                    let mut publish = |route: &[usize], _: T| register.offer(route, d.path_cost(route));
                    let outcome = anneal(instance, d, start, config, seed, Some(oracle), deadline, &mut publish);
                    let mut route = outcome.best;
                    let cost = descend(d, &mut route, &config.moves);
                    register.offer(&route, cost);
                    (Route::new(route), cost)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("portfolio worker panicked")).collect()
    });

    let (cost, route) = register.best.into_inner().expect("register lock").expect("workers publish");
    Ok(PortfolioOutcome {
        result: SolveResult {
            route: Route::new(route),
            cost,
            solver_id: "portfolio".into(),
            seed: config.seed,
            runtime_seconds: started.elapsed().as_secs_f64(),
            optimal: false,
            lower_bound: None,
        },
        workers,
    })
}
