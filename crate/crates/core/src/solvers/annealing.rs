use std::time::Instant;

use rand::Rng;

use crate::error::Result;
use crate::num::{improvement_threshold, Scalar};
use crate::problem::{DenseCosts, Instance, Route};
use crate::rng::{derive_seed, rng_from_seed, SolverRng};
use crate::solvers::construct::greedy_walk;
use crate::solvers::moves::{apply_two_opt, two_opt_delta, OrOpt};
use crate::solvers::oracle::GuidanceOracle;
use crate::solvers::{checked_route, dense, Deadline, SolveResult, SolverConfig, DEADLINE_CHECK_INTERVAL};

/// Stream tag separating the oracle's generator from the move generator.
const ORACLE_STREAM: u64 = 0x6f72_6163_6c65;

/// Simulated annealing from the nearest-neighbor route of node 0 (or the
/// configured warm start). Proposals are random 2-opt reversals or Or-opt
/// relocations with equal probability, accepted by the Metropolis rule
/// under geometric cooling. Returns the best route seen.
pub fn simulated_annealing<T: Scalar>(instance: &Instance<T>, config: &SolverConfig) -> Result<SolveResult<T>> {
    let started = Instant::now();
    config.validate()?;
    let d = dense(instance)?;
    let start = initial_route(instance, &d, config)?;
    let outcome = anneal(instance, &d, start, config, config.seed, None, config.deadline(started), &mut |_, _| {});
    Ok(SolveResult {
        route: Route::new(outcome.best),
        cost: outcome.best_cost,
        solver_id: "simulated_annealing".into(),
        seed: config.seed,
        runtime_seconds: started.elapsed().as_secs_f64(),
        optimal: false,
        lower_bound: None,
    })
}

pub(crate) fn initial_route<T: Scalar>(
    instance: &Instance<T>,
    d: &DenseCosts<T>,
    config: &SolverConfig,
) -> Result<Vec<usize>> {
    match &config.warm_start {
        Some(route) => {
            checked_route(instance, route)?;
            Ok(route.order().to_vec())
        }
        None => Ok(greedy_walk(d, 0)),
    }
}

pub(crate) struct AnnealOutcome<T> {
    pub best: Vec<usize>,
    pub best_cost: T,
}

/// The annealing loop. With an oracle, every `oracle_interval` temperature
/// steps the worker's best route is sent to it and a proposal is adopted
/// as the current route under the Metropolis rule. `on_improve` sees each
/// new best route.
#[allow(clippy::too_many_arguments)]
pub(crate) fn anneal<T: Scalar>(
    instance: &Instance<T>,
    d: &DenseCosts<T>,
    start: Vec<usize>,
    config: &SolverConfig,
    seed: u64,
    oracle: Option<&dyn GuidanceOracle<T>>,
    deadline: Deadline,
    on_improve: &mut dyn FnMut(&[usize], T),
) -> AnnealOutcome<T> {
    let n = start.len();
    let mut current = start;
    let mut current_cost = d.path_cost(&current);
    let mut best = current.clone();
    let mut best_cost = current_cost;
    on_improve(&best, best_cost);

    let schedule = &config.annealing;
    let initial_temperature = schedule.initial_temperature_factor * d.mean_edge_cost().as_f64();
    if n < 3 || !(initial_temperature > 0.0) {
        return AnnealOutcome { best, best_cost };
    }
    let final_temperature = initial_temperature * schedule.final_temperature_ratio;
    let moves_per_step = schedule.moves_per_temperature_factor * n;

    let mut rng = rng_from_seed(seed);
    let mut oracle_rng = rng_from_seed(derive_seed(seed, &[ORACLE_STREAM]));
    let mut temperature = initial_temperature;
    let mut moves: u64 = 0;
    let mut step: usize = 0;
    'cooling: while temperature > final_temperature {
        for _ in 0..moves_per_step {
            moves += 1;
            if moves % DEADLINE_CHECK_INTERVAL == 0 && deadline.expired() {
                break 'cooling;
            }
            let accept = |delta: T, rng: &mut SolverRng| -> bool {
                delta <= T::zero() || rng.gen::<f64>() < (-delta.as_f64() / temperature).exp()
            };
            if rng.gen_bool(0.5) {
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                let (i, j) = (i.min(j), i.max(j));
                let delta = two_opt_delta(d, &current, i, j);
                if accept(delta, &mut rng) {
                    apply_two_opt(&mut current, i, j);
                    current_cost = current_cost + delta;
                }
            } else {
                let len = if n > 3 && rng.gen_bool(0.5) { 2 } else { 1 };
                let slots = n - len + 1;
                let start = rng.gen_range(0..slots);
                let mut insert_at = rng.gen_range(0..slots - 1);
                if insert_at >= start {
                    insert_at += 1;
                }
                let reversed = len > 1 && rng.gen_bool(0.5);
                let mv = OrOpt { start, len, insert_at, reversed };
                let delta = mv.delta(d, &current);
                if accept(delta, &mut rng) {
                    mv.apply(&mut current);
                    current_cost = current_cost + delta;
                }
            }
            if current_cost < best_cost - improvement_threshold(best_cost) {
                best.copy_from_slice(&current);
                best_cost = current_cost;
                on_improve(&best, best_cost);
            }
        }
        // resynchronize against drift from incremental deltas
        current_cost = d.path_cost(&current);
        best_cost = d.path_cost(&best);
        temperature *= schedule.cooling_rate;
        step += 1;

        if let Some(oracle) = oracle {
            if step % config.oracle_interval == 0 {
                if let Some(proposal) = oracle.propose(instance, &Route::new(best.clone()), &mut oracle_rng) {
                    debug_assert_eq!(proposal.len(), n);
                    let proposal_cost = d.path_cost(proposal.order());
                    let delta = proposal_cost - current_cost;
                    if delta <= T::zero() || oracle_rng.gen::<f64>() < (-delta.as_f64() / temperature).exp() {
                        current = proposal.into_inner();
                        current_cost = proposal_cost;
                        if current_cost < best_cost - improvement_threshold(best_cost) {
                            best.copy_from_slice(&current);
                            best_cost = current_cost;
                            on_improve(&best, best_cost);
                        }
                    }
                }
            }
        }
    }
    best_cost = d.path_cost(&best);
    AnnealOutcome { best, best_cost }
}
