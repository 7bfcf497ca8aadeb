//! Solvers for the open-route TSP on metric-completed instances.
//!
//! Every solver needs a complete cost matrix; run
//! [`metric_completion`](crate::completion::metric_completion) first on
//! sparse graphs. All solvers are deterministic functions of the instance,
//! the configuration (including its seed) and the guidance oracle, as long
//! as the time limit is not what stops them.

mod annealing;
mod bnb;
mod construct;
mod exact;
mod local_search;
pub(crate) mod moves;
mod oracle;
mod portfolio;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

pub use annealing::simulated_annealing;
pub use bnb::branch_and_bound;
pub use construct::{best_nearest_neighbor, nearest_neighbor};
pub use exact::{brute_force, held_karp, BRUTE_FORCE_MAX_N, HELD_KARP_MAX_N};
pub use local_search::local_search;
pub use oracle::{GuidanceOracle, NullOracle, RuinAndRecreate};
pub use portfolio::{portfolio_solve, portfolio_solve_detailed, worker_seed, PortfolioOutcome};

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::problem::{DenseCosts, Instance, Route};

/// Geometric cooling schedule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealingSchedule {
    /// Initial temperature as a multiple of the mean edge cost.
    pub initial_temperature_factor: f64,
    /// Temperature multiplier per step, in (0, 1).
    pub cooling_rate: f64,
    /// Moves per temperature step, as a multiple of the node count.
    pub moves_per_temperature_factor: usize,
    /// Annealing stops once the temperature falls below this fraction of
    /// the initial temperature.
    pub final_temperature_ratio: f64,
}

impl Default for AnnealingSchedule {
    fn default() -> Self {
        Self {
            initial_temperature_factor: 1.0,
            cooling_rate: 0.995,
            moves_per_temperature_factor: 50,
            final_temperature_ratio: 1e-3,
        }
    }
}

/// Moves enabled in [`local_search`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveSet {
    pub two_opt: bool,
    /// Relocate single nodes.
    pub or_opt_1: bool,
    /// Relocate pairs of consecutive nodes.
    pub or_opt_2: bool,
}

impl Default for MoveSet {
    fn default() -> Self {
        Self { two_opt: true, or_opt_1: true, or_opt_2: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Wall-clock budget. `f64::INFINITY` disables the limit.
    pub time_limit_seconds: f64,
    pub seed: u64,
    /// Portfolio workers.
    pub thread_count: usize,
    pub annealing: AnnealingSchedule,
    pub moves: MoveSet,
    /// Portfolio workers consult the guidance oracle every this many
    /// temperature steps.
    pub oracle_interval: usize,
    /// Initial route for branch and bound, annealing and the portfolio.
    pub warm_start: Option<Route>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            time_limit_seconds: 5.0,
            seed: 0,
            thread_count: 4,
            annealing: AnnealingSchedule::default(),
            moves: MoveSet::default(),
            oracle_interval: 10,
            warm_start: None,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.time_limit_seconds > 0.0) {
            return bad(format!("time limit must be positive, got {}", self.time_limit_seconds));
        }
        if self.thread_count == 0 {
            return bad("thread count must be positive".into());
        }
        let a = &self.annealing;
        if !(a.initial_temperature_factor > 0.0 && a.initial_temperature_factor.is_finite()) {
            return bad(format!("initial temperature factor must be positive, got {}", a.initial_temperature_factor));
        }
        if !(a.cooling_rate > 0.0 && a.cooling_rate < 1.0) {
            return bad(format!("cooling rate must be in (0, 1), got {}", a.cooling_rate));
        }
        if a.moves_per_temperature_factor == 0 {
            return bad("moves per temperature must be positive".into());
        }
        if !(a.final_temperature_ratio > 0.0 && a.final_temperature_ratio < 1.0) {
            return bad(format!("final temperature ratio must be in (0, 1), got {}", a.final_temperature_ratio));
        }
        if self.oracle_interval == 0 {
            return bad("oracle interval must be positive".into());
        }
        Ok(())
    }

    pub(crate) fn deadline(&self, start: Instant) -> Deadline {
        if self.time_limit_seconds.is_finite() {
            Deadline(Some(start + Duration::from_secs_f64(self.time_limit_seconds)))
        } else {
            Deadline(None)
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Deadline(Option<Instant>);

impl Deadline {
    pub(crate) fn expired(&self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}

/// Deadline checks happen at least this often, in moves or search nodes.
pub(crate) const DEADLINE_CHECK_INTERVAL: u64 = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult<T> {
    pub route: Route,
    pub cost: T,
    pub solver_id: String,
    pub seed: u64,
    pub runtime_seconds: f64,
    /// True only for exact solvers that finished their search.
    pub optimal: bool,
    /// Proven lower bound on the optimum, when the solver produces one.
    pub lower_bound: Option<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolverKind {
    BruteForce,
    HeldKarp,
    BranchAndBound,
    /// Best nearest-neighbor route over all start nodes.
    NearestNeighbor,
    /// Nearest neighbor from node 0 followed by local search.
    LocalSearch,
    SimulatedAnnealing,
    /// Portfolio with the ruin-and-recreate guidance oracle.
    Portfolio,
}

impl SolverKind {
    pub const ALL: [SolverKind; 7] = [
        SolverKind::BruteForce,
        SolverKind::HeldKarp,
        SolverKind::BranchAndBound,
        SolverKind::NearestNeighbor,
        SolverKind::LocalSearch,
        SolverKind::SimulatedAnnealing,
        SolverKind::Portfolio,
    ];

    pub fn id(self) -> &'static str {
        match self {
            SolverKind::BruteForce => "brute_force",
            SolverKind::HeldKarp => "held_karp",
            SolverKind::BranchAndBound => "branch_and_bound",
            SolverKind::NearestNeighbor => "nearest_neighbor",
            SolverKind::LocalSearch => "local_search",
            SolverKind::SimulatedAnnealing => "simulated_annealing",
            SolverKind::Portfolio => "portfolio",
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, SolverKind::BruteForce | SolverKind::HeldKarp | SolverKind::BranchAndBound)
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL.into_iter().find(|k| k.id() == s).ok_or_else(|| Error::UnknownSolver(s.to_string()))
    }
}

/// Runs `kind` on a metric-complete instance.
pub fn solve<T: Scalar>(kind: SolverKind, instance: &Instance<T>, config: &SolverConfig) -> Result<SolveResult<T>> {
    match kind {
        SolverKind::BruteForce => brute_force(instance),
        SolverKind::HeldKarp => held_karp(instance),
        SolverKind::BranchAndBound => branch_and_bound(instance, config),
        SolverKind::NearestNeighbor => timed(instance, config, kind, |inst| best_nearest_neighbor(inst)),
        SolverKind::LocalSearch => timed(instance, config, kind, |inst| {
            let start = nearest_neighbor(inst, 0)?;
            local_search(inst, &start, config)
        }),
        SolverKind::SimulatedAnnealing => simulated_annealing(instance, config),
        SolverKind::Portfolio => portfolio_solve(instance, config, &RuinAndRecreate),
    }
}

fn timed<T: Scalar>(
    instance: &Instance<T>,
    config: &SolverConfig,
    kind: SolverKind,
    run: impl FnOnce(&Instance<T>) -> Result<Route>,
) -> Result<SolveResult<T>> {
    let start = Instant::now();
    let dense = instance.costs.dense()?;
    let route = run(instance)?;
    Ok(SolveResult {
        cost: dense.path_cost(route.order()),
        route,
        solver_id: kind.id().to_string(),
        seed: config.seed,
        runtime_seconds: start.elapsed().as_secs_f64(),
        optimal: false,
        lower_bound: None,
    })
}

/// Dense costs plus a check that `route` is a permutation of the instance.
pub(crate) fn checked_route<T: Scalar>(instance: &Instance<T>, route: &Route) -> Result<()> {
    crate::problem::validate_route(instance, route, false).map_err(Error::InvalidRoute)
}

pub(crate) fn dense<T: Scalar>(instance: &Instance<T>) -> Result<DenseCosts<T>> {
    instance.costs.dense()
}
