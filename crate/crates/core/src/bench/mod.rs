//! Benchmark harness: repeated seeded runs of several solvers on several
//! instances, scored by approximation ratio (AR) against a baseline cost.

mod report;

pub use report::{export_csv, export_markdown, export_route_geometry, format_runtime, CSV_HEADER};

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use crate::completion::metric_completion;
use crate::error::{Error, Result};
use crate::ingest::{generate_instance, read_instance, SurfaceKind, BEST_KNOWN_COST_KEY};
use crate::num::Scalar;
use crate::problem::Instance;
use crate::rng::{derive_seed, stable_hash};
use crate::solvers::{solve, SolverConfig, SolverKind};

/// Runs per (instance, solver) pair unless a plan says otherwise.
pub const DEFAULT_RUNS: usize = 15;

const AR_TOLERANCE: f64 = 1e-9;

/// `baseline / obtained`, clamped to 1. Fails with
/// [`Error::BaselineWorse`] when the baseline is worse than the obtained
/// cost by more than a relative `1e-9`.
pub fn compute_ar(obtained: f64, baseline: f64) -> Result<f64> {
    if !(obtained > 0.0 && obtained.is_finite() && baseline > 0.0 && baseline.is_finite()) {
        return Err(Error::InvalidConfig(format!("costs must be positive, got obtained {obtained}, baseline {baseline}")));
    }
    if baseline > obtained * (1.0 + AR_TOLERANCE) {
        return Err(Error::BaselineWorse { baseline, obtained });
    }
    Ok((baseline / obtained).min(1.0))
}

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSource {
    Generated { kind: SurfaceKind, n: usize, knn: usize, seed: u64 },
    File(PathBuf),
    Inline(Instance<f64>),
}

impl InstanceSource {
    pub fn load(&self) -> Result<Instance<f64>> {
        match self {
            InstanceSource::Generated { kind, n, knn, seed } => generate_instance(*kind, *n, *knn, *seed),
            InstanceSource::File(path) => {
                let bytes = std::fs::read(path).map_err(|e| Error::Io(e).context(path.display().to_string()))?;
                read_instance(&bytes).map_err(|e| e.context(path.display().to_string()))
            }
            InstanceSource::Inline(instance) => Ok(instance.clone()),
        }
    }
}

/// Where the AR reference cost comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Baseline {
    /// Best cost found by this solver. If the plan does not run it, it is
    /// run once per instance with the default configuration.
    Solver(SolverKind),
    /// The `best_known_cost` stored in the instance metadata.
    Stored,
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Baseline::Solver(kind) => write!(f, "{kind}"),
            Baseline::Stored => f.write_str("stored"),
        }
    }
}

impl FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "stored" {
            Ok(Baseline::Stored)
        } else {
            s.parse().map(Baseline::Solver)
        }
    }
}

/// Whether records carry measured runtimes. Suppressed timing writes zero,
/// which makes exports byte-identical across executions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Timing {
    #[default]
    WallClock,
    Suppressed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchSolver {
    /// Column label; defaults to the solver id.
    pub label: String,
    pub kind: SolverKind,
    pub config: SolverConfig,
}

impl BenchSolver {
    pub fn new(kind: SolverKind, config: SolverConfig) -> Self {
        Self { label: kind.id().to_string(), kind, config }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchPlan {
    pub instances: Vec<InstanceSource>,
    pub solvers: Vec<BenchSolver>,
    pub runs_per_pair: usize,
    pub baseline: Baseline,
    pub master_seed: u64,
    pub timing: Timing,
}

impl BenchPlan {
    pub fn new(instances: Vec<InstanceSource>, solvers: Vec<BenchSolver>, baseline: Baseline) -> Self {
        Self { instances, solvers, runs_per_pair: DEFAULT_RUNS, baseline, master_seed: 0, timing: Timing::WallClock }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs_per_pair == 0 {
            return Err(Error::InvalidConfig("runs per pair must be at least 1".into()));
        }
        let mut labels = BTreeSet::new();
        for s in &self.solvers {
            if !labels.insert(s.label.as_str()) {
                return Err(Error::InvalidConfig(format!("duplicate solver label {:?}", s.label)));
            }
            s.config.validate().map_err(|e| e.context(format!("solver {}", s.label)))?;
        }
        Ok(())
    }

    /// Seed of one run, derived from the master seed, the instance name,
    /// the solver's position in the plan and the run index.
    pub fn run_seed(&self, instance: &str, solver_index: usize, run: usize) -> u64 {
        derive_seed(self.master_seed, &[stable_hash(instance), solver_index as u64, run as u64])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub instance: String,
    /// Size of the instance as loaded, before metric completion.
    pub nodes: usize,
    pub edges: usize,
    pub solver: String,
    pub run: usize,
    pub seed: u64,
    pub cost: f64,
    pub runtime_seconds: f64,
    pub ar: f64,
}

/// Runs every (instance, solver, run) cell sequentially. Records come back
/// sorted by instance name, then solver position in the plan, then run.
pub fn run_benchmark(plan: &BenchPlan) -> Result<Vec<BenchRecord>> {
    plan.validate()?;
    let mut loaded = Vec::with_capacity(plan.instances.len());
    let mut names = BTreeSet::new();
    for source in &plan.instances {
        let started = Instant::now();
        let original = source.load()?;
        if !names.insert(original.name.clone()) {
            return Err(Error::InvalidConfig(format!("duplicate instance name {:?}", original.name)));
        }
        let (complete, _) = metric_completion(&original).map_err(|e| e.context(format!("instance {}", original.name)))?;
        log::info!("loaded and completed {} in {:.3} s", original.name, started.elapsed().as_secs_f64());
        loaded.push((original, complete));
    }
    loaded.sort_by(|a, b| a.0.name.cmp(&b.0.name));

    let mut records = Vec::with_capacity(loaded.len() * plan.solvers.len() * plan.runs_per_pair);
    for (original, complete) in &loaded {
        let name = &original.name;
        let mut raw: Vec<(usize, usize, u64, f64, f64)> = Vec::new();
        for (si, solver) in plan.solvers.iter().enumerate() {
            for run in 0..plan.runs_per_pair {
                let seed = plan.run_seed(name, si, run);
                let config = solver.config.clone().with_seed(seed);
                let result = solve(solver.kind, complete, &config)
                    .map_err(|e| e.context(format!("instance {name}, solver {}, run {run}", solver.label)))?;
                let runtime = match plan.timing {
                    Timing::WallClock => result.runtime_seconds,
                    Timing::Suppressed => 0.0,
                };
                log::debug!("{name} {} run {run}: cost {}", solver.label, result.cost);
                raw.push((si, run, seed, result.cost, runtime));
            }
        }
        let baseline = baseline_cost(plan, original, complete, &raw)?;
        for (si, run, seed, cost, runtime) in raw {
            let ar = if cost == 0.0 && baseline == 0.0 {
                1.0
            } else {
                compute_ar(cost, baseline)
                    .map_err(|e| e.context(format!("instance {name}, solver {}, run {run}", plan.solvers[si].label)))?
            };
            records.push(BenchRecord {
                instance: name.clone(),
                nodes: original.n(),
                edges: original.edge_count(),
                solver: plan.solvers[si].label.clone(),
                run,
                seed,
                cost,
                runtime_seconds: runtime,
                ar,
            });
        }
    }
    Ok(records)
}

fn baseline_cost(
    plan: &BenchPlan,
    original: &Instance<f64>,
    complete: &Instance<f64>,
    raw: &[(usize, usize, u64, f64, f64)],
) -> Result<f64> {
    let unavailable = || Error::BaselineUnavailable(original.name.clone());
    match plan.baseline {
        Baseline::Stored => stored_cost(original)?.ok_or_else(unavailable),
        Baseline::Solver(kind) => {
            let own: Vec<f64> = raw
                .iter()
                .filter(|r| plan.solvers[r.0].kind == kind)
                .map(|r| r.3)
                .collect();
            let mut best = if own.is_empty() {
                match solve(kind, complete, &SolverConfig::default().with_seed(plan.master_seed)) {
                    Ok(r) => Some(r.cost),
                    Err(Error::TooLarge { .. }) => None,
                    Err(e) => return Err(e.context(format!("baseline for {}", original.name))),
                }
            } else {
                own.into_iter().reduce(f64::min)
            };
            if let Some(stored) = stored_cost(original)? {
                best = Some(best.map_or(stored, |b| b.min(stored)));
            }
            best.ok_or_else(unavailable)
        }
    }
}

fn stored_cost<T: Scalar>(instance: &Instance<T>) -> Result<Option<f64>> {
    match instance.metadata.get(BEST_KNOWN_COST_KEY) {
        None => Ok(None),
        Some(text) => text.parse::<f64>().ok().filter(|c| c.is_finite() && *c >= 0.0).map(Some).ok_or_else(|| {
            Error::InvalidInstance(format!("{}: bad {BEST_KNOWN_COST_KEY} {text:?}", instance.name))
        }),
    }
}

/// Per-solver statistics within one summary row.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverSummary {
    pub solver: String,
    pub runs: usize,
    pub mean_ar: f64,
    pub mean_runtime_seconds: f64,
    pub best_ar: f64,
    /// Population standard deviation of the run costs.
    pub cost_std: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub instance: String,
    pub nodes: usize,
    pub edges: usize,
    pub solvers: Vec<SolverSummary>,
}

/// One row per instance, ordered by name. Within a row, solvers keep the
/// order in which they first appear in `records`.
pub fn summarize(records: &[BenchRecord]) -> Vec<SummaryRow> {
    let mut instances: Vec<&str> = records.iter().map(|r| r.instance.as_str()).collect();
    instances.sort_unstable();
    instances.dedup();
    instances
        .into_iter()
        .map(|name| {
            let rows: Vec<&BenchRecord> = records.iter().filter(|r| r.instance == name).collect();
            let mut solver_order: Vec<&str> = Vec::new();
            for r in &rows {
                if !solver_order.contains(&r.solver.as_str()) {
                    solver_order.push(&r.solver);
                }
            }
            let solvers = solver_order
                .into_iter()
                .map(|solver| {
                    let runs: Vec<&&BenchRecord> = rows.iter().filter(|r| r.solver == solver).collect();
                    let k = runs.len() as f64;
                    let mean = |f: fn(&BenchRecord) -> f64| runs.iter().map(|r| f(r)).sum::<f64>() / k;
                    let mean_cost = mean(|r| r.cost);
                    let variance = runs.iter().map(|r| (r.cost - mean_cost).powi(2)).sum::<f64>() / k;
                    SolverSummary {
                        solver: solver.to_string(),
                        runs: runs.len(),
                        mean_ar: mean(|r| r.ar),
                        mean_runtime_seconds: mean(|r| r.runtime_seconds),
                        best_ar: runs.iter().map(|r| r.ar).fold(f64::NEG_INFINITY, f64::max),
                        cost_std: variance.sqrt(),
                    }
                })
                .collect();
            SummaryRow { instance: name.to_string(), nodes: rows[0].nodes, edges: rows[0].edges, solvers }
        })
        .collect()
}
