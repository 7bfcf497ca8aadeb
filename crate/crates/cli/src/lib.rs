//! Command-line front end: argument parsing into a [`CommandPlan`] and its
//! execution.

mod exec;

use std::fmt;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::error::{ContextKind, ErrorKind};
use clap::{ArgAction, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use insproute::bench::{Baseline, BenchPlan, BenchSolver, InstanceSource, Timing, DEFAULT_RUNS};
use insproute::ingest::{AreaLimit, MeshFormat, SegmentationConfig, SurfaceKind};
use insproute::solvers::{SolverConfig, SolverKind, BRUTE_FORCE_MAX_N};

pub use exec::{execute, EXIT_FAILURE, EXIT_OK, EXIT_USAGE, EXIT_VERIFY};

#[derive(Parser, Debug)]
#[command(name = "insproute", version, about = "Inspection route planning on 3D surfaces")]
struct Cli {
    /// More log output on stderr (repeatable).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,
    /// Only log errors.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Segment a surface mesh and write an instance file.
    Ingest(IngestArgs),
    /// Write a synthetic instance file.
    Gen(GenArgs),
    /// Solve an instance and print a report.
    Solve(SolveArgs),
    /// Run a benchmark plan and export records and a summary.
    Bench(BenchArgs),
    /// Check the exact solvers against brute force on small instances.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// STL (ASCII or binary) or OBJ mesh.
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Mesh format; detected from the content when omitted.
    #[arg(long)]
    format: Option<String>,
    /// Instance name; defaults to the input file stem.
    #[arg(long)]
    name: Option<String>,
    /// Patch area limit in square meters.
    #[arg(long, conflicts_with = "max_patch_fraction", value_parser = positive_f64)]
    max_patch_area: Option<f64>,
    /// Patch area limit as a fraction of the mesh area.
    #[arg(long, value_parser = positive_f64)]
    max_patch_fraction: Option<f64>,
    /// Largest face deviation from the patch mean normal, radians.
    #[arg(long, value_parser = positive_f64)]
    max_normal_deviation: Option<f64>,
    /// Sensor offset along the patch normal, meters.
    #[arg(long, value_parser = non_negative_f64)]
    standoff: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    knn: Option<u64>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_parser = parse_kind)]
    kind: SurfaceKind,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    knn: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stored best-known route cost, used as a benchmark baseline.
    #[arg(long, value_parser = positive_f64)]
    best_known: Option<f64>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct SolverFlags {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seconds; `inf` disables the limit.
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true, value_parser = positive_f64)]
    time_limit: f64,
    /// Portfolio worker threads.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    threads: u64,
}

impl SolverFlags {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            time_limit_seconds: self.time_limit,
            seed: self.seed,
            thread_count: self.threads as usize,
            ..SolverConfig::default()
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    input: PathBuf,
    #[arg(long, default_value = "portfolio", value_parser = parse_solver)]
    solver: SolverKind,
    #[command(flatten)]
    flags: SolverFlags,
    /// AR reference: a solver id or `stored`. By default the stored
    /// best-known cost, else held_karp on instances of up to 16 nodes.
    #[arg(long, value_parser = parse_baseline)]
    baseline: Option<Baseline>,
    /// Write the route geometry document here.
    #[arg(long)]
    geometry: Option<PathBuf>,
    /// Write the route as JSON here.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Instance files.
    instances: Vec<PathBuf>,
    /// Generated instance `kind:n:knn:seed` (repeatable).
    #[arg(long = "gen", value_parser = parse_generated)]
    generated: Vec<InstanceSource>,
    /// Solver id (repeatable); defaults to held_karp, simulated_annealing
    /// and portfolio.
    #[arg(long = "solver", value_parser = parse_solver)]
    solvers: Vec<SolverKind>,
    #[arg(long, default_value = "held_karp", value_parser = parse_baseline)]
    baseline: Baseline,
    #[arg(long, default_value_t = DEFAULT_RUNS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    runs: u64,
    #[command(flatten)]
    flags: SolverFlags,
    /// Write zero runtimes so repeated runs give identical files.
    #[arg(long)]
    no_timing: bool,
    /// What goes to `--output` (or stdout).
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    format: ReportFormat,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the Markdown summary here.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(u64).range(1..=BRUTE_FORCE_MAX_N as u64))]
    max_n: u64,
    /// Inclusive seed range `a..b` (or `a..=b`).
    #[arg(long, default_value = "0..9", value_parser = parse_seed_range)]
    seeds: RangeInclusive<u64>,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 => Ok(v),
        Ok(v) => Err(format!("must be positive, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn non_negative_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("must be a non-negative number, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_kind(s: &str) -> Result<SurfaceKind, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = SurfaceKind::ALL.iter().map(|k| k.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    s.parse().map_err(|_| {
        let ids: Vec<&str> = SolverKind::ALL.iter().map(|k| k.id()).collect();
        format!("expected one of {}", ids.join(", "))
    })
}

fn parse_baseline(s: &str) -> Result<Baseline, String> {
    s.parse().map_err(|_| "expected a solver id or `stored`".to_string())
}

fn parse_generated(s: &str) -> Result<InstanceSource, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [kind, n, knn, seed] = parts[..] else {
        return Err("expected kind:n:knn:seed".into());
    };
    let number = |v: &str| v.parse::<u64>().map_err(|e| format!("{v:?}: {e}"));
    let (n, knn) = (number(n)?, number(knn)?);
    if n == 0 || knn == 0 {
        return Err("n and knn must be positive".into());
    }
    Ok(InstanceSource::Generated { kind: parse_kind(kind)?, n: n as usize, knn: knn as usize, seed: number(seed)? })
}

fn parse_seed_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| "expected a..b".to_string())?;
    let (a, b): (u64, u64) = (a.parse().map_err(|e| format!("{a:?}: {e}"))?, b.parse().map_err(|e| format!("{b:?}: {e}"))?);
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok(a..=b)
}

/// A fully parsed invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct CommandPlan {
    pub command: Command,
    /// 0 errors only, 1 warnings (default), 2 info, 3+ debug.
    pub verbosity: u8,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Ingest {
        input: PathBuf,
        output: PathBuf,
        format: Option<MeshFormat>,
        name: Option<String>,
        segmentation: SegmentationConfig,
    },
    Gen {
        kind: SurfaceKind,
        n: usize,
        knn: usize,
        seed: u64,
        best_known: Option<f64>,
        output: PathBuf,
    },
    Solve {
        input: PathBuf,
        solver: SolverKind,
        config: SolverConfig,
        baseline: Option<Baseline>,
        geometry: Option<PathBuf>,
        output: Option<PathBuf>,
    },
    Bench {
        plan: BenchPlan,
        format: ReportFormat,
        output: Option<PathBuf>,
        summary: Option<PathBuf>,
    },
    Verify {
        max_n: usize,
        seeds: RangeInclusive<u64>,
    },
    /// `--help` or `--version` text for stdout.
    Info(String),
}

/// Bad command line. Exit code 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UsageError {
    /// The argument or value that was rejected, when known.
    pub token: Option<String>,
    pub message: String,
    pub synopsis: String,
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.message.trim_end())?;
        if !self.message.contains("Usage:") {
            write!(f, "\n\n{}", self.synopsis)?;
        }
        Ok(())
    }
}

impl std::error::Error for UsageError {}

fn synopsis() -> String {
    Cli::command().render_usage().to_string()
}

fn usage(token: Option<String>, message: String) -> UsageError {
    UsageError { token, message, synopsis: synopsis() }
}

/// Maps `argv` (program name first) to a plan. Input files are not opened.
pub fn parse_args<I, S>(argv: I) -> Result<CommandPlan, UsageError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return Ok(CommandPlan { command: Command::Info(e.to_string()), verbosity: 1 });
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            return Err(usage(None, e.to_string()));
        }
        Err(e) => {
            let token = [ContextKind::InvalidValue, ContextKind::InvalidArg, ContextKind::InvalidSubcommand]
                .into_iter()
                .find_map(|k| e.get(k).map(|v| v.to_string()));
            return Err(usage(token, e.render().to_string()));
        }
    };
    let verbosity = if cli.quiet { 0 } else { 1 + cli.verbose };
    let command = match cli.command {
        Sub::Ingest(a) => {
            let format = a
                .format
                .as_deref()
                .map(|f| f.parse::<MeshFormat>().map_err(|e| usage(Some(f.to_string()), e.to_string())))
                .transpose()?;
            let mut segmentation = SegmentationConfig::default();
            if let Some(area) = a.max_patch_area {
                segmentation.max_patch_area = AreaLimit::Absolute(area);
            }
            if let Some(fraction) = a.max_patch_fraction {
                segmentation.max_patch_area = AreaLimit::FractionOfTotal(fraction);
            }
            if let Some(theta) = a.max_normal_deviation {
                segmentation.max_normal_deviation = theta;
            }
            if let Some(standoff) = a.standoff {
                segmentation.standoff = standoff;
            }
            if let Some(knn) = a.knn {
                segmentation.knn = knn as usize;
            }
            segmentation.validate().map_err(|e| usage(None, e.to_string()))?;
            Command::Ingest { input: a.input, output: a.output, format, name: a.name, segmentation }
        }
        Sub::Gen(a) => Command::Gen {
            kind: a.kind,
            n: a.n as usize,
            knn: a.knn as usize,
            seed: a.seed,
            best_known: a.best_known,
            output: a.output,
        },
        Sub::Solve(a) => Command::Solve {
            input: a.input,
            solver: a.solver,
            config: a.flags.config(),
            baseline: a.baseline,
            geometry: a.geometry,
            output: a.output,
        },
        Sub::Bench(a) => {
            let mut instances = a.generated;
            instances.extend(a.instances.into_iter().map(InstanceSource::File));
            if instances.is_empty() {
                return Err(usage(None, "bench needs at least one instance file or --gen source".into()));
            }
            let kinds = if a.solvers.is_empty() {
                vec![SolverKind::HeldKarp, SolverKind::SimulatedAnnealing, SolverKind::Portfolio]
            } else {
                a.solvers
            };
            let config = a.flags.config();
            let solvers = kinds.into_iter().map(|k| BenchSolver::new(k, config.clone())).collect();
            let plan = BenchPlan {
                runs_per_pair: a.runs as usize,
                master_seed: a.flags.seed,
                timing: if a.no_timing { Timing::Suppressed } else { Timing::WallClock },
                ..BenchPlan::new(instances, solvers, a.baseline)
            };
            plan.validate().map_err(|e| usage(None, e.to_string()))?;
            Command::Bench { plan, format: a.format, output: a.output, summary: a.summary }
        }
        Sub::Verify(a) => Command::Verify { max_n: a.max_n as usize, seeds: a.seeds },
    };
    Ok(CommandPlan { command, verbosity })
}

/// Parses and executes `argv`, returning the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match parse_args(argv) {
        Ok(plan) => execute(&plan),
        Err(e) => {
            eprintln!("{e}");
            EXIT_USAGE
        }
    }
}
