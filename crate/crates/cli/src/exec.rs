use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use insproute::bench::{export_csv, export_markdown, export_route_geometry, run_benchmark, summarize, Baseline};
use insproute::ingest::{generate_instance, instance_from_mesh, load_mesh, read_instance, write_instance, MeshFormat, BEST_KNOWN_COST_KEY};
use insproute::solvers::{branch_and_bound, brute_force, held_karp, solve, SolverConfig, SolverKind};
use insproute::{expand_route, metric_completion, Instance, Mesh};
use serde_json::json;

use crate::{Command, CommandPlan, ReportFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Largest instance on which `solve` computes a held_karp baseline unasked.
const AUTO_BASELINE_MAX_N: usize = 16;

/// Runs `plan` and returns the process exit code. Errors go to stderr.
pub fn execute(plan: &CommandPlan) -> i32 {
    init_logging(plan.verbosity);
    let outcome = match &plan.command {
        Command::Info(text) => {
            print!("{text}");
            Ok(EXIT_OK)
        }
        Command::Ingest { input, output, format, name, segmentation } => {
            ingest(input, output, *format, name.as_deref(), segmentation).map(|_| EXIT_OK)
        }
        Command::Gen { kind, n, knn, seed, best_known, output } => (|| {
            let mut instance: Instance = generate_instance(*kind, *n, *knn, *seed)?;
            if let Some(cost) = best_known {
                instance.metadata.insert(BEST_KNOWN_COST_KEY.into(), cost.to_string());
            }
            write_atomic(output, &write_instance(&instance))?;
            log::info!("wrote {} ({} nodes, {} edges)", output.display(), instance.n(), instance.edge_count());
            Ok(EXIT_OK)
        })(),
        Command::Solve { input, solver, config, baseline, geometry, output } => {
            solve_command(input, *solver, config, *baseline, geometry.as_deref(), output.as_deref()).map(|_| EXIT_OK)
        }
        Command::Bench { plan, format, output, summary } => (|| {
            let records = run_benchmark(plan)?;
            let markdown = export_markdown(&summarize(&records));
            let main = match format {
                ReportFormat::Csv => export_csv(&records),
                ReportFormat::Markdown => markdown.clone(),
            };
            match output {
                Some(path) => write_atomic(path, &main)?,
                None => std::io::stdout().write_all(&main)?,
            }
            if let Some(path) = summary {
                write_atomic(path, &markdown)?;
            }
            Ok(EXIT_OK)
        })(),
        Command::Verify { max_n, seeds } => verify(*max_n, seeds.clone()),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_FAILURE
        }
    }
}

fn init_logging(verbosity: u8) {
    let level = match verbosity {
        0 => log::LevelFilter::Error,
        1 => log::LevelFilter::Warn,
        2 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes).with_context(|| format!("writing {}", path.display()))?;
    tmp.as_file().sync_all().with_context(|| format!("writing {}", path.display()))?;
    tmp.persist(path).map_err(|e| e.error).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance> {
    read_instance(&read_file(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn ingest(
    input: &Path,
    output: &Path,
    format: Option<MeshFormat>,
    name: Option<&str>,
    segmentation: &insproute::ingest::SegmentationConfig,
) -> Result<()> {
    let bytes = read_file(input)?;
    let format = format.unwrap_or_else(|| MeshFormat::detect(&bytes));
    let mesh: Mesh = load_mesh(&bytes, format).with_context(|| format!("loading {} as {format}", input.display()))?;
    let name = match name {
        Some(n) => n.to_string(),
        None => input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "mesh".into()),
    };
    let instance = instance_from_mesh(&name, &mesh, segmentation).with_context(|| format!("segmenting {}", input.display()))?;
    if let Some(oversized) = instance.metadata.get("oversized_patches").filter(|v| *v != "0") {
        log::warn!("{oversized} single faces exceed the patch area limit");
    }
    write_atomic(output, &write_instance(&instance))?;
    log::info!(
        "{}: {} faces, {} inspection points, {} edges",
        input.display(),
        mesh.face_count(),
        instance.n(),
        instance.edge_count()
    );
    Ok(())
}

fn solve_command(
    input: &Path,
    kind: SolverKind,
    config: &SolverConfig,
    baseline: Option<Baseline>,
    geometry: Option<&Path>,
    output: Option<&Path>,
) -> Result<()> {
    let original = load_instance(input)?;
    let (complete, via) = metric_completion(&original).with_context(|| format!("completing {}", original.name))?;
    let context = || format!("solving {} with {kind}", original.name);
    let result = solve(kind, &complete, config).with_context(context)?;
    let expanded = expand_route(&result.route, &via, &original).with_context(context)?;

    let reference = match baseline {
        Some(Baseline::Stored) => Some(("stored".to_string(), stored_cost(&original)?.with_context(|| format!("{} has no stored {BEST_KNOWN_COST_KEY}", original.name))?)),
        Some(Baseline::Solver(b)) => Some((b.to_string(), solve(b, &complete, &SolverConfig::default().with_seed(config.seed)).with_context(|| format!("baseline {b}"))?.cost)),
        None if result.optimal => Some((kind.to_string(), result.cost)),
        None => match stored_cost(&original)? {
            Some(c) => Some(("stored".to_string(), c)),
            None if complete.n() <= AUTO_BASELINE_MAX_N => Some(("held_karp".to_string(), held_karp(&complete)?.cost)),
            None => None,
        },
    };
    let ar = match &reference {
        Some((_, base)) if *base == 0.0 && result.cost == 0.0 => Some(1.0),
        Some((_, base)) => Some(insproute::bench::compute_ar(result.cost, *base).context("computing AR")?),
        None => None,
    };

    let mut report = String::new();
    let _ = writeln!(report, "instance: {} ({} nodes, {} edges)", original.name, original.n(), original.edge_count());
    let _ = writeln!(report, "solver: {}", result.solver_id);
    let _ = writeln!(report, "seed: {}", result.seed);
    let _ = writeln!(report, "cost: {}", result.cost);
    let _ = writeln!(report, "optimal: {}", result.optimal);
    match (&reference, ar) {
        (Some((source, base)), Some(ar)) => {
            let _ = writeln!(report, "ar: {ar} (baseline {source}, cost {base})");
        }
        _ => report.push_str("ar: n/a\n"),
    }
    if let Some(lb) = result.lower_bound {
        let _ = writeln!(report, "lower_bound: {lb}");
    }
    let _ = writeln!(report, "runtime_seconds: {}", result.runtime_seconds);
    let _ = writeln!(report, "waypoints: {}", expanded.waypoints.len());
    let _ = writeln!(report, "route: {}", result.route);

    if let Some(path) = output {
        let doc = json!({
            "instance": original.name,
            "solver": result.solver_id,
            "seed": result.seed,
            "cost": result.cost,
            "optimal": result.optimal,
            "route": result.route.order(),
            "waypoints": expanded.waypoints,
            "expanded_cost": expanded.cost,
        });
        let mut bytes = serde_json::to_vec_pretty(&doc)?;
        bytes.push(b'\n');
        write_atomic(path, &bytes)?;
    }
    if let Some(path) = geometry {
        write_atomic(path, &export_route_geometry(&original, &expanded)?)?;
    }
    print!("{report}");
    Ok(())
}

fn stored_cost(instance: &Instance) -> Result<Option<f64>> {
    instance
        .metadata
        .get(BEST_KNOWN_COST_KEY)
        .map(|v| v.parse::<f64>().with_context(|| format!("bad {BEST_KNOWN_COST_KEY} {v:?} in {}", instance.name)))
        .transpose()
}

/// Brute force against held_karp and branch_and_bound for every node count
/// up to `max_n` and every seed, cycling the surface kinds.
fn verify(max_n: usize, seeds: std::ops::RangeInclusive<u64>) -> Result<i32> {
    use insproute::ingest::SurfaceKind;
    let unlimited = SolverConfig { time_limit_seconds: f64::INFINITY, ..SolverConfig::default() };
    let (mut passed, mut failed) = (0usize, 0usize);
    for seed in seeds {
        for n in 1..=max_n {
            let kind = SurfaceKind::ALL[(seed as usize + n) % SurfaceKind::ALL.len()];
            let original: Instance = generate_instance(kind, n, 3, seed)?;
            let (complete, _) = metric_completion(&original)?;
            let reference = brute_force(&complete)?.cost;
            for (id, cost) in [("held_karp", held_karp(&complete)?.cost), ("branch_and_bound", branch_and_bound(&complete, &unlimited)?.cost)] {
                if (cost - reference).abs() <= 1e-9 * reference.abs().max(1.0) {
                    passed += 1;
                } else {
                    failed += 1;
                    println!("FAIL {} {id}: {cost} vs brute force {reference}", original.name);
                }
            }
        }
    }
    println!("verify: {passed} passed, {failed} failed");
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VERIFY })
}
