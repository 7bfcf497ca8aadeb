//! Text exports: raw records as CSV, summaries as a Markdown table, and
//! route geometry for plotting.

use std::fmt::Write as _;

use crate::bench::{BenchRecord, SummaryRow};
use crate::completion::ExpandedRoute;
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::problem::Instance;

pub const CSV_HEADER: [&str; 9] = ["instance", "nodes", "edges", "solver", "run", "seed", "cost", "runtime_seconds", "ar"];

/// Records as CSV with a fixed header. Floats use the shortest decimal
/// form that parses back to the same value.
pub fn export_csv(records: &[BenchRecord]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in records {
        w.write_record([
            r.instance.clone(),
            r.nodes.to_string(),
            r.edges.to_string(),
            r.solver.clone(),
            r.run.to_string(),
            r.seed.to_string(),
            r.cost.to_string(),
            r.runtime_seconds.to_string(),
            r.ar.to_string(),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Seconds with two decimals, or thousands with a `K` suffix from 1000 s.
pub fn format_runtime(seconds: f64) -> String {
    if seconds >= 1000.0 {
        format!("{:.1}K", seconds / 1000.0)
    } else {
        format!("{seconds:.2}")
    }
}

/// One line per instance: `name (nodes, edges)`, then mean AR and mean
/// runtime per solver. Solver columns follow the first row.
pub fn export_markdown(rows: &[SummaryRow]) -> Vec<u8> {
    let mut out = String::new();
    let solvers: Vec<&str> = rows.first().map(|r| r.solvers.iter().map(|s| s.solver.as_str()).collect()).unwrap_or_default();
    out.push_str("| Instance (nodes, edges) |");
    for s in &solvers {
        let _ = write!(out, " {s} AR | {s} rt |");
    }
    out.push_str("\n|---|");
    for _ in &solvers {
        out.push_str("---:|---:|");
    }
    out.push('\n');
    for row in rows {
        let _ = write!(out, "| {} ({}, {}) |", row.instance, row.nodes, row.edges);
        for s in &solvers {
            match row.solvers.iter().find(|c| c.solver == *s) {
                Some(c) => {
                    let _ = write!(out, " {:.3} | {} |", c.mean_ar, format_runtime(c.mean_runtime_seconds));
                }
                None => out.push_str(" - | - |"),
            }
        }
        out.push('\n');
    }
    out.into_bytes()
}

/// Plain-text geometry of an instance and an expanded route:
///
/// ```text
/// # instance <name>
/// nodes <n>
/// <index> <x> <y> <z>
/// edges <m>
/// <i> <j> <cost>
/// route <waypoints> <cost>
/// <node> <x> <y> <z>
/// ```
pub fn export_route_geometry<T: Scalar>(instance: &Instance<T>, expanded: &ExpandedRoute<T>) -> Result<Vec<u8>> {
    let n = instance.n();
    if let Some(&bad) = expanded.waypoints.iter().find(|&&w| w >= n) {
        return Err(Error::BadStart { start: bad, n });
    }
    let mut out = String::new();
    let _ = writeln!(out, "# instance {}", instance.name);
    let _ = writeln!(out, "nodes {n}");
    for (i, p) in instance.points.iter().enumerate() {
        let _ = writeln!(out, "{i} {} {} {}", p.x, p.y, p.z);
    }
    let _ = writeln!(out, "edges {}", instance.edge_count());
    for (i, j, c) in instance.costs.edges() {
        let _ = writeln!(out, "{i} {j} {c}");
    }
    let _ = writeln!(out, "route {} {}", expanded.waypoints.len(), expanded.cost);
    for &w in &expanded.waypoints {
        let p = instance.points[w];
        let _ = writeln!(out, "{w} {} {} {}", p.x, p.y, p.z);
    }
    Ok(out.into_bytes())
}
