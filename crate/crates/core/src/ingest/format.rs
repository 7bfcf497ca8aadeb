//! Instance documents: a JSON text with the node count and edge count up
//! front, then points, edges and metadata.
//!
//! ```text
//! {
//!   "format": "insproute-instance/1",
//!   "name": "Car-Door",
//!   "nodes": 106,
//!   "edge_count": 184,
//!   "points": [
//!     [0.0, 1.5, 2.25],
//!     ...
//!   ],
//!   "edges": [
//!     [0, 1, 0.75],
//!     ...
//!   ],
//!   "metadata": {"kind": "sphere"}
//! }
//! ```
//!
//! Numbers are written as the shortest decimal that reads back to the same
//! `f64`, so `read_instance(write_instance(i)) == i` bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::num::Scalar;
use crate::problem::{CostMatrix, Instance};

pub const FORMAT_TAG: &str = "insproute-instance/1";

/// Metadata key holding a best-known open-route cost, used as a benchmark
/// baseline when no exact solver can run.
pub const BEST_KNOWN_COST_KEY: &str = "best_known_cost";

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    format: String,
    name: String,
    nodes: usize,
    edge_count: usize,
    points: Vec<[f64; 3]>,
    edges: Vec<(usize, usize, f64)>,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

fn num(value: f64) -> String {
    serde_json::to_string(&value).expect("finite numbers serialize")
}

fn json_str(value: &str) -> String {
    serde_json::to_string(value).expect("strings serialize")
}

pub fn write_instance<T: Scalar>(instance: &Instance<T>) -> Vec<u8> {
    let mut out = String::new();
    let edges: Vec<(usize, usize, T)> = instance.costs.edges().collect();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"format\": {},", json_str(FORMAT_TAG));
    let _ = writeln!(out, "  \"name\": {},", json_str(&instance.name));
    let _ = writeln!(out, "  \"nodes\": {},", instance.n());
    let _ = writeln!(out, "  \"edge_count\": {},", edges.len());
    out.push_str("  \"points\": [");
    for (k, p) in instance.points.iter().enumerate() {
        let sep = if k + 1 < instance.points.len() { "," } else { "" };
        let _ = write!(out, "\n    [{}, {}, {}]{sep}", num(p.x.as_f64()), num(p.y.as_f64()), num(p.z.as_f64()));
    }
    out.push_str(if instance.points.is_empty() { "],\n" } else { "\n  ],\n" });
    out.push_str("  \"edges\": [");
    for (k, (i, j, c)) in edges.iter().enumerate() {
        let sep = if k + 1 < edges.len() { "," } else { "" };
        let _ = write!(out, "\n    [{i}, {j}, {}]{sep}", num(c.as_f64()));
    }
    out.push_str(if edges.is_empty() { "],\n" } else { "\n  ],\n" });
    out.push_str("  \"metadata\": {");
    for (k, (key, value)) in instance.metadata.iter().enumerate() {
        let sep = if k + 1 < instance.metadata.len() { "," } else { "" };
        let _ = write!(out, "\n    {}: {}{sep}", json_str(key), json_str(value));
    }
    out.push_str(if instance.metadata.is_empty() { "}\n" } else { "\n  }\n" });
    out.push_str("}\n");
    out.into_bytes()
}

pub fn read_instance<T: Scalar>(bytes: &[u8]) -> Result<Instance<T>> {
    let doc: InstanceDoc = serde_json::from_slice(bytes)
        .map_err(|e| Error::schema(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    if doc.format != FORMAT_TAG {
        return Err(Error::schema("format", format!("expected {FORMAT_TAG:?}, found {:?}", doc.format)));
    }
    if doc.nodes == 0 {
        return Err(Error::schema("nodes", "instance needs at least one node"));
    }
    if doc.points.len() != doc.nodes {
        return Err(Error::schema("points", format!("{} points for {} nodes", doc.points.len(), doc.nodes)));
    }
    if doc.edges.len() != doc.edge_count {
        return Err(Error::schema("edges", format!("{} edges but edge_count is {}", doc.edges.len(), doc.edge_count)));
    }
    let mut points = Vec::with_capacity(doc.nodes);
    for (k, p) in doc.points.iter().enumerate() {
        if let Some(c) = p.iter().position(|v| !v.is_finite()) {
            return Err(Error::schema(format!("points[{k}][{c}]"), "coordinate must be finite"));
        }
        points.push(Point3::new(T::of(p[0]), T::of(p[1]), T::of(p[2])));
    }
    let mut costs = CostMatrix::new(doc.nodes);
    for (k, &(i, j, c)) in doc.edges.iter().enumerate() {
        if i >= doc.nodes || j >= doc.nodes || i == j {
            return Err(Error::schema(format!("edges[{k}]"), format!("bad endpoints ({i}, {j})")));
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::schema(format!("edges[{k}][2]"), format!("cost {c} must be finite and non-negative")));
        }
        if costs.has_edge(i, j) {
            return Err(Error::schema(format!("edges[{k}]"), format!("duplicate edge ({i}, {j})")));
        }
        costs.set(i, j, T::of(c))?;
    }
    let mut instance = Instance::new(doc.name, points, costs)?;
    instance.metadata = doc.metadata;
    Ok(instance)
}
