//! Sparse cost graphs over inspection points.

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::num::Scalar;
use crate::problem::{CostMatrix, Instance};

/// Cost for the robot to travel between two inspection points.
pub trait MotionCost<T> {
    fn cost(&self, from: &Point3<T>, to: &Point3<T>) -> T;
}

/// Straight-line distance in meters.
#[derive(Clone, Copy, Debug, Default)]
pub struct Euclidean;

impl<T: Scalar> MotionCost<T> for Euclidean {
    fn cost(&self, from: &Point3<T>, to: &Point3<T>) -> T {
        from.distance(to)
    }
}

/// Indices of the `k` nearest other points to `i`, ties to the lower index.
pub fn nearest_neighbors<T: Scalar>(points: &[Point3<T>], i: usize, k: usize) -> Vec<usize> {
    let mut others: Vec<(T, usize)> =
        (0..points.len()).filter(|&j| j != i).map(|j| (points[i].distance(&points[j]), j)).collect();
    others.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distances").then(a.1.cmp(&b.1)));
    others.into_iter().take(k).map(|(_, j)| j).collect()
}

/// Union k-nearest-neighbor graph with Euclidean costs; see [`build_graph_with`].
pub fn build_graph<T: Scalar>(name: &str, points: Vec<Point3<T>>, knn: usize) -> Result<Instance<T>> {
    build_graph_with(name, points, knn, &Euclidean)
}

/// Edge `(i, j)` exists when either endpoint is among the other's `knn`
/// nearest neighbors. A disconnected result is repaired by repeatedly adding
/// the shortest pair joining two components; repairs are listed in the
/// `repair_edges` metadata entry.
pub fn build_graph_with<T: Scalar, C: MotionCost<T>>(
    name: &str,
    points: Vec<Point3<T>>,
    knn: usize,
    motion: &C,
) -> Result<Instance<T>> {
    if knn == 0 {
        return Err(Error::InvalidConfig("knn must be at least 1".into()));
    }
    let n = points.len();
    let mut costs = CostMatrix::new(n);
    for i in 0..n {
        for j in nearest_neighbors(&points, i, knn) {
            costs.set(i, j, motion.cost(&points[i], &points[j]))?;
        }
    }
    let mut repairs = Vec::new();
    loop {
        let components = costs.components();
        if components.len() <= 1 {
            break;
        }
        let mut label = vec![0; n];
        for (c, members) in components.iter().enumerate() {
            for &v in members {
                label[v] = c;
            }
        }
        let mut best: Option<(T, usize, usize)> = None;
        for i in 0..n {
            for j in i + 1..n {
                if label[i] == label[j] {
                    continue;
                }
                let d = points[i].distance(&points[j]);
                if best.is_none_or(|(b, _, _)| d < b) {
                    best = Some((d, i, j));
                }
            }
        }
        let (_, i, j) = best.expect("two components have a joining pair");
        costs.set(i, j, motion.cost(&points[i], &points[j]))?;
        repairs.push((i, j));
    }
    let mut instance = Instance::new(name, points, costs)?.with_metadata("knn", knn);
    if !repairs.is_empty() {
        let listed: Vec<String> = repairs.iter().map(|(i, j)| format!("{i}-{j}")).collect();
        instance.metadata.insert("repair_edges".into(), listed.join(" "));
    }
    Ok(instance)
}
