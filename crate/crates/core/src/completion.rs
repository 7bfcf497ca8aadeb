//! Metric completion of incomplete graphs and expansion of routes back onto
//! the original edges.

use crate::error::{Error, Result};
use crate::num::{improvement_threshold, Scalar};
use crate::problem::{CostMatrix, Instance, Route};

const NONE: usize = usize::MAX;

/// Predecessor table of an all-pairs shortest-path computation.
///
/// `pred(i, j)` is the node preceding `j` on the chosen shortest path from
/// `i` to `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortestPaths {
    n: usize,
    pred: Vec<usize>,
}

impl ShortestPaths {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pred(&self, from: usize, to: usize) -> Option<usize> {
        match self.pred[from * self.n + to] {
            NONE => None,
            p => Some(p),
        }
    }

    /// Builds a table directly from raw predecessors (`None` = no path).
    pub fn from_raw(n: usize, pred: Vec<Option<usize>>) -> Self {
        assert_eq!(pred.len(), n * n);
        Self { n, pred: pred.into_iter().map(|p| p.unwrap_or(NONE)).collect() }
    }

    /// Node sequence `from, …, to` of the recorded shortest path.
    pub fn path(&self, from: usize, to: usize) -> Result<Vec<usize>> {
        if from == to {
            return Ok(vec![from]);
        }
        let mut rev = vec![to];
        let mut cur = to;
        while cur != from {
            if rev.len() > self.n {
                return Err(Error::InconsistentVia(from, to));
            }
            cur = match self.pred(from, cur) {
                Some(p) if p < self.n => p,
                _ => return Err(Error::InconsistentVia(from, to)),
            };
            rev.push(cur);
        }
        rev.reverse();
        Ok(rev)
    }
}

/// Replaces absent entries by shortest-path distances over the present edges.
///
/// A direct edge is kept unless a path is shorter by more than rounding
/// noise, so costs that already satisfy the triangle inequality come back
/// unchanged and completing twice is a no-op.
pub fn metric_completion<T: Scalar>(instance: &Instance<T>) -> Result<(Instance<T>, ShortestPaths)> {
    let n = instance.n();
    let components = instance.costs.components();
    if components.len() > 1 {
        return Err(Error::Disconnected(components));
    }
    let inf = T::infinity();
    let mut dist = vec![inf; n * n];
    let mut pred = vec![NONE; n * n];
    for i in 0..n {
        dist[i * n + i] = T::zero();
        for (j, c) in instance.costs.neighbors(i) {
            dist[i * n + j] = c;
            pred[i * n + j] = i;
        }
    }
    // Floyd-Warshall; intermediates in increasing index order so ties keep
    // the lowest-index route.
    for k in 0..n {
        for i in 0..n {
            let dik = dist[i * n + k];
            if i == k || dik == inf {
                continue;
            }
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let cand = dik + dist[k * n + j];
                let cur = dist[i * n + j];
                if cur == inf || cand < cur - improvement_threshold(cur) {
                    dist[i * n + j] = cand;
                    pred[i * n + j] = pred[k * n + j];
                }
            }
        }
    }
    // Keep the matrix exactly symmetric: take the upper triangle.
    let mut costs = CostMatrix::new(n);
    for i in 0..n {
        for j in i + 1..n {
            costs.set(i, j, dist[i * n + j])?;
        }
    }
    let completed = Instance {
        name: instance.name.clone(),
        points: instance.points.clone(),
        costs,
        metadata: instance.metadata.clone(),
    };
    Ok((completed, ShortestPaths { n, pred }))
}

/// A route realized over original edges; waypoints may repeat.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpandedRoute<T> {
    pub waypoints: Vec<usize>,
    pub cost: T,
}

/// Inserts the intermediate nodes of each leg's shortest path. The cost is
/// summed over the original edges.
pub fn expand_route<T: Scalar>(
    route: &Route,
    via: &ShortestPaths,
    original: &Instance<T>,
) -> Result<ExpandedRoute<T>> {
    let order = route.order();
    let mut waypoints = Vec::with_capacity(order.len());
    if let Some(&first) = order.first() {
        waypoints.push(first);
    }
    for leg in order.windows(2) {
        let path = via.path(leg[0], leg[1])?;
        waypoints.extend_from_slice(&path[1..]);
    }
    let mut cost = T::zero();
    for w in waypoints.windows(2) {
        cost = cost + original.costs.get(w[0], w[1]).ok_or(Error::InconsistentVia(w[0], w[1]))?;
    }
    Ok(ExpandedRoute { waypoints, cost })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;
    use crate::problem::evaluate_route;

    fn path_graph() -> Instance<f64> {
        let pts = (0..3).map(|i| Point3::new(i as f64, 0.0, 0.0)).collect();
        let costs = CostMatrix::from_edges(3, &[(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        Instance::new("path", pts, costs).unwrap()
    }

    #[test]
    fn path_graph_completion_goes_through_middle() {
        let (done, via) = metric_completion(&path_graph()).unwrap();
        assert_eq!(done.costs.get(0, 2), Some(3.0));
        assert_eq!(via.path(0, 2).unwrap(), vec![0, 1, 2]);
        assert_eq!(via.path(2, 0).unwrap(), vec![2, 1, 0]);
    }

    #[test]
    fn expansion_of_path_graph_route() {
        let original = path_graph();
        let (done, via) = metric_completion(&original).unwrap();
        let route = Route::new(vec![0, 2, 1]);
        let expanded = expand_route(&route, &via, &original).unwrap();
        assert_eq!(expanded.waypoints, vec![0, 1, 2, 1]);
        assert_eq!(expanded.cost, 5.0);
        assert_eq!(evaluate_route(&done, &route).unwrap(), 5.0);
    }

    #[test]
    fn direct_legs_expand_to_themselves() {
        let original = path_graph();
        let (_, via) = metric_completion(&original).unwrap();
        let expanded = expand_route(&Route::new(vec![2, 1, 0]), &via, &original).unwrap();
        assert_eq!(expanded.waypoints, vec![2, 1, 0]);
        assert_eq!(expanded.cost, 3.0);
    }

    #[test]
    fn disconnected_graph_reports_components() {
        let pts = (0..4).map(|i| Point3::new(i as f64, 0.0, 0.0)).collect();
        let costs = CostMatrix::from_edges(4, &[(0, 2, 1.0), (1, 3, 1.0)]).unwrap();
        let inst = Instance::new("split", pts, costs).unwrap();
        match metric_completion(&inst) {
            Err(Error::Disconnected(c)) => assert_eq!(c, vec![vec![0, 2], vec![1, 3]]),
            other => panic!("expected Disconnected, got {other:?}"),
        }
    }

    #[test]
    fn cyclic_predecessors_are_rejected() {
        let via = ShortestPaths::from_raw(3, vec![None, Some(2), Some(1), None, None, None, None, None, None]);
        assert!(matches!(via.path(0, 2), Err(Error::InconsistentVia(0, 2))));
        // pred(0,2)=1 but pred(0,1) is missing
        let broken = ShortestPaths::from_raw(3, vec![None, None, Some(1), None, None, None, None, None, None]);
        assert!(matches!(broken.path(0, 2), Err(Error::InconsistentVia(0, 2))));
    }

    #[test]
    fn single_node_completes() {
        let inst = Instance::new("one", vec![Point3::zero()], CostMatrix::<f64>::new(1)).unwrap();
        let (done, via) = metric_completion(&inst).unwrap();
        assert_eq!(done, inst);
        assert_eq!(via.path(0, 0).unwrap(), vec![0]);
    }
}
