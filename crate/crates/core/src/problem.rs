//! Problem model: points, possibly incomplete symmetric cost matrices,
//! instances and open routes.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::num::Scalar;

/// Symmetric `n × n` cost matrix where absent entries mean "no edge".
///
/// The diagonal is implicit: `get(i, i)` is always zero.
#[derive(Clone, Debug, PartialEq)]
pub struct CostMatrix<T> {
    n: usize,
    entries: Vec<Option<T>>,
}

impl<T: Scalar> CostMatrix<T> {
    /// An `n`-node matrix without any edges.
    pub fn new(n: usize) -> Self {
        Self { n, entries: vec![None; n * n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize, T)]) -> Result<Self> {
        let mut m = Self::new(n);
        for &(i, j, c) in edges {
            m.set(i, j, c)?;
        }
        Ok(m)
    }

    /// Complete matrix built from a pairwise cost function (called for `i < j`).
    pub fn complete_from_fn(n: usize, mut cost: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut m = Self::new(n);
        for i in 0..n {
            for j in i + 1..n {
                m.set(i, j, cost(i, j))?;
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sets the symmetric pair `(i, j)`. Self-loops only accept zero and are
    /// otherwise ignored.
    pub fn set(&mut self, i: usize, j: usize, cost: T) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::InvalidMatrix(format!(
                "edge ({i}, {j}) out of range for {} nodes",
                self.n
            )));
        }
        if !cost.is_finite() || cost < T::zero() {
            return Err(Error::InvalidMatrix(format!("edge ({i}, {j}) has cost {cost}")));
        }
        if i == j {
            if cost != T::zero() {
                return Err(Error::InvalidMatrix(format!("self-loop at {i} has cost {cost}")));
            }
            return Ok(());
        }
        self.entries[i * self.n + j] = Some(cost);
        self.entries[j * self.n + i] = Some(cost);
        Ok(())
    }

    pub fn remove(&mut self, i: usize, j: usize) {
        if i != j {
            self.entries[i * self.n + j] = None;
            self.entries[j * self.n + i] = None;
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        if i == j {
            Some(T::zero())
        } else {
            self.entries[i * self.n + j]
        }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.entries[i * self.n + j].is_some()
    }

    /// Present upper-triangle entries as `(i, j, cost)` with `i < j`, in
    /// row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n).flat_map(move |i| {
            (i + 1..self.n).filter_map(move |j| self.entries[i * self.n + j].map(|c| (i, j, c)))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        (0..self.n).filter_map(move |j| if i == j { None } else { self.entries[i * self.n + j].map(|c| (j, c)) })
    }

    /// First absent off-diagonal pair, if any.
    pub fn first_missing(&self) -> Option<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .find(|&(i, j)| self.entries[i * self.n + j].is_none())
    }

    pub fn is_complete(&self) -> bool {
        self.first_missing().is_none()
    }

    /// Connected components over present edges, each sorted, ordered by
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.n];
        let mut components = Vec::new();
        for root in 0..self.n {
            if label[root] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut members = vec![root];
            label[root] = id;
            let mut stack = vec![root];
            while let Some(u) = stack.pop() {
                for (v, _) in self.neighbors(u) {
                    if label[v] == usize::MAX {
                        label[v] = id;
                        members.push(v);
                        stack.push(v);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// Dense copy with every entry present, for solver inner loops.
    pub(crate) fn dense(&self) -> Result<DenseCosts<T>> {
        if let Some((i, j)) = self.first_missing() {
            return Err(Error::NotComplete(i, j));
        }
        let data = (0..self.n * self.n)
            .map(|k| if k / self.n == k % self.n { T::zero() } else { self.entries[k].unwrap() })
            .collect();
        Ok(DenseCosts { n: self.n, data })
    }
}

/// Complete cost matrix with direct indexing.
#[derive(Clone, Debug)]
pub(crate) struct DenseCosts<T> {
    pub(crate) n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseCosts<T> {
    #[inline(always)]
    pub(crate) fn at(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub(crate) fn path_cost(&self, order: &[usize]) -> T {
        order.windows(2).fold(T::zero(), |acc, w| acc + self.at(w[0], w[1]))
    }

    pub(crate) fn mean_edge_cost(&self) -> T {
        if self.n < 2 {
            return T::zero();
        }
        let mut sum = T::zero();
        for i in 0..self.n {
            for j in i + 1..self.n {
                sum = sum + self.at(i, j);
            }
        }
        sum / T::of_usize(self.n * (self.n - 1) / 2)
    }
}

/// A named set of inspection points with their (possibly incomplete) cost graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance<T> {
    pub name: String,
    pub points: Vec<Point3<T>>,
    pub costs: CostMatrix<T>,
    /// Free-form tags such as the generator kind or seed.
    pub metadata: BTreeMap<String, String>,
}

impl<T: Scalar> Instance<T> {
    pub fn new(name: impl Into<String>, points: Vec<Point3<T>>, costs: CostMatrix<T>) -> Result<Self> {
        let instance = Self { name: name.into(), points, costs, metadata: BTreeMap::new() };
        instance.check()?;
        Ok(instance)
    }

    /// Instance over `points` with Euclidean costs between every pair.
    pub fn complete_euclidean(name: impl Into<String>, points: Vec<Point3<T>>) -> Result<Self> {
        let costs = CostMatrix::complete_from_fn(points.len(), |i, j| points[i].distance(&points[j]))?;
        Self::new(name, points, costs)
    }

    /// Checks the structural invariants: at least one node, matching sizes and
    /// finite coordinates.
    pub fn check(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::InvalidInstance("instance has no nodes".into()));
        }
        if self.points.len() != self.costs.n() {
            return Err(Error::InvalidInstance(format!(
                "{} points but cost matrix has {} nodes",
                self.points.len(),
                self.costs.n()
            )));
        }
        if let Some(i) = self.points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidInstance(format!("point {i} has a non-finite coordinate")));
        }
        Ok(())
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.metadata.insert(key.into(), value.to_string());
        self
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn edge_count(&self) -> usize {
        self.costs.edge_count()
    }
}

/// An open route: the order in which nodes are visited.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Route(Vec<usize>);

impl Route {
    pub fn new(order: Vec<usize>) -> Self {
        Self(order)
    }

    /// The identity permutation `0, 1, …, n-1`.
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    /// The orientation whose first node is not larger than its last.
    pub fn canonical(self) -> Self {
        match (self.0.first(), self.0.last()) {
            (Some(a), Some(b)) if a > b => self.reversed(),
            _ => self,
        }
    }
}

impl From<Vec<usize>> for Route {
    fn from(order: Vec<usize>) -> Self {
        Self(order)
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// First problem found by [`validate_route`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RouteViolation {
    WrongLength { expected: usize, found: usize },
    OutOfRange(usize),
    DuplicateNode(usize),
    MissingEdge(usize, usize),
}

impl fmt::Display for RouteViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::WrongLength { expected, found } => {
                write!(f, "route visits {found} nodes, expected {expected}")
            }
            Self::OutOfRange(i) => write!(f, "node {i} out of range"),
            Self::DuplicateNode(i) => write!(f, "node {i} visited twice"),
            Self::MissingEdge(i, j) => write!(f, "no edge between {i} and {j}"),
        }
    }
}

/// Reports the first violation among: wrong length, out-of-range index,
/// duplicate index and (when `require_edges`) a missing edge.
pub fn validate_route<T: Scalar>(
    instance: &Instance<T>,
    route: &Route,
    require_edges: bool,
) -> Result<(), RouteViolation> {
    let n = instance.n();
    if route.len() != n {
        return Err(RouteViolation::WrongLength { expected: n, found: route.len() });
    }
    let mut seen = vec![false; n];
    for &v in route.order() {
        if v >= n {
            return Err(RouteViolation::OutOfRange(v));
        }
        if seen[v] {
            return Err(RouteViolation::DuplicateNode(v));
        }
        seen[v] = true;
    }
    if require_edges {
        if let Some(w) = route.order().windows(2).find(|w| !instance.costs.has_edge(w[0], w[1])) {
            return Err(RouteViolation::MissingEdge(w[0], w[1]));
        }
    }
    Ok(())
}

/// Cost of an open route: the sum of its `n − 1` consecutive edges, with no
/// closing edge.
pub fn evaluate_route<T: Scalar>(instance: &Instance<T>, route: &Route) -> Result<T> {
    match validate_route(instance, route, false) {
        Ok(()) => {}
        Err(v) => return Err(Error::InvalidRoute(v)),
    }
    route.order().windows(2).try_fold(T::zero(), |acc, w| {
        instance.costs.get(w[0], w[1]).map(|c| acc + c).ok_or(Error::MissingEdge(w[0], w[1]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(n: usize) -> Vec<Point3<f64>> {
        (0..n).map(|i| Point3::new(i as f64, 0.0, 0.0)).collect()
    }

    #[test]
    fn single_node_costs_nothing() {
        let inst = Instance::new("one", pts(1), CostMatrix::new(1)).unwrap();
        assert_eq!(evaluate_route(&inst, &Route::new(vec![0])).unwrap(), 0.0);
    }

    #[test]
    fn two_nodes_single_edge() {
        let costs = CostMatrix::from_edges(2, &[(0, 1, 5.0)]).unwrap();
        let inst = Instance::new("two", pts(2), costs).unwrap();
        assert_eq!(evaluate_route(&inst, &Route::new(vec![0, 1])).unwrap(), 5.0);
        assert_eq!(evaluate_route(&inst, &Route::new(vec![1, 0])).unwrap(), 5.0);
    }

    #[test]
    fn validation_reports_first_violation() {
        let inst = Instance::complete_euclidean("line", pts(3)).unwrap();
        assert_eq!(validate_route(&inst, &Route::new(vec![2, 0, 1]), true), Ok(()));
        assert_eq!(
            validate_route(&inst, &Route::new(vec![0, 0, 1]), true),
            Err(RouteViolation::DuplicateNode(0))
        );
        assert_eq!(
            validate_route(&inst, &Route::new(vec![0, 1]), true),
            Err(RouteViolation::WrongLength { expected: 3, found: 2 })
        );
        assert_eq!(
            validate_route(&inst, &Route::new(vec![0, 5, 5]), true),
            Err(RouteViolation::OutOfRange(5))
        );
    }

    #[test]
    fn missing_edge_detected() {
        let costs = CostMatrix::from_edges(3, &[(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let inst = Instance::new("path", pts(3), costs).unwrap();
        let route = Route::new(vec![1, 0, 2]);
        assert_eq!(validate_route(&inst, &route, true), Err(RouteViolation::MissingEdge(0, 2)));
        assert_eq!(validate_route(&inst, &route, false), Ok(()));
        assert!(matches!(evaluate_route(&inst, &route), Err(Error::MissingEdge(0, 2))));
        assert!(matches!(
            evaluate_route(&inst, &Route::new(vec![0, 1, 1])),
            Err(Error::InvalidRoute(RouteViolation::DuplicateNode(1)))
        ));
    }

    #[test]
    fn matrix_rejects_bad_costs() {
        let mut m = CostMatrix::<f64>::new(3);
        assert!(m.set(0, 1, -1.0).is_err());
        assert!(m.set(0, 1, f64::NAN).is_err());
        assert!(m.set(0, 3, 1.0).is_err());
        assert!(m.set(1, 1, 2.0).is_err());
        m.set(1, 1, 0.0).unwrap();
        m.set(2, 0, 4.0).unwrap();
        assert_eq!(m.get(0, 2), Some(4.0));
        assert_eq!(m.edges().collect::<Vec<_>>(), vec![(0, 2, 4.0)]);
        assert_eq!(m.components(), vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn canonical_orientation() {
        assert_eq!(Route::new(vec![3, 1, 0]).canonical().order(), &[0, 1, 3]);
        assert_eq!(Route::new(vec![0, 2, 1]).canonical().order(), &[0, 2, 1]);
    }
}
