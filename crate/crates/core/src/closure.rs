//! Reduction of the open-route problem to a closed tour by adding a dummy
//! node, and the inverse mapping from tours back to open routes.

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::num::Scalar;
use crate::problem::{CostMatrix, Instance, Route};

/// Adds a dummy node `n` joined to every node at zero cost. The optimal
/// closed tour of the result, with the dummy removed, is an optimal open
/// route of `instance`.
pub fn close_with_dummy<T: Scalar>(instance: &Instance<T>) -> Result<Instance<T>> {
    let all: Vec<usize> = (0..instance.n()).collect();
    close_with_dummy_endpoints(instance, &all)
}

/// Like [`close_with_dummy`], but the dummy only connects to `endpoints`,
/// restricting where the open route may start and end.
pub fn close_with_dummy_endpoints<T: Scalar>(instance: &Instance<T>, endpoints: &[usize]) -> Result<Instance<T>> {
    if let Some((i, j)) = instance.costs.first_missing() {
        return Err(Error::NotComplete(i, j));
    }
    let n = instance.n();
    if let Some(&bad) = endpoints.iter().find(|&&e| e >= n) {
        return Err(Error::BadStart { start: bad, n });
    }
    let mut costs = CostMatrix::new(n + 1);
    for (i, j, c) in instance.costs.edges() {
        costs.set(i, j, c)?;
    }
    for &e in endpoints {
        costs.set(e, n, T::zero())?;
    }
    let mut points = instance.points.clone();
    points.push(centroid(&instance.points));
    let mut closed = Instance::new(format!("{}+dummy", instance.name), points, costs)?;
    closed.metadata = instance.metadata.clone();
    closed.metadata.insert("dummy_node".into(), n.to_string());
    Ok(closed)
}

fn centroid<T: Scalar>(points: &[Point3<T>]) -> Point3<T> {
    let sum = points.iter().fold(Point3::zero(), |acc, p| acc + *p);
    sum * (T::one() / T::of_usize(points.len().max(1)))
}

/// Rotates a closed tour so the dummy comes first and drops it.
pub fn strip_dummy(tour: &Route, dummy: usize) -> Result<Route> {
    let order = tour.order();
    let at = order.iter().position(|&v| v == dummy).ok_or(Error::DummyMissing(dummy))?;
    let mut route = Vec::with_capacity(order.len().saturating_sub(1));
    route.extend_from_slice(&order[at + 1..]);
    route.extend_from_slice(&order[..at]);
    Ok(Route::new(route))
}
