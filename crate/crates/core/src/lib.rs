//! Open-route TSP on incomplete graphs of 3D inspection points.
//!
//! The crate covers the whole pipeline: segmenting a surface mesh into
//! inspection patches ([`ingest`]), building a sparse cost graph over the
//! inspection points, metric-completing it so every permutation has a cost
//! ([`completion`]), solving for a minimum-cost open route ([`solvers`]),
//! expanding the route back onto physical edges, and benchmarking solvers
//! by approximation ratio against an exact baseline ([`bench`]).
//!
//! Model and solver types are generic over [`Scalar`] (`f32` or `f64`);
//! the aliases at the crate root fix the scalar to `f64`.

pub mod bench;
pub mod closure;
pub mod completion;
pub mod error;
pub mod geometry;
pub mod ingest;
pub mod num;
pub mod problem;
pub mod rng;
pub mod solvers;

pub use closure::{close_with_dummy, close_with_dummy_endpoints, strip_dummy};
pub use completion::{expand_route, metric_completion, ShortestPaths};
pub use error::{Error, Result};
pub use num::Scalar;
pub use problem::{evaluate_route, validate_route, Route, RouteViolation};

pub type Point3 = geometry::Point3<f64>;
pub type CostMatrix = problem::CostMatrix<f64>;
pub type Instance = problem::Instance<f64>;
pub type ExpandedRoute = completion::ExpandedRoute<f64>;
pub type Mesh = ingest::Mesh<f64>;
pub type Patch = ingest::Patch<f64>;
pub type SolveResult = solvers::SolveResult<f64>;

pub type InstanceF32 = problem::Instance<f32>;
pub type SolveResultF32 = solvers::SolveResult<f32>;
