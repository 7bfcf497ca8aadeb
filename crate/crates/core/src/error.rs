use thiserror::Error;

use crate::problem::RouteViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid route: {0}")]
    InvalidRoute(RouteViolation),
    #[error("no edge between nodes {0} and {1}")]
    MissingEdge(usize, usize),
    #[error("invalid cost matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("graph is disconnected into {} components", .0.len())]
    Disconnected(Vec<Vec<usize>>),
    #[error("shortest-path table does not lead from {0} to {1}")]
    InconsistentVia(usize, usize),
    #[error("cost matrix has no entry for ({0}, {1}); metric completion required")]
    NotComplete(usize, usize),
    #[error("dummy node {0} missing from tour")]
    DummyMissing(usize),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("mesh has no usable faces")]
    EmptyMesh,
    #[error("instance with {n} nodes exceeds the solver limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("start node {start} out of range for {n} nodes")]
    BadStart { start: usize, n: usize },
    #[error("baseline cost {baseline} exceeds obtained cost {obtained}")]
    BaselineWorse { baseline: f64, obtained: f64 },
    #[error("no baseline cost available for instance {0}")]
    BaselineUnavailable(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown solver {0:?}")]
    UnknownSolver(String),
    /// Shows only `context`; the wrapped error is the [`source`](std::error::Error::source).
    #[error("{context}")]
    Context { context: String, source: Box<Error> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { location: location.into(), message: message.into() }
    }

    /// Wraps `self` with a description of what was being processed.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), source: Box::new(self) }
    }

    /// The innermost error beneath any context layers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema { path: path.into(), message: message.into() }
    }
}
