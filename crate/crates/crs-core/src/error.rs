//! Crate-wide error type.

use thiserror::Error;

/// Errors across all modules. Structural problems with an instance are kept
/// distinct from infeasibility (a structurally sound instance outside the
/// matching polytope).
#[derive(Debug, Error)]
pub enum Error {
    #[error("edge {edge}: endpoint {vertex} out of range (vertex count {vertex_count})")]
    EndpointOutOfRange {
        edge: usize,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("edge {edge}: self-loop at vertex {vertex}")]
    SelfLoop { edge: usize, vertex: usize },
    #[error("edges {first} and {second} connect the same vertex pair")]
    DuplicateEdge { first: usize, second: usize },
    #[error("edge {edge}: value {x} outside [0, 1]")]
    EdgeValueOutOfRange { edge: usize, x: f64 },
    #[error("arrival order is not a permutation of 0..{edge_count}")]
    BadArrivalOrder { edge_count: usize },
    #[error("bipartition: {reason}")]
    BadBipartition { reason: String },
    #[error("symmetry classes: {reason}")]
    BadSymmetryClasses { reason: String },
    #[error("instance is infeasible: vertex {vertex} carries load {load}")]
    Infeasible { vertex: usize, load: f64 },
    #[error("instance is not 1-regular: vertex {vertex} carries load {load}")]
    NotOneRegular { vertex: usize, load: f64 },
    #[error("graph is not bipartite")]
    NotBipartite,
    #[error("graph contains a cycle of length 3 or 5")]
    ShortOddCycle,
    #[error("vertex {vertex} out of range")]
    VertexOutOfRange { vertex: usize },
    #[error("edge index {edge} out of range")]
    EdgeOutOfRange { edge: usize },
    #[error("arrival index {index} out of range (edge count {edge_count})")]
    ArrivalIndexOutOfRange { index: usize, edge_count: usize },
    #[error("{what} must lie in [{lo}, {hi}], got {value}")]
    ParamOutOfRange {
        what: &'static str,
        lo: f64,
        hi: f64,
        value: f64,
    },
    #[error("instance has {vertices} vertices; the exact DP is limited to {limit}")]
    VertexLimitExceeded { vertices: usize, limit: usize },
    #[error("{what} must be positive")]
    ZeroCount { what: &'static str },
    #[error("an exact-mode plan is required")]
    ExactPlanRequired,
    #[error("plan does not match instance: {reason}")]
    PlanMismatch { reason: String },
    #[error("no symmetry classes declared; pooling never infers symmetry")]
    NoSymmetryClasses,
    #[error("dimension mismatch: {reason}")]
    DimensionMismatch { reason: String },
    #[error("K must exceed 2 for the auxiliary objective")]
    AuxCutoffTooSmall,
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
