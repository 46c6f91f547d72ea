use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("edge {edge} is a self-loop on vertex {vertex}")]
    SelfLoop { edge: usize, vertex: usize },
    #[error("edge {edge} duplicates edge {first} ({x}, {y})")]
    DuplicateEdge { edge: usize, first: usize, x: usize, y: usize },
    #[error("graph is disconnected: vertex {vertex} is unreachable from vertex 0")]
    Disconnected { vertex: usize },
    #[error("vertex {vertex} out of range for a graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },
    #[error("graph must have at least one vertex")]
    EmptyGraph,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("k = {k} out of range [{min}, {max}]")]
    KOutOfRange { k: usize, min: usize, max: usize },
    #[error("node {node} out of range for a tree with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("malformed merge {merge}: {reason}")]
    InvalidMerge { merge: usize, reason: &'static str },
    #[error("weight of edge {edge} is {value}, expected a strictly positive value")]
    NonpositiveWeight { edge: usize, value: f64 },
    #[error("triplet {index} has ref == neg")]
    DegenerateTriplet { index: usize },
    #[error("cost became non-finite at iteration {iteration}")]
    NonFiniteCost { iteration: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("at least two classes with a labeled pair are required to sample triplets")]
    InsufficientClasses,
    #[error("input too large for this reference: {size} exceeds {limit}")]
    TooLarge { size: usize, limit: usize },
}
