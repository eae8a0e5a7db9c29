use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vertex {vertex} out of range (vertex count {count})")]
    VertexOutOfRange { vertex: usize, count: usize },

    #[error("community {index} out of range (community count {count})")]
    CommunityOutOfRange { index: usize, count: usize },

    #[error("malformed graph: {0}")]
    MalformedGraph(String),

    #[error("domain mismatch: expected {expected}, found {found}")]
    DomainMismatch { expected: String, found: String },

    #[error("not a probability vector: {0}")]
    NotProbability(String),

    /// Positive mass (or a walker) sits on a vertex without out-edges.
    #[error("vertex {vertex} has no out-edges")]
    Sink { vertex: usize },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("subset carries zero mass")]
    ZeroMass,

    #[error("entropy is zero: every out-degree is at most one")]
    ZeroEntropy,

    #[error("community {0} has no gates")]
    NoGates(usize),

    #[error("every vertex of community {0} is a gate")]
    EmptyComplement(usize),

    #[error("limiting profile undefined at beta = 1 in this regime")]
    UndefinedAtOne,

    #[error("unsupported graph file version {0}")]
    FormatVersion(u32),

    #[error("graph file parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}
