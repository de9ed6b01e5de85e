use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },

    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("set is not independent: vertices {0} and {1} are adjacent")]
    NotIndependent(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} limit exceeded: {actual} > {limit}")]
    LimitExceeded {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("bitstring length {actual} does not match vertex count {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("sampler returned no usable shots")]
    NoValidShots,

    #[error("integrator failed to converge: {0}")]
    Integrator(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A solve stopped early; `partial` holds everything computed so far.
    #[error("solve stopped after {} iterations: {source}", partial.iterations)]
    Interrupted {
        source: Box<Error>,
        partial: Box<crate::driver::SolveReport>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
