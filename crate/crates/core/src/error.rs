use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coefficient matrix is singular (rank {rank} < {required})")]
    SingularMatrix { rank: usize, required: usize },

    #[error("matrix dimensions do not match: {0}")]
    DimensionMismatch(String),

    #[error("generation cannot be decoded: coefficient rows have rank {rank} < {k}")]
    UndecodableGeneration { rank: usize, k: usize },

    #[error("encoder failed to draw a decodable coefficient matrix after {0} attempts")]
    RedrawLimit(usize),

    #[error("frame is empty")]
    EmptyFrame,

    #[error("no path from node {src} to node {dst}")]
    NoPath { src: usize, dst: usize },

    #[error("topology parse error on line {line}: {message}")]
    TopologyParse { line: usize, message: String },

    #[error("unknown node {0}")]
    UnknownNode(usize),

    #[error("request blocking probability is 1; conditional mean is undefined")]
    DegenerateConditioning,

    #[error("mean differential delay without redundancy is zero; reduction ratio is undefined")]
    DegenerateBaseline,

    #[error("scheduler cycle {cycle} tu exceeds one time unit")]
    CycleTooLong { cycle: f64 },

    #[error("only {available} paths available, {required} required")]
    InsufficientPaths { available: usize, required: usize },

    #[error("every replication was blocked")]
    AllBlocked,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid sweep specification {spec:?}: {message}")]
    InvalidSweep { spec: String, message: String },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
