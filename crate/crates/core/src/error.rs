use thiserror::Error;

use crate::graph::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph must have at least one node")]
    EmptyGraph,

    #[error("node id {id} out of range 1..={n}")]
    NodeOutOfRange { id: usize, n: usize },

    #[error("invalid graph: {0}")]
    Invalid(ValidationReport),

    #[error("layer index {k} out of range 1..={depth}")]
    LayerOutOfRange { k: usize, depth: usize },

    #[error("leaders with incoming edges are present; layered analysis requires every leader in the top layer")]
    NonSourceLeaders,

    #[error("target node {} is not a sink of the prefix graph", .0 + 1)]
    TargetNotSink(usize),

    #[error("node {} is not among the targets", .0 + 1)]
    NotATarget(usize),

    #[error("enumeration budget exceeded: {nodes} nodes > cap {cap}")]
    BudgetExceeded { nodes: usize, cap: usize },

    #[error("operation requires exactly one leader, found {0}")]
    NotSingleLeader(usize),

    #[error("witness covers {covered} nodes but the generic dimension is {dimension}")]
    WitnessNotMaximum { covered: usize, dimension: usize },

    #[error("invalid stem family: {0}")]
    InvalidWitness(String),

    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),

    #[error("at least one trial is required")]
    NoTrials,

    #[error("numeric analysis inconclusive: best rank {best_rank} below generic dimension {dimension} after {trials} trials")]
    Inconclusive {
        best_rank: usize,
        dimension: usize,
        trials: usize,
    },

    #[error("generator: {0}")]
    Generator(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
