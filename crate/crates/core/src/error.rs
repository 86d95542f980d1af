use thiserror::Error;

use crate::ci::Regime;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(usize, usize),
    #[error("graph contains a directed cycle through vertex {0}")]
    Cycle(usize),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("unknown regime {0:?}")]
    UnknownRegime(Regime),
    #[error("need at least {needed} samples, have {have}")]
    SampleSize { needed: usize, have: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Prefix learning made no progress; only reachable with a noisy tester.
    #[error("prefix learning stalled at |S| = {prefix_len} of {n}")]
    Stall { prefix_len: usize, n: usize },
    #[error("input: {0}")]
    Input(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
