use thiserror::Error;

use crate::graph::VertexId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),

    #[error("labels: expected {expected} entries, got {got}")]
    LabelCount { expected: usize, got: usize },

    #[error("labels: duplicate label {0:?}")]
    DuplicateLabel(String),

    #[error("ancilla: {kind} needs {expected} hosts, got {got}")]
    AncillaArity {
        kind: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("ancilla: GHZ size must be at least 2, got {0}")]
    GhzTooSmall(usize),

    #[error("ancilla: duplicate host {0}")]
    DuplicateHost(VertexId),

    #[error("kept: vertex {vertex} is not a neighbor of target {target}")]
    NotNeighbor { target: VertexId, vertex: VertexId },

    #[error("outcomes: expected {expected} bits, got {got}")]
    OutcomeArity { expected: usize, got: usize },

    #[error("partition: {0}")]
    InvalidPartition(String),

    #[error("oracle: {n} qubits exceeds the cap of {max}")]
    TooManyQubits { n: usize, max: usize },

    #[error("oracle: dimension mismatch ({left} vs {right} qubits)")]
    DimensionMismatch { left: usize, right: usize },

    #[error("oracle: outcome {outcome} on qubit {qubit} has zero probability")]
    ZeroProbability { qubit: usize, outcome: u8 },

    #[error("transcript: {0}")]
    TranscriptMismatch(String),

    #[error("audit: {0}")]
    AuditMismatch(String),

    #[error("budget must be at least 1")]
    ZeroBudget,

    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
