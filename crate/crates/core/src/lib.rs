//! Graph-state fission.
//!
//! Split one qubit of a graph state into several co-located qubits, choosing
//! which neighbors follow each part, at the cost of one Bell pair or GHZ
//! state per split. The crate provides
//!
//! * [`graph`]: the graph calculus (CZ, local complementation, Z measurement);
//! * [`fission`]: the fission protocols with replayable transcripts;
//! * [`analysis`]: GF(2) cut-rank accounting, fission audits and a bounded
//!   local-complementation orbit search that shrinks the ancilla;
//! * [`oracle`]: a dense statevector simulator that checks every rewrite;
//! * [`dot`]: Graphviz output;
//! * [`generate`]: random and exhaustive graph generators for test suites.

pub mod analysis;
pub mod bits;
pub mod dot;
pub mod error;
pub mod fission;
pub mod generate;
pub mod graph;
pub mod oracle;

pub use analysis::{
    audit_fission, check_one_uniform, cut_rank, minimize_resources, Bipartition, FissionAudit,
    OrbitConfig, OrbitResult,
};
pub use error::{Error, Result};
pub use fission::{
    execute_fission, fission_one_neighbor, iterate_fission, plan_fission, FissionOutcome,
    FissionSpec, Step, Transcript,
};
pub use graph::{AncillaKind, CanonicalKey, CorrectionSet, GraphState, VertexId};
pub use oracle::{build_graph_state, equal_up_to_global_phase, StateVector};
