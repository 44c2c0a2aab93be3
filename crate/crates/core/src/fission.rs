//! Qubit fission: splitting one graph-state qubit into two (or more)
//! co-located qubits while choosing which neighbors follow the new one.
//!
//! A single round on target `v` with split side `S` runs:
//!
//! 1. attach a star-shaped GHZ(|S|+1) ancilla (a Bell pair when |S| = 1)
//!    with center `v'` next to `v` and one leaf `b'` next to each `b` in `S`;
//! 2. `CZ(b, b')` for each `b` in `S`;
//! 3. local complementation at each leaf `b'`, which links `v'` to `b`;
//! 4. Z-measure each `b'`;
//! 5. `CZ(v, v')`, complement at `v'`, `CZ(v, v')`, complement at `v'`.
//!
//! Step 5 moves the edges `v-S` over to `v'`; the second complementation
//! undoes the clique toggled inside `S` by the first and is a no-op when
//! |S| = 1.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AncillaKind, CorrectionSet, GraphState, VertexId};

/// Declarative description of one fission round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FissionSpec {
    pub target: VertexId,
    /// Neighbors the caller wants attached to the new qubit.
    pub kept: BTreeSet<VertexId>,
    /// Side actually moved by the protocol: `kept`, or its complement in
    /// `N(target)` when `swap_sides` is set.
    pub split_side: BTreeSet<VertexId>,
    /// `None` only when `split_side` is empty.
    pub ancilla: Option<AncillaKind>,
    /// Exchange `target` and the new qubit at the end so `kept` lands on the
    /// new qubit.
    pub swap_sides: bool,
    /// `kept` is empty or all of `N(target)`.
    pub degenerate: bool,
}

impl FissionSpec {
    /// Number of Z measurements (and outcome bits) the round consumes.
    pub fn measurement_count(&self) -> usize {
        self.split_side.len()
    }

    /// GHZ size needed; 1 means no entangled ancilla at all.
    pub fn ghz_size(&self) -> usize {
        self.split_side.len() + 1
    }
}

/// One primitive step of an executed protocol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    AttachAncilla {
        kind: AncillaKind,
        hosts: Vec<VertexId>,
        vertices: Vec<VertexId>,
    },
    AddQubit {
        host: VertexId,
        vertex: VertexId,
    },
    Cz(VertexId, VertexId),
    LocalComplement(VertexId),
    MeasureZ {
        vertex: VertexId,
        outcome: u8,
        corrections: CorrectionSet,
    },
    Swap(VertexId, VertexId),
}

impl Step {
    /// Every vertex the step acts on.
    pub fn participants(&self) -> Vec<VertexId> {
        match self {
            Step::AttachAncilla {
                hosts, vertices, ..
            } => hosts.iter().chain(vertices).copied().collect(),
            Step::AddQubit { host, vertex } => vec![*host, *vertex],
            Step::Cz(a, b) | Step::Swap(a, b) => vec![*a, *b],
            Step::LocalComplement(a) => vec![*a],
            Step::MeasureZ { vertex, .. } => vec![*vertex],
        }
    }

    /// Applies the step to `g`, checking recorded data against the result.
    pub fn apply(&self, g: &GraphState) -> Result<GraphState> {
        match self {
            Step::AttachAncilla {
                kind,
                hosts,
                vertices,
            } => {
                let (out, fresh) = g.attach_ancilla(*kind, hosts)?;
                if &fresh != vertices {
                    return Err(Error::TranscriptMismatch(format!(
                        "attach_ancilla: recorded vertices {vertices:?}, replay created {fresh:?}"
                    )));
                }
                Ok(out)
            }
            Step::AddQubit { host, vertex } => {
                let (out, fresh) = g.add_qubit(*host)?;
                if fresh != *vertex {
                    return Err(Error::TranscriptMismatch(format!(
                        "add_qubit: recorded vertex {vertex}, replay created {fresh}"
                    )));
                }
                Ok(out)
            }
            Step::Cz(a, b) => g.apply_cz(*a, *b),
            Step::LocalComplement(a) => g.local_complement(*a),
            Step::MeasureZ {
                vertex,
                outcome,
                corrections,
            } => {
                let (out, expected) = g.measure_z(*vertex, *outcome)?;
                if &expected != corrections {
                    return Err(Error::TranscriptMismatch(format!(
                        "measure_z({vertex}): recorded corrections {:?}, expected {:?}",
                        corrections.pauli_z_targets, expected.pauli_z_targets
                    )));
                }
                Ok(out)
            }
            Step::Swap(a, b) => g.swap_vertices(*a, *b),
        }
    }
}

/// Replayable record of an executed protocol.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub steps: Vec<Step>,
    /// New qubits split off the target, one per round.
    pub split_vertices: Vec<VertexId>,
}

impl Transcript {
    pub fn replay(&self, start: &GraphState) -> Result<GraphState> {
        self.steps
            .iter()
            .try_fold(start.clone(), |g, step| step.apply(&g))
    }

    pub fn measured_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.steps.iter().filter_map(|s| match s {
            Step::MeasureZ { vertex, .. } => Some(*vertex),
            _ => None,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.wire()).expect("transcript JSON is infallible")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.wire()).expect("transcript JSON is infallible")
    }

    pub fn wire(&self) -> Vec<StepJson> {
        self.steps.iter().map(StepJson::from).collect()
    }

    /// Parses the step array. `split_vertices` is recovered from the ancilla
    /// steps (the first vertex each attachment creates).
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Vec<StepJson> = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("transcript JSON: {e}")))?;
        Transcript::from_wire(raw)
    }

    pub fn from_wire(raw: Vec<StepJson>) -> Result<Self> {
        let steps = raw
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                s.into_step()
                    .map_err(|e| Error::Parse(format!("transcript[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let split_vertices = steps
            .iter()
            .filter_map(|s| match s {
                Step::AttachAncilla { vertices, .. } => vertices.first().copied(),
                Step::AddQubit { vertex, .. } => Some(*vertex),
                _ => None,
            })
            .collect();
        Ok(Transcript {
            steps,
            split_vertices,
        })
    }
}

/// Wire form of a step: `{"op": .., "args": [..]}` plus op-specific fields.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepJson {
    pub op: String,
    pub args: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrections: Option<Vec<usize>>,
}

fn ids(v: &[VertexId]) -> Vec<usize> {
    v.iter().map(|x| x.0).collect()
}

impl From<&Step> for StepJson {
    fn from(step: &Step) -> Self {
        let bare = |op: &str, args: Vec<usize>| StepJson {
            op: op.to_string(),
            args,
            kind: None,
            vertices: None,
            outcome: None,
            corrections: None,
        };
        match step {
            Step::AttachAncilla {
                kind,
                hosts,
                vertices,
            } => StepJson {
                kind: Some(kind.name().to_string()),
                vertices: Some(ids(vertices)),
                ..bare("attach_ancilla", ids(hosts))
            },
            Step::AddQubit { host, vertex } => StepJson {
                vertices: Some(vec![vertex.0]),
                ..bare("add_qubit", vec![host.0])
            },
            Step::Cz(a, b) => bare("cz", vec![a.0, b.0]),
            Step::LocalComplement(a) => bare("local_complement", vec![a.0]),
            Step::MeasureZ {
                vertex,
                outcome,
                corrections,
            } => StepJson {
                outcome: Some(*outcome),
                corrections: Some(corrections.iter().map(|v| v.0).collect()),
                ..bare("measure_z", vec![vertex.0])
            },
            Step::Swap(a, b) => bare("swap", vec![a.0, b.0]),
        }
    }
}

impl StepJson {
    fn into_step(self) -> std::result::Result<Step, String> {
        let arity = |n: usize| -> std::result::Result<(), String> {
            if self.args.len() == n {
                Ok(())
            } else {
                Err(format!(
                    "args: {} expects {n} entries, got {}",
                    self.op,
                    self.args.len()
                ))
            }
        };
        let v = |i: usize| VertexId(self.args[i]);
        Ok(match self.op.as_str() {
            "attach_ancilla" => {
                let hosts: Vec<VertexId> = self.args.iter().copied().map(VertexId).collect();
                let kind = match self.kind.as_deref() {
                    Some("bell") => AncillaKind::Bell,
                    Some("ghz") => AncillaKind::Ghz(hosts.len()),
                    other => {
                        return Err(format!("kind: expected \"bell\" or \"ghz\", got {other:?}"))
                    }
                };
                let vertices = self
                    .vertices
                    .as_ref()
                    .ok_or("vertices: missing")?
                    .iter()
                    .copied()
                    .map(VertexId)
                    .collect();
                Step::AttachAncilla {
                    kind,
                    hosts,
                    vertices,
                }
            }
            "add_qubit" => {
                arity(1)?;
                let vertex = match self.vertices.as_deref() {
                    Some([x]) => VertexId(*x),
                    _ => return Err("vertices: add_qubit expects exactly one".into()),
                };
                Step::AddQubit { host: v(0), vertex }
            }
            "cz" => {
                arity(2)?;
                Step::Cz(v(0), v(1))
            }
            "local_complement" => {
                arity(1)?;
                Step::LocalComplement(v(0))
            }
            "measure_z" => {
                arity(1)?;
                let outcome = self.outcome.ok_or("outcome: missing")?;
                if outcome > 1 {
                    return Err(format!("outcome: expected 0 or 1, got {outcome}"));
                }
                let corrections = CorrectionSet {
                    pauli_z_targets: self
                        .corrections
                        .unwrap_or_default()
                        .into_iter()
                        .map(VertexId)
                        .collect(),
                };
                Step::MeasureZ {
                    vertex: v(0),
                    outcome,
                    corrections,
                }
            }
            "swap" => {
                arity(2)?;
                Step::Swap(v(0), v(1))
            }
            other => return Err(format!("op: unknown operation {other:?}")),
        })
    }
}

/// Result of one or more fission rounds.
#[derive(Clone, Debug)]
pub struct FissionOutcome {
    pub graph: GraphState,
    pub transcript: Transcript,
    pub ancilla_qubits_used: usize,
    pub ancilla_ebits_used: usize,
    /// Number of fission rounds performed.
    pub rounds: usize,
    pub degenerate: bool,
}

impl FissionOutcome {
    /// The most recent split-off qubit.
    pub fn new_vertex(&self) -> VertexId {
        *self
            .transcript
            .split_vertices
            .last()
            .expect("every fission creates a split vertex")
    }
}

/// Chooses the ancilla for splitting `kept` off `target`. The GHZ state is
/// sized by the smaller of `kept` and its complement in `N(target)`; when the
/// complement is smaller it is split off instead and the two halves swap
/// roles at the end.
pub fn plan_fission(
    g: &GraphState,
    target: VertexId,
    kept: &BTreeSet<VertexId>,
) -> Result<FissionSpec> {
    let nbhd = g.neighborhood(target)?;
    check_subset(target, kept, &nbhd)?;
    let complement: BTreeSet<VertexId> = nbhd.difference(kept).copied().collect();
    let swap_sides = complement.len() < kept.len();
    let split_side = if swap_sides {
        complement.clone()
    } else {
        kept.clone()
    };
    Ok(FissionSpec {
        target,
        kept: kept.clone(),
        ancilla: ancilla_for(split_side.len()),
        degenerate: kept.is_empty() || complement.is_empty(),
        split_side,
        swap_sides,
    })
}

fn ancilla_for(side: usize) -> Option<AncillaKind> {
    match side {
        0 => None,
        1 => Some(AncillaKind::Bell),
        s => Some(AncillaKind::Ghz(s + 1)),
    }
}

fn check_subset(
    target: VertexId,
    subset: &BTreeSet<VertexId>,
    nbhd: &BTreeSet<VertexId>,
) -> Result<()> {
    match subset.iter().find(|b| !nbhd.contains(b)) {
        Some(&vertex) => Err(Error::NotNeighbor { target, vertex }),
        None => Ok(()),
    }
}

/// Runs one fission round. `outcomes` holds one bit per ancilla-leaf
/// measurement, in ascending order of the split-side neighbor.
pub fn execute_fission(
    g: &GraphState,
    spec: &FissionSpec,
    outcomes: &[u8],
) -> Result<FissionOutcome> {
    let v = spec.target;
    let nbhd = g.neighborhood(v)?;
    check_subset(v, &spec.kept, &nbhd)?;
    let expected_side: BTreeSet<VertexId> = if spec.swap_sides {
        nbhd.difference(&spec.kept).copied().collect()
    } else {
        spec.kept.clone()
    };
    if expected_side != spec.split_side {
        return Err(Error::TranscriptMismatch(format!(
            "spec: split side {:?} does not match the graph (expected {:?})",
            spec.split_side, expected_side
        )));
    }
    if spec.ancilla != ancilla_for(spec.split_side.len()) {
        return Err(Error::TranscriptMismatch(format!(
            "spec: ancilla {:?} does not fit a split side of size {}",
            spec.ancilla,
            spec.split_side.len()
        )));
    }
    if outcomes.len() != spec.measurement_count() {
        return Err(Error::OutcomeArity {
            expected: spec.measurement_count(),
            got: outcomes.len(),
        });
    }

    let side: Vec<VertexId> = spec.split_side.iter().copied().collect();
    let mut steps = Vec::new();
    let mut graph = g.clone();
    let mut run = |graph: &mut GraphState, step: Step| -> Result<()> {
        *graph = step.apply(graph)?;
        steps.push(step);
        Ok(())
    };

    let (new_vertex, leaves) = match spec.ancilla {
        Some(kind) => {
            let hosts: Vec<VertexId> = std::iter::once(v).chain(side.iter().copied()).collect();
            let vertices: Vec<VertexId> = (0..hosts.len())
                .map(|i| VertexId(graph.vertex_count() + i))
                .collect();
            run(
                &mut graph,
                Step::AttachAncilla {
                    kind,
                    hosts,
                    vertices: vertices.clone(),
                },
            )?;
            (vertices[0], vertices[1..].to_vec())
        }
        None => {
            let vertex = VertexId(graph.vertex_count());
            run(&mut graph, Step::AddQubit { host: v, vertex })?;
            (vertex, Vec::new())
        }
    };

    for (&b, &leaf) in side.iter().zip(&leaves) {
        run(&mut graph, Step::Cz(b, leaf))?;
    }
    for &leaf in &leaves {
        run(&mut graph, Step::LocalComplement(leaf))?;
    }
    for (&leaf, &outcome) in leaves.iter().zip(outcomes) {
        let (_, corrections) = graph.measure_z(leaf, outcome)?;
        run(
            &mut graph,
            Step::MeasureZ {
                vertex: leaf,
                outcome,
                corrections,
            },
        )?;
    }
    run(&mut graph, Step::Cz(v, new_vertex))?;
    run(&mut graph, Step::LocalComplement(new_vertex))?;
    run(&mut graph, Step::Cz(v, new_vertex))?;
    run(&mut graph, Step::LocalComplement(new_vertex))?;
    if spec.swap_sides {
        run(&mut graph, Step::Swap(v, new_vertex))?;
    }

    let (qubits, ebits) = match spec.ancilla {
        Some(kind) => (kind.qubits(), 1),
        None => (1, 0),
    };
    Ok(FissionOutcome {
        graph,
        transcript: Transcript {
            steps,
            split_vertices: vec![new_vertex],
        },
        ancilla_qubits_used: qubits,
        ancilla_ebits_used: ebits,
        rounds: 1,
        degenerate: spec.degenerate,
    })
}

/// Splits `target` so the new qubit carries exactly `keep`, using one Bell
/// pair.
pub fn fission_one_neighbor(
    g: &GraphState,
    target: VertexId,
    keep: VertexId,
    outcome: u8,
) -> Result<FissionOutcome> {
    let nbhd = g.neighborhood(target)?;
    let kept = BTreeSet::from([keep]);
    check_subset(target, &kept, &nbhd)?;
    let spec = FissionSpec {
        target,
        split_side: kept.clone(),
        kept,
        ancilla: Some(AncillaKind::Bell),
        swap_sides: false,
        degenerate: nbhd.len() == 1,
    };
    execute_fission(g, &spec, &[outcome])
}

fn validate_partition(
    g: &GraphState,
    target: VertexId,
    partition: &[BTreeSet<VertexId>],
) -> Result<()> {
    let nbhd = g.neighborhood(target)?;
    if partition.len() < 2 {
        return Err(Error::InvalidPartition(format!(
            "need at least 2 blocks, got {}",
            partition.len()
        )));
    }
    let mut seen = BTreeSet::new();
    for block in partition {
        for &b in block {
            if !nbhd.contains(&b) {
                return Err(Error::NotNeighbor { target, vertex: b });
            }
            if !seen.insert(b) {
                return Err(Error::InvalidPartition(format!(
                    "vertex {b} appears in two blocks"
                )));
            }
        }
    }
    if seen != nbhd {
        let missing: Vec<_> = nbhd.difference(&seen).collect();
        return Err(Error::InvalidPartition(format!(
            "blocks miss neighbors {missing:?}"
        )));
    }
    Ok(())
}

/// Outcome bits `iterate_fission` consumes for this partition.
pub fn partition_measurement_count(partition: &[BTreeSet<VertexId>]) -> usize {
    let mut remaining: usize = partition.iter().map(BTreeSet::len).sum();
    let mut total = 0;
    for block in partition.iter().take(partition.len().saturating_sub(1)) {
        remaining -= block.len();
        total += block.len().min(remaining);
    }
    total
}

/// Splits `target` into `partition.len()` qubits: round `i` moves block `i`
/// onto a fresh qubit, and `target` keeps the last block.
pub fn iterate_fission(
    g: &GraphState,
    target: VertexId,
    partition: &[BTreeSet<VertexId>],
    outcomes: &[u8],
) -> Result<FissionOutcome> {
    validate_partition(g, target, partition)?;
    let needed = partition_measurement_count(partition);
    if outcomes.len() != needed {
        return Err(Error::OutcomeArity {
            expected: needed,
            got: outcomes.len(),
        });
    }
    let mut graph = g.clone();
    let mut total = FissionOutcome {
        graph: g.clone(),
        transcript: Transcript::default(),
        ancilla_qubits_used: 0,
        ancilla_ebits_used: 0,
        rounds: 0,
        degenerate: false,
    };
    let mut cursor = 0;
    for block in &partition[..partition.len() - 1] {
        let spec = plan_fission(&graph, target, block)?;
        let bits = &outcomes[cursor..cursor + spec.measurement_count()];
        cursor += bits.len();
        let round = execute_fission(&graph, &spec, bits)?;
        graph = round.graph;
        total.transcript.steps.extend(round.transcript.steps);
        total
            .transcript
            .split_vertices
            .extend(round.transcript.split_vertices);
        total.ancilla_qubits_used += round.ancilla_qubits_used;
        total.ancilla_ebits_used += round.ancilla_ebits_used;
        total.rounds += 1;
        total.degenerate |= round.degenerate;
    }
    total.graph = graph;
    Ok(total)
}
