//! Entanglement accounting over GF(2).
//!
//! For a graph state the number of ebits across a bipartition `(A, B)` is
//! the GF(2) rank of the adjacency block `Γ[A, B]`. Everything here is
//! built on that identity: fission audits compare the rank of the split
//! node against the ancilla entanglement spent, and the orbit search looks
//! for a locally equivalent graph where the split needs a smaller GHZ state.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;

use crate::bits::{gf2_rank, BitRow};
use crate::error::{Error, Result};
use crate::fission::FissionOutcome;
use crate::graph::{CanonicalKey, GraphState, VertexId};

/// A vertex subset; the other side is its complement.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bipartition {
    pub side_a: BTreeSet<VertexId>,
}

impl Bipartition {
    pub fn new(side_a: impl IntoIterator<Item = VertexId>) -> Self {
        Bipartition {
            side_a: side_a.into_iter().collect(),
        }
    }

    pub fn single(v: VertexId) -> Self {
        Bipartition::new([v])
    }

    pub fn complement(&self, n: usize) -> Bipartition {
        Bipartition::new((0..n).map(VertexId).filter(|v| !self.side_a.contains(v)))
    }
}

/// GF(2) rank of `Γ[A, V \ A]`, the ebit count across the cut.
pub fn cut_rank(g: &GraphState, p: &Bipartition) -> Result<usize> {
    for &a in &p.side_a {
        g.check(a)?;
    }
    let n = g.vertex_count();
    let other: Vec<usize> = (0..n)
        .filter(|i| !p.side_a.contains(&VertexId(*i)))
        .collect();
    if p.side_a.is_empty() || other.is_empty() {
        return Ok(0);
    }
    let rows = p
        .side_a
        .iter()
        .map(|&a| {
            let row = g.row(a);
            BitRow::from_indices(
                other.len(),
                other
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| row.get(b))
                    .map(|(j, _)| j),
            )
        })
        .collect();
    Ok(gf2_rank(rows))
}

/// True iff `g` is connected and every single-vertex cut carries one ebit.
pub fn check_one_uniform(g: &GraphState) -> bool {
    g.is_connected()
        && g.vertices()
            .all(|v| cut_rank(g, &Bipartition::single(v)) == Ok(1))
}

/// Entanglement bookkeeping for one fission run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FissionAudit {
    #[serde(rename = "pre")]
    pub pre_ebits_target: usize,
    #[serde(rename = "post")]
    pub post_ebits_node: usize,
    #[serde(rename = "ancilla")]
    pub ancilla_ebits_supplied: usize,
    pub satisfied: bool,
}

impl FissionAudit {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("audit JSON is infallible")
    }
}

/// Compares the ebits held by `target` before fission with those held by
/// the whole node (target plus split-off qubits) afterwards. Local
/// operations cannot create entanglement across the node cut, so the gain
/// must be paid for by the ancillas, one ebit per round.
pub fn audit_fission(
    pre: &GraphState,
    outcome: &FissionOutcome,
    target: VertexId,
) -> Result<FissionAudit> {
    pre.check(target)?;
    let post = &outcome.graph;
    if post.vertex_count() < pre.vertex_count() {
        return Err(Error::AuditMismatch(format!(
            "outcome graph has {} vertices, fewer than the input's {}",
            post.vertex_count(),
            pre.vertex_count()
        )));
    }
    for &s in &outcome.transcript.split_vertices {
        if s.0 < pre.vertex_count() || s.0 >= post.vertex_count() {
            return Err(Error::AuditMismatch(format!(
                "split vertex {s} is not a new vertex"
            )));
        }
    }
    let pre_ebits = cut_rank(pre, &Bipartition::single(target))?;
    let node = Bipartition::new(
        std::iter::once(target).chain(outcome.transcript.split_vertices.iter().copied()),
    );
    let post_ebits = cut_rank(post, &node)?;
    let supplied = outcome.rounds;
    Ok(FissionAudit {
        pre_ebits_target: pre_ebits,
        post_ebits_node: post_ebits,
        ancilla_ebits_supplied: supplied,
        satisfied: post_ebits <= pre_ebits + supplied,
    })
}

/// GHZ size needed to split `kept` off a node whose other neighbors are
/// `rest`.
pub fn ghz_cost(kept: usize, rest: usize) -> usize {
    kept.min(rest) + 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitConfig {
    /// Maximum number of search states expanded.
    pub budget: usize,
    /// Also allow complementation at the target itself. Such moves leave
    /// the kept set as is, and the reversed sequence no longer maps the
    /// fissioned representative back to a fission of the input.
    pub include_target: bool,
}

impl OrbitConfig {
    pub fn with_budget(budget: usize) -> Self {
        OrbitConfig {
            budget,
            include_target: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitResult {
    pub representative: GraphState,
    pub lc_sequence: Vec<VertexId>,
    /// Image of the caller's kept set in `representative`.
    pub kept: BTreeSet<VertexId>,
    pub cost_before: usize,
    pub cost_after: usize,
    pub nodes_explored: usize,
    pub exhausted: bool,
}

impl OrbitResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("orbit JSON is infallible")
    }
}

#[derive(Clone)]
struct OrbitState {
    graph: GraphState,
    kept: BTreeSet<VertexId>,
    rest: BTreeSet<VertexId>,
}

impl OrbitState {
    fn cost(&self) -> usize {
        ghz_cost(self.kept.len(), self.rest.len())
    }

    fn key(&self) -> (CanonicalKey, Vec<VertexId>) {
        (
            self.graph.canonical_key(),
            self.kept.iter().copied().collect(),
        )
    }

    /// Complementation at `b`, carrying the kept/rest split along.
    ///
    /// With `X = N(b) \ {target}`: if `b` sits on the kept side the kept set
    /// becomes `kept Δ X`, if on the rest side the rest set becomes
    /// `rest Δ X`, and otherwise neither changes. The move is only allowed
    /// when `X` avoids the opposite side; then complementing at `b` commutes
    /// with the fission, so the fission of the original graph is recovered by
    /// complementing the fissioned representative along the reversed
    /// sequence.
    fn step(&self, target: VertexId, b: VertexId) -> Option<OrbitState> {
        if b == target {
            return Some(OrbitState {
                graph: self.graph.local_complement(b).ok()?,
                kept: self.kept.clone(),
                rest: self.rest.clone(),
            });
        }
        let x: BTreeSet<VertexId> = self.graph.neighbors(b).filter(|&y| y != target).collect();
        let (kept, rest) = if self.kept.contains(&b) {
            if !x.is_disjoint(&self.rest) {
                return None;
            }
            (
                self.kept.symmetric_difference(&x).copied().collect(),
                self.rest.clone(),
            )
        } else if self.rest.contains(&b) {
            if !x.is_disjoint(&self.kept) {
                return None;
            }
            (
                self.kept.clone(),
                self.rest.symmetric_difference(&x).copied().collect(),
            )
        } else {
            (self.kept.clone(), self.rest.clone())
        };
        let mut graph = self.graph.clone();
        graph.local_complement_in_place(b);
        Some(OrbitState { graph, kept, rest })
    }
}

/// Breadth-first search through graphs reachable by local complementation
/// (at vertices other than `target` unless configured otherwise), looking
/// for the smallest GHZ state that splits `kept` off `target`.
///
/// Ties go to the shortest sequence, then the lexicographically smallest.
/// If the budget runs out before the orbit is exhausted, a greedy descent
/// continues from the best state found.
pub fn minimize_resources(
    g: &GraphState,
    target: VertexId,
    kept: &BTreeSet<VertexId>,
    config: OrbitConfig,
) -> Result<OrbitResult> {
    if config.budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let nbhd = g.neighborhood(target)?;
    if let Some(&vertex) = kept.iter().find(|b| !nbhd.contains(b)) {
        return Err(Error::NotNeighbor { target, vertex });
    }
    let start = OrbitState {
        graph: g.clone(),
        kept: kept.clone(),
        rest: nbhd.difference(kept).copied().collect(),
    };
    let cost_before = start.cost();
    let moves: Vec<VertexId> = g
        .vertices()
        .filter(|&b| config.include_target || b != target)
        .collect();

    let mut seen: HashSet<(CanonicalKey, Vec<VertexId>)> = HashSet::new();
    seen.insert(start.key());
    let mut queue = VecDeque::from([(start.clone(), Vec::<VertexId>::new())]);
    let mut best = (start.clone(), Vec::new());
    let mut explored = 0;
    while let Some((state, seq)) = queue.pop_front() {
        if explored == config.budget {
            queue.push_front((state, seq));
            break;
        }
        explored += 1;
        for &b in &moves {
            let Some(next) = state.step(target, b) else {
                continue;
            };
            if !seen.insert(next.key()) {
                continue;
            }
            let mut next_seq = seq.clone();
            next_seq.push(b);
            if next.cost() < best.0.cost() {
                best = (next.clone(), next_seq.clone());
            }
            queue.push_back((next, next_seq));
        }
    }
    let exhausted = queue.is_empty();
    if !exhausted {
        best = greedy_descent(best, target, &moves);
    }
    let (state, lc_sequence) = best;
    Ok(OrbitResult {
        cost_after: state.cost(),
        representative: state.graph,
        kept: state.kept,
        lc_sequence,
        cost_before,
        nodes_explored: explored,
        exhausted,
    })
}

/// Repeatedly takes the move that most lowers (cost, target degree).
fn greedy_descent(
    (mut state, mut seq): (OrbitState, Vec<VertexId>),
    target: VertexId,
    moves: &[VertexId],
) -> (OrbitState, Vec<VertexId>) {
    let score = |s: &OrbitState| (s.cost(), s.kept.len() + s.rest.len());
    loop {
        let improved = moves
            .iter()
            .filter_map(|&b| state.step(target, b).map(|s| (score(&s), b, s)))
            .filter(|(sc, _, _)| *sc < score(&state))
            .min_by_key(|(sc, b, _)| (*sc, *b));
        match improved {
            Some((_, b, next)) => {
                state = next;
                seq.push(b);
            }
            None => return (state, seq),
        }
    }
}

/// Applies complementations in order.
pub fn replay_lc(g: &GraphState, sequence: &[VertexId]) -> Result<GraphState> {
    sequence
        .iter()
        .try_fold(g.clone(), |g, &b| g.local_complement(b))
}
