//! Graph states as simple undirected graphs, and the primitive rewrites
//! every protocol in this crate is built from: CZ toggles, local
//! complementation and Pauli-Z measurement.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::BitRow;
use crate::error::{Error, Result};

/// Suffix appended to the label of a vertex that has been measured out.
pub const MEASURED_SUFFIX: &str = "[m]";

/// Index of a qubit within one [`GraphState`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Pauli-Z byproducts owed after a Z measurement with outcome 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CorrectionSet {
    pub pauli_z_targets: BTreeSet<VertexId>,
}

impl CorrectionSet {
    pub fn is_empty(&self) -> bool {
        self.pauli_z_targets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.pauli_z_targets.iter().copied()
    }
}

/// Entangled resource state handed to [`GraphState::attach_ancilla`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "size")]
pub enum AncillaKind {
    Bell,
    Ghz(usize),
}

impl AncillaKind {
    pub fn qubits(self) -> usize {
        match self {
            AncillaKind::Bell => 2,
            AncillaKind::Ghz(m) => m,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AncillaKind::Bell => "bell",
            AncillaKind::Ghz(_) => "ghz",
        }
    }
}

impl fmt::Display for AncillaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AncillaKind::Bell => f.write_str("Bell"),
            AncillaKind::Ghz(m) => write!(f, "GHZ({m})"),
        }
    }
}

/// Exact identity of a graph: vertex count plus adjacency, labels ignored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u64>);

/// A simple undirected graph standing for the stabilizer state
/// `prod_{(a,b) in E} CZ_ab |+>^n`.
///
/// Adjacency is stored as one packed bit row per vertex and is always
/// symmetric with an empty diagonal.
#[derive(Clone, PartialEq, Eq)]
pub struct GraphState {
    rows: Vec<BitRow>,
    labels: Option<Vec<String>>,
}

impl fmt::Debug for GraphState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphState")
            .field("n", &self.vertex_count())
            .field("edges", &self.edges())
            .field("labels", &self.labels)
            .finish()
    }
}

impl GraphState {
    pub fn edgeless(n: usize) -> Self {
        GraphState {
            rows: (0..n).map(|_| BitRow::zeros(n)).collect(),
            labels: None,
        }
    }

    /// Builds a graph from an edge list. Repeated pairs toggle, so an edge is
    /// present iff it is listed an odd number of times.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = GraphState::edgeless(n);
        for &(a, b) in edges {
            g.check(VertexId(a))?;
            g.check(VertexId(b))?;
            if a == b {
                return Err(Error::SelfLoop(VertexId(a)));
            }
            g.toggle_edge(a, b);
        }
        Ok(g)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        validate_labels(self.vertex_count(), &labels)?;
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        GraphState::new(n, &edges).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n >= 3 {
            edges.push((n - 1, 0));
        }
        GraphState::new(n, &edges).expect("cycle edges are valid")
    }

    /// Star with center 0 and leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        GraphState::new(leaves + 1, &edges).expect("star edges are valid")
    }

    pub fn complete(n: usize) -> Self {
        let mut g = GraphState::edgeless(n);
        for a in 0..n {
            for b in a + 1..n {
                g.toggle_edge(a, b);
            }
        }
        g
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.rows.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count()).map(VertexId)
    }

    pub fn check(&self, v: VertexId) -> Result<()> {
        if v.0 < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v.0,
                n: self.vertex_count(),
            })
        }
    }

    #[inline]
    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.rows[a.0].get(b.0)
    }

    #[inline]
    pub fn degree(&self, a: VertexId) -> usize {
        self.rows[a.0].count_ones()
    }

    pub fn row(&self, a: VertexId) -> &BitRow {
        &self.rows[a.0]
    }

    pub fn neighborhood(&self, a: VertexId) -> Result<BTreeSet<VertexId>> {
        self.check(a)?;
        Ok(self.neighbors(a).collect())
    }

    /// Neighbors of `a` in ascending order. Panics if `a` is out of range.
    pub fn neighbors(&self, a: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.rows[a.0].ones().map(VertexId)
    }

    /// Edges as `(a, b)` with `a < b`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, row) in self.rows.iter().enumerate() {
            out.extend(row.ones().filter(|&b| b > a).map(|b| (a, b)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(BitRow::count_ones).sum::<usize>() / 2
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of `v`, falling back to its index.
    pub fn label(&self, v: VertexId) -> String {
        match &self.labels {
            Some(labels) => labels[v.0].clone(),
            None => v.0.to_string(),
        }
    }

    pub fn find_label(&self, label: &str) -> Option<VertexId> {
        self.labels
            .as_ref()?
            .iter()
            .position(|l| l == label)
            .map(VertexId)
    }

    pub fn is_measured(&self, v: VertexId) -> bool {
        self.labels
            .as_ref()
            .is_some_and(|l| l[v.0].ends_with(MEASURED_SUFFIX))
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(a) = stack.pop() {
                comp.push(VertexId(a));
                for b in self.rows[a].ones() {
                    if !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    // ---- in-place primitives -------------------------------------------

    #[inline]
    pub(crate) fn toggle_edge(&mut self, a: usize, b: usize) {
        debug_assert_ne!(a, b);
        self.rows[a].toggle(b);
        self.rows[b].toggle(a);
    }

    /// Toggles every edge inside `N(a)`.
    pub fn local_complement_in_place(&mut self, a: VertexId) {
        let nbhd = self.rows[a.0].clone();
        for b in nbhd.ones() {
            self.rows[b].xor_assign(&nbhd);
            // b is in its own mask; undo the diagonal toggle.
            self.rows[b].toggle(b);
        }
    }

    /// Swaps the roles of `a` and `b`: afterwards `a` carries `b`'s edges and
    /// vice versa. Labels stay attached to their indices.
    pub fn swap_in_place(&mut self, a: VertexId, b: VertexId) {
        if a == b {
            return;
        }
        let (a, b) = (a.0, b.0);
        self.rows.swap(a, b);
        for row in &mut self.rows {
            let (x, y) = (row.get(a), row.get(b));
            row.set(a, y);
            row.set(b, x);
        }
    }

    fn materialize_labels(&mut self) -> &mut Vec<String> {
        let n = self.vertex_count();
        self.labels
            .get_or_insert_with(|| (0..n).map(|i| i.to_string()).collect())
    }

    // ---- value-level operations -----------------------------------------

    /// Toggles the edge `(a, b)`; the graph-level action of `CZ_ab`.
    pub fn apply_cz(&self, a: VertexId, b: VertexId) -> Result<GraphState> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        let mut g = self.clone();
        g.toggle_edge(a.0, b.0);
        Ok(g)
    }

    pub fn local_complement(&self, a: VertexId) -> Result<GraphState> {
        self.check(a)?;
        let mut g = self.clone();
        g.local_complement_in_place(a);
        Ok(g)
    }

    /// Pauli-Z measurement of `a`: all incident edges are deleted and `a` is
    /// kept as an isolated vertex whose label is marked as measured. Outcome
    /// 1 leaves Z byproducts on the pre-measurement neighborhood.
    pub fn measure_z(&self, a: VertexId, outcome: u8) -> Result<(GraphState, CorrectionSet)> {
        self.check(a)?;
        if self.degree(a) == 0 && self.is_measured(a) {
            return Ok((self.clone(), CorrectionSet::default()));
        }
        let mut g = self.clone();
        let nbhd: BTreeSet<VertexId> = self.neighbors(a).collect();
        for b in &nbhd {
            g.toggle_edge(a.0, b.0);
        }
        let labels = g.materialize_labels();
        labels[a.0].push_str(MEASURED_SUFFIX);
        let corrections = if outcome & 1 == 1 {
            CorrectionSet {
                pauli_z_targets: nbhd,
            }
        } else {
            CorrectionSet::default()
        };
        Ok((g, corrections))
    }

    /// Appends fresh qubits holding a Bell pair or GHZ state, one per host.
    /// The first host receives the center of the star; the state is not
    /// connected to any existing vertex.
    pub fn attach_ancilla(
        &self,
        kind: AncillaKind,
        hosts: &[VertexId],
    ) -> Result<(GraphState, Vec<VertexId>)> {
        let m = match kind {
            AncillaKind::Bell => 2,
            AncillaKind::Ghz(m) if m < 2 => return Err(Error::GhzTooSmall(m)),
            AncillaKind::Ghz(m) => m,
        };
        if hosts.len() != m {
            return Err(Error::AncillaArity {
                kind: kind.name(),
                expected: m,
                got: hosts.len(),
            });
        }
        let mut seen = HashSet::new();
        for &h in hosts {
            self.check(h)?;
            if !seen.insert(h) {
                return Err(Error::DuplicateHost(h));
            }
        }
        let (mut g, new) = self.add_primed_vertices(hosts);
        let center = new[0];
        for &leaf in &new[1..] {
            g.toggle_edge(center.0, leaf.0);
        }
        Ok((g, new))
    }

    /// Adds one isolated qubit co-located with `host`.
    pub fn add_qubit(&self, host: VertexId) -> Result<(GraphState, VertexId)> {
        self.check(host)?;
        let (g, new) = self.add_primed_vertices(&[host]);
        Ok((g, new[0]))
    }

    fn add_primed_vertices(&self, hosts: &[VertexId]) -> (GraphState, Vec<VertexId>) {
        let old = self.vertex_count();
        let n = old + hosts.len();
        let mut g = self.clone();
        g.materialize_labels();
        for row in &mut g.rows {
            row.resize(n);
        }
        g.rows.extend((old..n).map(|_| BitRow::zeros(n)));
        let labels = g.labels.as_mut().expect("labels materialized above");
        for &h in hosts {
            let base = labels[h.0]
                .strip_suffix(MEASURED_SUFFIX)
                .unwrap_or(&labels[h.0])
                .to_string();
            let mut fresh = format!("{base}'");
            while labels.contains(&fresh) {
                fresh.push('\'');
            }
            labels.push(fresh);
        }
        (g, (old..n).map(VertexId).collect())
    }

    pub fn swap_vertices(&self, a: VertexId, b: VertexId) -> Result<GraphState> {
        self.check(a)?;
        self.check(b)?;
        let mut g = self.clone();
        g.swap_in_place(a, b);
        Ok(g)
    }

    /// Drops measured vertices. Returns the compacted graph and, for each new
    /// index, the vertex it came from.
    pub fn compact(&self) -> (GraphState, Vec<VertexId>) {
        let keep: Vec<VertexId> = self.vertices().filter(|&v| !self.is_measured(v)).collect();
        let m = keep.len();
        let mut g = GraphState::edgeless(m);
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate().skip(i + 1) {
                if self.has_edge(a, b) {
                    g.toggle_edge(i, j);
                }
            }
        }
        if let Some(labels) = &self.labels {
            g.labels = Some(keep.iter().map(|v| labels[v.0].clone()).collect());
        }
        (g, keep)
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        let mut words = Vec::with_capacity(1 + self.rows.len());
        words.push(self.vertex_count() as u64);
        for row in &self.rows {
            words.extend_from_slice(row.words());
        }
        CanonicalKey(words)
    }

    // ---- serialization --------------------------------------------------

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson::from(self)).expect("graph JSON is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GraphJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph JSON: {e}")))?;
        GraphState::try_from(raw)
    }

    /// Whitespace edge list: first token is `n`, then `a b` pairs. Text after
    /// `#` on a line is ignored.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(str::split_whitespace);
        let parse = |t: &str, what: &str| -> Result<usize> {
            t.parse().map_err(|_| {
                Error::Parse(format!("edge list: {what}: expected integer, got {t:?}"))
            })
        };
        let n = parse(
            tokens
                .next()
                .ok_or_else(|| Error::Parse("edge list: n: missing".into()))?,
            "n",
        )?;
        let rest: Vec<&str> = tokens.collect();
        if !rest.len().is_multiple_of(2) {
            return Err(Error::Parse(
                "edge list: edges: odd number of endpoints".into(),
            ));
        }
        let edges = rest
            .chunks(2)
            .map(|c| Ok((parse(c[0], "edges")?, parse(c[1], "edges")?)))
            .collect::<Result<Vec<_>>>()?;
        GraphState::new(n, &edges)
    }

    /// Parses JSON if the text looks like an object, otherwise an edge list.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            GraphState::from_json(text)
        } else {
            GraphState::from_edge_list(text)
        }
    }
}

fn validate_labels(n: usize, labels: &[String]) -> Result<()> {
    if labels.len() != n {
        return Err(Error::LabelCount {
            expected: n,
            got: labels.len(),
        });
    }
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

/// Wire form: `{"n": .., "edges": [[a,b],..], "labels": [..]}` with edges
/// sorted and `a < b`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl From<&GraphState> for GraphJson {
    fn from(g: &GraphState) -> Self {
        GraphJson {
            n: g.vertex_count(),
            edges: g.edges(),
            labels: g.labels.clone(),
        }
    }
}

impl TryFrom<GraphJson> for GraphState {
    type Error = Error;

    fn try_from(raw: GraphJson) -> Result<Self> {
        let g = GraphState::new(raw.n, &raw.edges)?;
        match raw.labels {
            Some(labels) => g.with_labels(labels),
            None => Ok(g),
        }
    }
}

impl Serialize for GraphState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for GraphState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        GraphState::try_from(raw).map_err(serde::de::Error::custom)
    }
}
