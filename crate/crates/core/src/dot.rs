//! Graphviz rendering with role-based styling.
//!
//! The emitted DOT carries the graph's JSON form in a leading comment so the
//! structure can be recovered with [`parse_dot`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::fission::FissionOutcome;
use crate::graph::{GraphState, VertexId};

const JSON_MARKER: &str = "// gfk-graph: ";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Role {
    Target,
    Split,
    Kept,
    Complement,
    Ancilla,
    Measured,
}

impl Role {
    fn style(self) -> &'static str {
        match self {
            Role::Target => r##"fillcolor="#f7d046""##,
            Role::Split => r##"fillcolor="#f29e4c""##,
            Role::Kept => r##"fillcolor="#7fb3e6""##,
            Role::Complement => r##"fillcolor="#8fd18f""##,
            Role::Ancilla => r##"fillcolor="#d9d9d9""##,
            Role::Measured => {
                r##"fillcolor="#ffffff", style="filled,dashed", fontcolor="#888888""##
            }
        }
    }
}

pub type RoleMap = BTreeMap<VertexId, Role>;

/// Roles before a fission: the target and the two sides of its neighborhood.
pub fn roles_before(
    target: VertexId,
    kept: &BTreeSet<VertexId>,
    complement: &BTreeSet<VertexId>,
) -> RoleMap {
    let mut roles = RoleMap::new();
    roles.extend(kept.iter().map(|&v| (v, Role::Kept)));
    roles.extend(complement.iter().map(|&v| (v, Role::Complement)));
    roles.insert(target, Role::Target);
    roles
}

/// Roles after a fission: as [`roles_before`], plus split-off qubits and
/// measured ancillas.
pub fn roles_after(
    target: VertexId,
    kept: &BTreeSet<VertexId>,
    complement: &BTreeSet<VertexId>,
    outcome: &FissionOutcome,
) -> RoleMap {
    let mut roles = roles_before(target, kept, complement);
    for v in outcome.graph.vertices() {
        if outcome.graph.is_measured(v) {
            roles.insert(v, Role::Measured);
        }
    }
    for &s in &outcome.transcript.split_vertices {
        roles.insert(s, Role::Split);
    }
    roles
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn export_dot(g: &GraphState, roles: &RoleMap) -> String {
    let mut out = String::new();
    out.push_str("graph G {\n");
    writeln!(out, "  {JSON_MARKER}{}", g.to_json()).unwrap();
    out.push_str("  node [shape=circle, style=filled, fillcolor=\"#ffffff\"];\n");
    for v in g.vertices() {
        write!(out, "  v{} [label=\"{}\"", v.0, escape(&g.label(v))).unwrap();
        if let Some(role) = roles.get(&v) {
            write!(out, ", {}", role.style()).unwrap();
        }
        out.push_str("];\n");
    }
    for (a, b) in g.edges() {
        writeln!(out, "  v{a} -- v{b};").unwrap();
    }
    out.push_str("}\n");
    out
}

/// Recovers the graph from the JSON comment written by [`export_dot`].
pub fn parse_dot(text: &str) -> Result<GraphState> {
    let line = text
        .lines()
        .map(str::trim_start)
        .find_map(|l| l.strip_prefix(JSON_MARKER))
        .ok_or_else(|| Error::Parse("dot: missing graph comment".into()))?;
    GraphState::from_json(line)
}
