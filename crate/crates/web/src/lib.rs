//! Browser bindings for the fission demo.
//!
//! Every export takes and returns JSON strings so the page needs no glue
//! beyond the generated module. The `*_json` functions hold the logic and
//! are plain Rust, which keeps them testable off the browser.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use wasm_bindgen::prelude::*;

use gfk_core::analysis::{audit_fission, minimize_resources, FissionAudit, OrbitConfig};
use gfk_core::dot::{roles_after, roles_before, Role, RoleMap};
use gfk_core::fission::{execute_fission, plan_fission, StepJson};
use gfk_core::oracle::{verify_transcript, DEFAULT_MAX_QUBITS};
use gfk_core::{GraphState, VertexId};

const ORACLE_TOLERANCE: f64 = 1e-10;

/// Keeps a page from stalling on a large orbit.
const MAX_BUDGET: usize = 200_000;

fn role_name(role: Role) -> &'static str {
    match role {
        Role::Target => "target",
        Role::Split => "split",
        Role::Kept => "kept",
        Role::Complement => "complement",
        Role::Ancilla => "ancilla",
        Role::Measured => "measured",
    }
}

fn role_names(roles: &RoleMap) -> BTreeMap<usize, &'static str> {
    roles.iter().map(|(v, &r)| (v.0, role_name(r))).collect()
}

fn parse_graph(graph_json: &str) -> Result<GraphState, String> {
    GraphState::from_json(graph_json).map_err(|e| e.to_string())
}

fn vertex_set(g: &GraphState, kept: &[u32]) -> Result<BTreeSet<VertexId>, String> {
    kept.iter()
        .map(|&k| {
            let v = VertexId(k as usize);
            g.check(v).map(|()| v).map_err(|e| e.to_string())
        })
        .collect()
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Preset {
    name: &'static str,
    graph: GraphState,
    target: usize,
    kept: Vec<usize>,
}

fn preset(
    name: &'static str,
    n: usize,
    edges: &[(usize, usize)],
    target: usize,
    kept: &[usize],
) -> Preset {
    let labels = (1..=n).map(|i| i.to_string()).collect();
    let graph = GraphState::new(n, edges)
        .and_then(|g| g.with_labels(labels))
        .expect("preset graphs are well formed");
    Preset {
        name,
        graph,
        target,
        kept: kept.to_vec(),
    }
}

pub fn presets_json() -> String {
    let list = vec![
        preset(
            "Bell split",
            6,
            &[(0, 1), (1, 2), (1, 3), (2, 3), (0, 4), (3, 5)],
            1,
            &[0],
        ),
        preset(
            "GHZ split",
            5,
            &[(0, 1), (1, 2), (1, 3), (1, 4), (2, 3)],
            1,
            &[2, 4],
        ),
        preset(
            "Orbit shortcut",
            7,
            &[
                (0, 1),
                (0, 2),
                (0, 3),
                (0, 4),
                (0, 5),
                (0, 6),
                (1, 2),
                (1, 3),
            ],
            0,
            &[1, 2, 3],
        ),
        preset("Star", 5, &[(0, 1), (0, 2), (0, 3), (0, 4)], 0, &[1, 2]),
    ];
    serde_json::to_string(&list).expect("presets serialize")
}

#[derive(Serialize)]
struct FissionView {
    before: GraphState,
    after: GraphState,
    roles_before: BTreeMap<usize, &'static str>,
    roles_after: BTreeMap<usize, &'static str>,
    ancilla: Option<String>,
    outcomes: Vec<u8>,
    transcript: Vec<StepJson>,
    audit: FissionAudit,
    /// `None` when the final state exceeds the oracle cap.
    overlap: Option<f64>,
}

/// Splits `kept` off `target`. Bit `i` of `outcome_bits` is the `i`-th
/// measurement outcome.
pub fn fission_json(
    graph_json: &str,
    target: u32,
    kept: &[u32],
    outcome_bits: u32,
) -> Result<String, String> {
    let g = parse_graph(graph_json)?;
    let target = VertexId(target as usize);
    let kept = vertex_set(&g, kept)?;
    let spec = plan_fission(&g, target, &kept).map_err(|e| e.to_string())?;
    let outcomes: Vec<u8> = (0..spec.measurement_count())
        .map(|i| (outcome_bits >> (i % 32) & 1) as u8)
        .collect();
    let outcome = execute_fission(&g, &spec, &outcomes).map_err(|e| e.to_string())?;
    let audit = audit_fission(&g, &outcome, target).map_err(|e| e.to_string())?;
    let overlap = if outcome.graph.vertex_count() <= DEFAULT_MAX_QUBITS {
        let check = verify_transcript(
            &g,
            &outcome.transcript,
            DEFAULT_MAX_QUBITS,
            ORACLE_TOLERANCE,
        )
        .map_err(|e| e.to_string())?;
        Some(check.overlap)
    } else {
        None
    };
    let nbhd = g.neighborhood(target).map_err(|e| e.to_string())?;
    let complement: BTreeSet<VertexId> = nbhd.difference(&kept).copied().collect();
    to_json(&FissionView {
        roles_before: role_names(&roles_before(target, &kept, &complement)),
        roles_after: role_names(&roles_after(target, &kept, &complement, &outcome)),
        ancilla: spec.ancilla.map(|k| k.to_string()),
        outcomes,
        transcript: outcome.transcript.wire(),
        audit,
        overlap,
        after: outcome.graph,
        before: g,
    })
}

pub fn local_complement_json(graph_json: &str, vertex: u32) -> Result<String, String> {
    let g = parse_graph(graph_json)?;
    let out = g
        .local_complement(VertexId(vertex as usize))
        .map_err(|e| e.to_string())?;
    Ok(out.to_json())
}

pub fn minimize_json(
    graph_json: &str,
    target: u32,
    kept: &[u32],
    budget: u32,
) -> Result<String, String> {
    let g = parse_graph(graph_json)?;
    let kept = vertex_set(&g, kept)?;
    let budget = (budget as usize).min(MAX_BUDGET);
    let result = minimize_resources(
        &g,
        VertexId(target as usize),
        &kept,
        OrbitConfig::with_budget(budget),
    )
    .map_err(|e| e.to_string())?;
    Ok(result.to_json())
}

#[wasm_bindgen]
pub fn presets() -> String {
    presets_json()
}

#[wasm_bindgen]
pub fn fission(
    graph_json: &str,
    target: u32,
    kept: &[u32],
    outcome_bits: u32,
) -> Result<String, JsError> {
    fission_json(graph_json, target, kept, outcome_bits).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn local_complement(graph_json: &str, vertex: u32) -> Result<String, JsError> {
    local_complement_json(graph_json, vertex).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn minimize(
    graph_json: &str,
    target: u32,
    kept: &[u32],
    budget: u32,
) -> Result<String, JsError> {
    minimize_json(graph_json, target, kept, budget).map_err(|e| JsError::new(&e))
}
