//! Graph generators for test suites: random graphs and exhaustive
//! enumeration up to isomorphism.

use std::collections::BTreeSet;

use rand::Rng;

use crate::graph::{GraphState, VertexId};

/// Erdős–Rényi `G(n, p)`.
pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> GraphState {
    let mut g = GraphState::edgeless(n);
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                g.toggle_edge(a, b);
            }
        }
    }
    g
}

/// Random spanning tree plus independent extra edges with probability `p`.
pub fn random_connected_graph<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> GraphState {
    let mut g = GraphState::edgeless(n);
    for b in 1..n {
        let a = rng.random_range(0..b);
        g.toggle_edge(a, b);
    }
    for a in 0..n {
        for b in a + 1..n {
            if !g.has_edge(VertexId(a), VertexId(b)) && rng.random_bool(p) {
                g.toggle_edge(a, b);
            }
        }
    }
    g
}

/// Random subset of `0..n`, each element kept with probability 1/2.
pub fn random_subset<R: Rng + ?Sized>(rng: &mut R, n: usize) -> BTreeSet<VertexId> {
    (0..n)
        .filter(|_| rng.random_bool(0.5))
        .map(VertexId)
        .collect()
}

/// Every labeled graph on `n` vertices (`2^(n(n-1)/2)` of them).
pub fn all_labeled_graphs(n: usize) -> impl Iterator<Item = GraphState> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    assert!(pairs.len() < 64, "too many vertices to enumerate");
    (0u64..1 << pairs.len()).map(move |mask| {
        let mut g = GraphState::edgeless(n);
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                g.toggle_edge(a, b);
            }
        }
        g
    })
}

/// Color refinement: colors are ranks of (previous color, sorted neighbor
/// colors) signatures, iterated until the partition stops splitting. The
/// colors are isomorphism invariant.
fn refined_colors(g: &GraphState) -> Vec<usize> {
    let n = g.vertex_count();
    let mut colors = vec![0usize; n];
    let mut classes = 1;
    loop {
        let signatures: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|a| {
                let mut nb: Vec<usize> = g.neighbors(VertexId(a)).map(|b| colors[b.0]).collect();
                nb.sort_unstable();
                (colors[a], nb)
            })
            .collect();
        let mut distinct = signatures.clone();
        distinct.sort();
        distinct.dedup();
        colors = signatures
            .iter()
            .map(|s| distinct.binary_search(s).expect("signature present"))
            .collect();
        if distinct.len() == classes {
            return colors;
        }
        classes = distinct.len();
    }
}

fn upper_triangle(g: &GraphState, order: &[usize]) -> Vec<bool> {
    let n = order.len();
    let mut bits = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for i in 0..n {
        for j in i + 1..n {
            bits.push(g.has_edge(VertexId(order[i]), VertexId(order[j])));
        }
    }
    bits
}

/// Canonical representative of the isomorphism class of `g` (labels
/// dropped). Vertices are ordered by refined color; ties inside a color
/// class are broken by trying every ordering and keeping the
/// lexicographically largest adjacency string.
pub fn canonical_form(g: &GraphState) -> GraphState {
    let n = g.vertex_count();
    let colors = refined_colors(g);
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let max_color = colors.iter().copied().max().map_or(0, |c| c + 1);
    for c in 0..max_color {
        cells.push((0..n).filter(|&a| colors[a] == c).collect());
    }
    let mut best: Option<(Vec<bool>, Vec<usize>)> = None;
    let mut order = Vec::with_capacity(n);
    search_orders(g, &cells, 0, &mut order, &mut best);
    let (_, order) = best.unwrap_or_default();
    let mut out = GraphState::edgeless(n);
    for i in 0..n {
        for j in i + 1..n {
            if g.has_edge(VertexId(order[i]), VertexId(order[j])) {
                out.toggle_edge(i, j);
            }
        }
    }
    out
}

fn search_orders(
    g: &GraphState,
    cells: &[Vec<usize>],
    cell: usize,
    order: &mut Vec<usize>,
    best: &mut Option<(Vec<bool>, Vec<usize>)>,
) {
    if cell == cells.len() {
        let bits = upper_triangle(g, order);
        if best.as_ref().is_none_or(|(b, _)| bits > *b) {
            *best = Some((bits, order.clone()));
        }
        return;
    }
    let mut members = cells[cell].clone();
    permute(&mut members, 0, &mut |perm| {
        let base = order.len();
        order.extend_from_slice(perm);
        search_orders(g, cells, cell + 1, order, best);
        order.truncate(base);
    });
}

fn permute(items: &mut [usize], k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// One representative per isomorphism class of graphs on `n` vertices,
/// built by adding a vertex with every possible neighborhood to the
/// classes on `n - 1` vertices.
pub fn graphs_up_to_isomorphism(n: usize) -> Vec<GraphState> {
    let mut level: BTreeSet<Vec<(usize, usize)>> = BTreeSet::from([Vec::new()]);
    for size in 1..=n {
        let mut next = BTreeSet::new();
        for edges in &level {
            for mask in 0u32..1 << (size - 1) {
                let mut extra = edges.clone();
                extra.extend(
                    (0..size - 1)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| (i, size - 1)),
                );
                let g = GraphState::new(size, &extra).expect("augmented edges are valid");
                next.insert(canonical_form(&g).edges());
            }
        }
        level = next;
    }
    level
        .into_iter()
        .map(|edges| GraphState::new(n, &edges).expect("stored edges are valid"))
        .collect()
}

pub fn connected_graphs_up_to_isomorphism(n: usize) -> Vec<GraphState> {
    graphs_up_to_isomorphism(n)
        .into_iter()
        .filter(GraphState::is_connected)
        .collect()
}
