//! Reference simulator for tests, written without the library's oracle.
//!
//! It keeps its own adjacency matrix and a dense amplitude vector (vertex 0
//! is the most significant bit) and applies every gate as a generic 2x2
//! matrix or a diagonal phase.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use gfk_core::fission::{Step, Transcript};
use gfk_core::{AncillaKind, GraphState, VertexId};
use num_complex::Complex64 as C;

pub struct Reference {
    pub adj: Vec<Vec<bool>>,
    pub psi: Vec<C>,
}

type Gate = [[C; 2]; 2];

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// `exp(-iπ/4 X)`.
fn sqrt_x_dagger() -> Gate {
    let (s, co) = FRAC_PI_4.sin_cos();
    [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
}

/// `exp(iπ/4 Z)`.
fn sqrt_z() -> Gate {
    [
        [C::from_polar(1.0, FRAC_PI_4), C::default()],
        [C::default(), C::from_polar(1.0, -FRAC_PI_4)],
    ]
}

fn hadamard() -> Gate {
    let h = c(FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

fn pauli_x() -> Gate {
    [[C::default(), c(1.0, 0.0)], [c(1.0, 0.0), C::default()]]
}

fn pauli_z() -> Gate {
    [[c(1.0, 0.0), C::default()], [C::default(), c(-1.0, 0.0)]]
}

/// Amplitude `(-1)^{#edges inside x} / sqrt(2^n)` for every basis string.
pub fn graph_amplitudes(adj: &[Vec<bool>]) -> Vec<C> {
    let n = adj.len();
    let norm = (1u64 << n) as f64;
    (0..1usize << n)
        .map(|x| {
            let bit = |q: usize| x >> (n - 1 - q) & 1 == 1;
            let mut parity = false;
            for a in 0..n {
                for b in a + 1..n {
                    if adj[a][b] && bit(a) && bit(b) {
                        parity = !parity;
                    }
                }
            }
            c(if parity { -1.0 } else { 1.0 } / norm.sqrt(), 0.0)
        })
        .collect()
}

pub fn adjacency(g: &GraphState) -> Vec<Vec<bool>> {
    let n = g.vertex_count();
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| g.has_edge(VertexId(a), VertexId(b)))
                .collect()
        })
        .collect()
}

pub fn graph_state(g: &GraphState) -> Vec<C> {
    graph_amplitudes(&adjacency(g))
}

/// `|<a|b>|`.
pub fn overlap(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len(), "dimension mismatch");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C>().norm()
}

pub fn norm(a: &[C]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Rank over GF(2) of the cut block, by counting the distinct vectors in
/// the row span.
pub fn span_rank(g: &GraphState, side: &BTreeSet<VertexId>) -> usize {
    let rows: Vec<VertexId> = side.iter().copied().collect();
    let cols: Vec<VertexId> = g.vertices().filter(|v| !side.contains(v)).collect();
    let mut span = BTreeSet::new();
    for mask in 0u32..1 << rows.len() {
        let vector: Vec<bool> = cols
            .iter()
            .map(|&b| {
                rows.iter()
                    .enumerate()
                    .filter(|&(i, &a)| mask >> i & 1 == 1 && g.has_edge(a, b))
                    .count()
                    % 2
                    == 1
            })
            .collect();
        span.insert(vector);
    }
    span.len().trailing_zeros() as usize
}

/// Entropy in bits from the purity `Tr ρ_A²`. Reduced graph states have a
/// flat spectrum, so `-log2(purity)` is the von Neumann entropy.
pub fn entropy_bits(psi: &[C], n: usize, side: &BTreeSet<VertexId>) -> f64 {
    let a: Vec<usize> = side.iter().map(|v| v.0).collect();
    let b: Vec<usize> = (0..n).filter(|q| !side.contains(&VertexId(*q))).collect();
    let index = |xa: usize, xb: usize| {
        let mut x = 0usize;
        for (i, &q) in a.iter().enumerate() {
            if xa >> i & 1 == 1 {
                x |= 1 << (n - 1 - q);
            }
        }
        for (i, &q) in b.iter().enumerate() {
            if xb >> i & 1 == 1 {
                x |= 1 << (n - 1 - q);
            }
        }
        x
    };
    let (da, db) = (1usize << a.len(), 1usize << b.len());
    // ρ_A[i][j] = Σ_k ψ(i,k) ψ(j,k)*
    let mut purity = 0.0;
    for i in 0..da {
        for j in 0..da {
            let rho: C = (0..db)
                .map(|k| psi[index(i, k)] * psi[index(j, k)].conj())
                .sum();
            purity += rho.norm_sqr();
        }
    }
    -purity.log2()
}

impl Reference {
    pub fn new(g: &GraphState) -> Self {
        let adj = adjacency(g);
        let psi = graph_amplitudes(&adj);
        Reference { adj, psi }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    fn neighbors(&self, a: usize) -> Vec<usize> {
        (0..self.n()).filter(|&b| self.adj[a][b]).collect()
    }

    pub fn apply(&mut self, q: usize, m: Gate) {
        let mask = 1 << (self.n() - 1 - q);
        for i in 0..self.psi.len() {
            if i & mask == 0 {
                let (x0, x1) = (self.psi[i], self.psi[i | mask]);
                self.psi[i] = m[0][0] * x0 + m[0][1] * x1;
                self.psi[i | mask] = m[1][0] * x0 + m[1][1] * x1;
            }
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        let n = self.n();
        let both = 1 << (n - 1 - a) | 1 << (n - 1 - b);
        for (i, x) in self.psi.iter_mut().enumerate() {
            if i & both == both {
                *x = -*x;
            }
        }
        self.adj[a][b] ^= true;
        self.adj[b][a] ^= true;
    }

    pub fn lc(&mut self, a: usize) {
        let nb = self.neighbors(a);
        self.apply(a, sqrt_x_dagger());
        for &b in &nb {
            self.apply(b, sqrt_z());
        }
        for (i, &x) in nb.iter().enumerate() {
            for &y in &nb[i + 1..] {
                self.adj[x][y] ^= true;
                self.adj[y][x] ^= true;
            }
        }
    }

    /// Z measurement with the standard byproduct: outcome 1 costs a Z on
    /// every pre-measurement neighbor. The measured qubit is reset to |+>.
    /// Returns the outcome probability and the corrections applied.
    pub fn measure(&mut self, a: usize, outcome: u8) -> (f64, Vec<usize>) {
        let mask = 1 << (self.n() - 1 - a);
        let want = if outcome == 1 { mask } else { 0 };
        for (i, x) in self.psi.iter_mut().enumerate() {
            if i & mask != want {
                *x = C::default();
            }
        }
        let p = norm(&self.psi).powi(2);
        for x in &mut self.psi {
            *x /= p.sqrt();
        }
        if outcome == 1 {
            self.apply(a, pauli_x());
        }
        self.apply(a, hadamard());
        let nb = self.neighbors(a);
        let corrections = if outcome == 1 { nb.clone() } else { Vec::new() };
        for &b in &corrections {
            self.apply(b, pauli_z());
        }
        for b in nb {
            self.adj[a][b] = false;
            self.adj[b][a] = false;
        }
        (p, corrections)
    }

    fn attach(&mut self, block: Vec<Vec<bool>>) {
        let amps = graph_amplitudes(&block);
        self.psi = self
            .psi
            .iter()
            .flat_map(|x| amps.iter().map(move |y| x * y))
            .collect();
        let (n, m) = (self.n(), block.len());
        for row in &mut self.adj {
            row.resize(n + m, false);
        }
        for r in block {
            let mut row = vec![false; n];
            row.extend(r);
            self.adj.push(row);
        }
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        let n = self.n();
        let (ma, mb) = (1 << (n - 1 - a), 1 << (n - 1 - b));
        for i in 0..self.psi.len() {
            if i & ma != 0 && i & mb == 0 {
                self.psi.swap(i, (i & !ma) | mb);
            }
        }
        self.adj.swap(a, b);
        for row in &mut self.adj {
            row.swap(a, b);
        }
    }

    /// Runs a transcript, checking recorded corrections against the
    /// byproduct rule. Panics on any inconsistency.
    pub fn run(&mut self, t: &Transcript) {
        for step in &t.steps {
            match step {
                Step::AttachAncilla { kind, vertices, .. } => {
                    let m = kind.qubits();
                    assert_eq!(vertices.len(), m);
                    assert_eq!(vertices[0].0, self.n(), "ancilla appended at the end");
                    let mut block = vec![vec![false; m]; m];
                    // Bell is the one-edge graph, GHZ a star on its first qubit.
                    if *kind == AncillaKind::Bell {
                        assert_eq!(m, 2);
                    }
                    for leaf in 1..m {
                        block[0][leaf] = true;
                        block[leaf][0] = true;
                    }
                    self.attach(block);
                }
                Step::AddQubit { vertex, .. } => {
                    assert_eq!(vertex.0, self.n());
                    self.attach(vec![vec![false]]);
                }
                Step::Cz(a, b) => self.cz(a.0, b.0),
                Step::LocalComplement(a) => self.lc(a.0),
                Step::MeasureZ {
                    vertex,
                    outcome,
                    corrections,
                } => {
                    let (p, applied) = self.measure(vertex.0, *outcome);
                    assert!(
                        p > 1e-12,
                        "outcome {outcome} on {vertex} has zero probability"
                    );
                    let recorded: Vec<usize> = corrections.iter().map(|v| v.0).collect();
                    assert_eq!(recorded, applied, "corrections for {vertex}");
                }
                Step::Swap(a, b) => self.swap(a.0, b.0),
            }
        }
    }

    /// Overlap of the simulated state with the graph state of its own
    /// adjacency.
    pub fn self_overlap(&self) -> f64 {
        overlap(&self.psi, &graph_amplitudes(&self.adj))
    }
}

/// Replays `t` from `start` and returns the overlap of the result with the
/// graph state of `expected`, after checking both agree on the adjacency.
pub fn replay_overlap(start: &GraphState, t: &Transcript, expected: &GraphState) -> f64 {
    let mut r = Reference::new(start);
    r.run(t);
    assert_eq!(
        r.adj,
        adjacency(expected),
        "reference adjacency differs from the library's"
    );
    overlap(&r.psi, &graph_state(expected))
}
