//! Dense statevector oracle for desk-scale verification.
//!
//! Qubit `q` of an `n`-qubit state is bit `n - 1 - q` of the basis index, so
//! vertex 0 is the most significant bit. Graph rewrites are checked against
//! the exact unitaries and projections they stand for:
//!
//! * CZ toggles an edge;
//! * `exp(-iπ/4 X_a) ∏_{b ∈ N(a)} exp(iπ/4 Z_b)` complements at `a`;
//! * a Z measurement with outcome 1 leaves Z byproducts on `N(a)`.
//!
//! Comparisons are insensitive to global phase.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::analysis::Bipartition;
use crate::error::{Error, Result};
use crate::fission::{Step, Transcript};
use crate::graph::{GraphState, VertexId};

pub const DEFAULT_MAX_QUBITS: usize = 14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|+>^n`.
    pub fn plus(n: usize) -> Self {
        let dim = 1usize << n;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        StateVector {
            qubits: n,
            amplitudes: vec![a; dim],
        }
    }

    /// Computational basis state; `bits[q]` is the value of qubit `q`.
    pub fn basis(bits: &[u8]) -> Self {
        let n = bits.len();
        let index = bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b & 1));
        let mut amplitudes = vec![ZERO; 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        StateVector {
            qubits: n,
            amplitudes,
        }
    }

    /// Takes raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() {
            return Err(Error::Parse(format!(
                "amplitudes: length {dim} is not a power of two"
            )));
        }
        Ok(StateVector {
            qubits: dim.trailing_zeros() as usize,
            amplitudes,
        })
    }

    #[inline]
    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    #[inline]
    fn mask(&self, q: usize) -> usize {
        1 << (self.qubits - 1 - q)
    }

    fn check(&self, q: usize) -> Result<()> {
        if q < self.qubits {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: q,
                n: self.qubits,
            })
        }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&mut self, factor: Complex64) {
        for a in &mut self.amplitudes {
            *a *= factor;
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.same_dim(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn same_dim(&self, other: &StateVector) -> Result<()> {
        if self.qubits == other.qubits {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.qubits,
                right: other.qubits,
            })
        }
    }

    /// `self ⊗ other`; the new qubits come after the existing ones.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        StateVector {
            qubits: self.qubits + other.qubits,
            amplitudes,
        }
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(Error::SelfLoop(VertexId(a)));
        }
        let both = self.mask(a) | self.mask(b);
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if i & both == both {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    pub fn apply_pauli_z(&mut self, a: usize) -> Result<()> {
        self.check(a)?;
        let m = self.mask(a);
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if i & m != 0 {
                *amp = -*amp;
            }
        }
        Ok(())
    }

    pub fn apply_pauli_x(&mut self, a: usize) -> Result<()> {
        self.check(a)?;
        let m = self.mask(a);
        for i in 0..self.amplitudes.len() {
            if i & m == 0 {
                self.amplitudes.swap(i, i | m);
            }
        }
        Ok(())
    }

    pub fn apply_hadamard(&mut self, a: usize) -> Result<()> {
        self.check(a)?;
        let m = self.mask(a);
        for i in 0..self.amplitudes.len() {
            if i & m == 0 {
                let (x0, x1) = (self.amplitudes[i], self.amplitudes[i | m]);
                self.amplitudes[i] = (x0 + x1) * FRAC_1_SQRT_2;
                self.amplitudes[i | m] = (x0 - x1) * FRAC_1_SQRT_2;
            }
        }
        Ok(())
    }

    /// `exp(-iπ/4 X_a)`.
    fn apply_sqrt_x_dagger(&mut self, a: usize) {
        let m = self.mask(a);
        let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let s = Complex64::new(0.0, -FRAC_1_SQRT_2);
        for i in 0..self.amplitudes.len() {
            if i & m == 0 {
                let (x0, x1) = (self.amplitudes[i], self.amplitudes[i | m]);
                self.amplitudes[i] = c * x0 + s * x1;
                self.amplitudes[i | m] = s * x0 + c * x1;
            }
        }
    }

    /// `∏_b exp(iπ/4 Z_b)` over the qubits in `mask`.
    fn apply_z_quarter_phases(&mut self, mask: usize) {
        let k = mask.count_ones() as i32;
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            // Each Z_b = +1 contributes e^{iπ/4}, each -1 contributes e^{-iπ/4}.
            let ones = (i & mask).count_ones() as i32;
            let net = k - 2 * ones;
            *amp *= Complex64::from_polar(1.0, FRAC_PI_4 * f64::from(net));
        }
    }

    /// Local unitary realizing complementation at `a` given its neighbors.
    pub fn apply_lc_unitary(&mut self, a: usize, neighbors: &BTreeSet<VertexId>) -> Result<()> {
        self.check(a)?;
        let mut mask = 0;
        for b in neighbors {
            self.check(b.0)?;
            if b.0 == a {
                return Err(Error::SelfLoop(*b));
            }
            mask |= self.mask(b.0);
        }
        self.apply_sqrt_x_dagger(a);
        self.apply_z_quarter_phases(mask);
        Ok(())
    }

    pub fn swap_qubits(&mut self, a: usize, b: usize) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Ok(());
        }
        let (ma, mb) = (self.mask(a), self.mask(b));
        for i in 0..self.amplitudes.len() {
            if i & ma != 0 && i & mb == 0 {
                self.amplitudes.swap(i, (i & !ma) | mb);
            }
        }
        Ok(())
    }

    /// Projects qubit `a` onto `|outcome>` and renormalizes. Returns the
    /// branch probability.
    pub fn project_z(&mut self, a: usize, outcome: u8) -> Result<f64> {
        self.check(a)?;
        let m = self.mask(a);
        let want = if outcome & 1 == 1 { m } else { 0 };
        let mut p = 0.0;
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if i & m == want {
                p += amp.norm_sqr();
            } else {
                *amp = ZERO;
            }
        }
        if p < 1e-14 {
            return Err(Error::ZeroProbability { qubit: a, outcome });
        }
        let scale = 1.0 / p.sqrt();
        for amp in &mut self.amplitudes {
            *amp *= scale;
        }
        Ok(p)
    }

    /// Von Neumann entropy, in bits, of the reduced state on `side_a`.
    pub fn entanglement_entropy(&self, p: &Bipartition) -> Result<f64> {
        for a in &p.side_a {
            self.check(a.0)?;
        }
        let side_a: Vec<usize> = p.side_a.iter().map(|v| v.0).collect();
        let side_b: Vec<usize> = (0..self.qubits)
            .filter(|q| !p.side_a.contains(&VertexId(*q)))
            .collect();
        if side_a.is_empty() || side_b.is_empty() {
            return Ok(0.0);
        }
        // Rows indexed by the smaller side keep the SVD small.
        let (rows, cols) = if side_a.len() <= side_b.len() {
            (side_a, side_b)
        } else {
            (side_b, side_a)
        };
        let index = |qs: &[usize], i: usize| -> usize {
            qs.iter()
                .enumerate()
                .filter(|(_, &q)| i & self.mask(q) != 0)
                .fold(0, |acc, (k, _)| acc | 1 << (qs.len() - 1 - k))
        };
        let mut m = DMatrix::<Complex64>::zeros(1 << rows.len(), 1 << cols.len());
        for (i, amp) in self.amplitudes.iter().enumerate() {
            m[(index(&rows, i), index(&cols, i))] = *amp;
        }
        let singular = m.singular_values();
        Ok(singular
            .iter()
            .map(|s| s * s)
            .filter(|&p| p > 1e-15)
            .map(|p| -p * p.log2())
            .sum())
    }

    pub fn to_json(&self) -> String {
        let pairs: Vec<[f64; 2]> = self.amplitudes.iter().map(|a| [a.re, a.im]).collect();
        serde_json::to_string(&pairs).expect("amplitude JSON is infallible")
    }
}

/// `K_a = X_a ∏_{b ∈ N(a)} Z_b`, possibly signed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerGenerator {
    pub x_support: BTreeSet<VertexId>,
    pub z_support: BTreeSet<VertexId>,
    pub sign: i8,
}

impl StabilizerGenerator {
    pub fn for_vertex(g: &GraphState, a: VertexId) -> Result<Self> {
        Ok(StabilizerGenerator {
            x_support: BTreeSet::from([a]),
            z_support: g.neighborhood(a)?,
            sign: 1,
        })
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        let mut out = psi.clone();
        // Z first, then X: the generators here have disjoint supports.
        for z in &self.z_support {
            out.apply_pauli_z(z.0)?;
        }
        for x in &self.x_support {
            out.apply_pauli_x(x.0)?;
        }
        if self.sign < 0 {
            out.scale(Complex64::new(-1.0, 0.0));
        }
        Ok(out)
    }
}

/// `∏_{(a,b) ∈ E} CZ_ab |+>^n`.
pub fn build_graph_state(g: &GraphState) -> Result<StateVector> {
    build_graph_state_capped(g, DEFAULT_MAX_QUBITS)
}

pub fn build_graph_state_capped(g: &GraphState, max_qubits: usize) -> Result<StateVector> {
    let n = g.vertex_count();
    if n > max_qubits {
        return Err(Error::TooManyQubits { n, max: max_qubits });
    }
    let mut psi = StateVector::plus(n);
    let masks: Vec<usize> = g
        .edges()
        .into_iter()
        .map(|(a, b)| psi.mask(a) | psi.mask(b))
        .collect();
    for (i, amp) in psi.amplitudes.iter_mut().enumerate() {
        let flips = masks.iter().filter(|&&m| i & m == m).count();
        if flips % 2 == 1 {
            *amp = -*amp;
        }
    }
    Ok(psi)
}

/// True iff `K_a psi = psi` for every vertex `a`, within 1e-10.
pub fn stabilizer_check(psi: &StateVector, g: &GraphState) -> Result<bool> {
    if psi.qubit_count() != g.vertex_count() {
        return Err(Error::DimensionMismatch {
            left: psi.qubit_count(),
            right: g.vertex_count(),
        });
    }
    for a in g.vertices() {
        let k = StabilizerGenerator::for_vertex(g, a)?.apply(psi)?;
        let close = k
            .amplitudes
            .iter()
            .zip(&psi.amplitudes)
            .all(|(x, y)| (x - y).norm() <= 1e-10);
        if !close {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `|<psi|phi>| >= 1 - tol`.
pub fn equal_up_to_global_phase(psi: &StateVector, phi: &StateVector, tol: f64) -> Result<bool> {
    Ok(psi.inner(phi)?.norm() >= 1.0 - tol)
}

/// Replays `t` on `psi`, which must be the state of `start`. Measured
/// qubits are re-prepared in `|+>` after their recorded byproducts are
/// applied, matching the isolated vertex the graph keeps for them. Returns
/// the final state together with the final graph.
pub fn execute_transcript_state(
    psi: &StateVector,
    start: &GraphState,
    t: &Transcript,
    max_qubits: usize,
) -> Result<(StateVector, GraphState)> {
    if psi.qubit_count() != start.vertex_count() {
        return Err(Error::DimensionMismatch {
            left: psi.qubit_count(),
            right: start.vertex_count(),
        });
    }
    let mut psi = psi.clone();
    let mut graph = start.clone();
    for step in &t.steps {
        let next = step.apply(&graph)?;
        match step {
            Step::AttachAncilla { .. } | Step::AddQubit { .. } => {
                let added = next.vertex_count() - graph.vertex_count();
                let total = psi.qubit_count() + added;
                if total > max_qubits {
                    return Err(Error::TooManyQubits {
                        n: total,
                        max: max_qubits,
                    });
                }
                // The ancilla block of the new graph, as its own graph state.
                let mut block = GraphState::edgeless(added);
                for (a, b) in next.edges() {
                    if a >= graph.vertex_count() {
                        block.toggle_edge(a - graph.vertex_count(), b - graph.vertex_count());
                    }
                }
                psi = psi.tensor(&build_graph_state_capped(&block, max_qubits)?);
            }
            Step::Cz(a, b) => psi.apply_cz(a.0, b.0)?,
            Step::LocalComplement(a) => {
                let nbhd = graph.neighborhood(*a)?;
                psi.apply_lc_unitary(a.0, &nbhd)?;
            }
            Step::MeasureZ {
                vertex,
                outcome,
                corrections,
            } => {
                psi.project_z(vertex.0, *outcome)?;
                if *outcome == 1 {
                    psi.apply_pauli_x(vertex.0)?;
                }
                psi.apply_hadamard(vertex.0)?;
                for z in corrections.iter() {
                    psi.apply_pauli_z(z.0)?;
                }
            }
            Step::Swap(a, b) => psi.swap_qubits(a.0, b.0)?,
        }
        graph = next;
    }
    Ok((psi, graph))
}

/// Outcome of checking a transcript against the oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub final_graph: GraphState,
    pub overlap: f64,
    pub passed: bool,
}

/// Replays `t` from the graph state of `start` and compares the result
/// with the graph state of the final graph.
pub fn verify_transcript(
    start: &GraphState,
    t: &Transcript,
    max_qubits: usize,
    tol: f64,
) -> Result<Verification> {
    let psi = build_graph_state_capped(start, max_qubits)?;
    let (out, final_graph) = execute_transcript_state(&psi, start, t, max_qubits)?;
    let expected = build_graph_state_capped(&final_graph, max_qubits)?;
    let overlap = out.inner(&expected)?.norm();
    Ok(Verification {
        final_graph,
        overlap,
        passed: overlap >= 1.0 - tol,
    })
}
