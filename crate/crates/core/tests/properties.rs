//! Randomized cross-checks of the graph calculus, the fission protocols and
//! the entanglement analysis against an independent reference simulator.

mod support;

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gfk_core::analysis::{minimize_resources, replay_lc, OrbitConfig};
use gfk_core::fission::{
    execute_fission, iterate_fission, partition_measurement_count, plan_fission,
};
use gfk_core::generate::{random_connected_graph, random_graph, random_subset};
use gfk_core::oracle::{build_graph_state, verify_transcript};
use gfk_core::{check_one_uniform, cut_rank, Bipartition, GraphState, Transcript, VertexId};

use support::reference::{self, Reference};

const TOL: f64 = 1e-10;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_kept(rng: &mut ChaCha8Rng, nbhd: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    nbhd.iter()
        .copied()
        .filter(|_| rng.random_bool(0.5))
        .collect()
}

#[test]
fn primitives_commute_with_state_evolution() {
    let mut rng = rng(11);
    let mut cases = 0;
    while cases < 1200 {
        let n = rng.random_range(2..=10);
        let density = rng.random_range(0.1..0.7);
        let g = random_graph(&mut rng, n, density);
        let mut r = Reference::new(&g);
        let a = VertexId(rng.random_range(0..n));
        let after = match rng.random_range(0..3) {
            0 => {
                let b = VertexId((a.0 + rng.random_range(1..n)) % n);
                r.cz(a.0, b.0);
                g.apply_cz(a, b).unwrap()
            }
            1 => {
                r.lc(a.0);
                g.local_complement(a).unwrap()
            }
            _ => {
                let outcome = rng.random_range(0..2u8);
                let (out, corrections) = g.measure_z(a, outcome).unwrap();
                let (_, applied) = r.measure(a.0, outcome);
                let recorded: Vec<usize> = corrections.iter().map(|v| v.0).collect();
                assert_eq!(recorded, applied);
                out
            }
        };
        assert!((reference::norm(&r.psi) - 1.0).abs() < 1e-12);
        assert_eq!(r.adj, reference::adjacency(&after));
        let ov = reference::overlap(&r.psi, &reference::graph_state(&after));
        assert!(ov > 1.0 - TOL, "overlap {ov} for {}", g.to_json());
        cases += 1;
    }
}

#[test]
fn library_state_matches_reference_amplitudes() {
    let mut rng = rng(12);
    for _ in 0..200 {
        let n = rng.random_range(1..=10);
        let g = random_graph(&mut rng, n, 0.4);
        let lib = build_graph_state(&g).unwrap();
        let ours = reference::graph_state(&g);
        for (x, y) in lib.amplitudes().iter().zip(&ours) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}

#[test]
fn library_unitaries_preserve_norm() {
    let mut rng = rng(13);
    for _ in 0..300 {
        let n = rng.random_range(2..=8);
        let g = random_graph(&mut rng, n, 0.5);
        let mut psi = build_graph_state(&g).unwrap();
        for _ in 0..20 {
            let a = rng.random_range(0..n);
            let b = (a + rng.random_range(1..n)) % n;
            match rng.random_range(0..5) {
                0 => psi.apply_cz(a, b).unwrap(),
                1 => psi.apply_hadamard(a).unwrap(),
                2 => psi.apply_pauli_x(a).unwrap(),
                3 => psi.swap_qubits(a, b).unwrap(),
                _ => psi
                    .apply_lc_unitary(
                        a,
                        &random_subset(&mut rng, n)
                            .into_iter()
                            .filter(|v| v.0 != a)
                            .collect(),
                    )
                    .unwrap(),
            }
            assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn entropy_equals_cut_rank() {
    let mut rng = rng(14);
    for _ in 0..200 {
        let n = rng.random_range(2..=10);
        let density = rng.random_range(0.1..0.8);
        let g = random_graph(&mut rng, n, density);
        let psi = build_graph_state(&g).unwrap();
        for _ in 0..5 {
            let side = random_subset(&mut rng, n);
            let p = Bipartition::new(side.iter().copied());
            let rank = cut_rank(&g, &p).unwrap();
            assert_eq!(rank, reference::span_rank(&g, &side));
            assert_eq!(rank, cut_rank(&g, &p.complement(n)).unwrap());
            let s = psi.entanglement_entropy(&p).unwrap();
            assert!(
                (s - rank as f64).abs() <= 1e-8,
                "entropy {s} vs rank {rank}"
            );
            let purity_s = reference::entropy_bits(psi.amplitudes(), n, &side);
            assert!((purity_s - rank as f64).abs() <= 1e-8);
        }
    }
}

#[test]
fn connected_states_are_one_uniform() {
    let mut rng = rng(15);
    for _ in 0..60 {
        let n = rng.random_range(2..=10);
        let g = random_connected_graph(&mut rng, n, 0.2);
        assert!(check_one_uniform(&g));
        let psi = build_graph_state(&g).unwrap();
        for v in g.vertices() {
            let s = psi.entanglement_entropy(&Bipartition::single(v)).unwrap();
            assert!((s - 1.0).abs() <= TOL);
        }
    }
    let mut g = GraphState::path(4);
    g = g.measure_z(VertexId(0), 0).unwrap().0;
    assert!(!check_one_uniform(&g));
}

#[test]
fn local_complementation_preserves_cut_rank() {
    let mut rng = rng(16);
    for _ in 0..300 {
        let n = rng.random_range(2..=10);
        let g = random_graph(&mut rng, n, 0.5);
        let a = VertexId(rng.random_range(0..n));
        let h = g.local_complement(a).unwrap();
        assert_eq!(h.degree(a), g.degree(a));
        for _ in 0..10 {
            let p = Bipartition::new(random_subset(&mut rng, n));
            assert_eq!(cut_rank(&g, &p).unwrap(), cut_rank(&h, &p).unwrap());
        }
    }
}

/// Postconditions and locality of one fission round on a random instance.
fn check_round(g: &GraphState, target: VertexId, kept: &BTreeSet<VertexId>, outcomes: &[u8]) {
    let nbhd = g.neighborhood(target).unwrap();
    let spec = plan_fission(g, target, kept).unwrap();
    let out = execute_fission(g, &spec, outcomes).unwrap();
    let n = g.vertex_count();
    let h = &out.graph;
    let fresh = out.new_vertex();
    assert_eq!(fresh.0, n, "split vertex is the first new vertex");

    // The split vertex carries exactly `kept`; the target keeps the rest.
    let rest: BTreeSet<_> = nbhd.difference(kept).copied().collect();
    assert_eq!(h.neighborhood(fresh).unwrap(), *kept);
    assert_eq!(h.neighborhood(target).unwrap(), rest);

    // Every other new vertex is a measured, isolated ancilla.
    for v in n + 1..h.vertex_count() {
        assert_eq!(h.degree(VertexId(v)), 0);
    }

    // Edge-locality.
    for a in 0..n {
        for b in a + 1..n {
            if a != target.0 && b != target.0 {
                assert_eq!(
                    g.has_edge(VertexId(a), VertexId(b)),
                    h.has_edge(VertexId(a), VertexId(b))
                );
            }
        }
    }

    // Participation-locality: only the target, the split side and ancillas.
    let allowed: BTreeSet<VertexId> = std::iter::once(target)
        .chain(spec.split_side.iter().copied())
        .chain((n..h.vertex_count()).map(VertexId))
        .collect();
    for step in &out.transcript.steps {
        for p in step.participants() {
            assert!(allowed.contains(&p), "{step:?} touches {p}");
        }
    }
}

#[test]
fn fission_is_local_on_random_graphs() {
    let mut rng = rng(17);
    let mut checked = 0;
    while checked < 1000 {
        let n = rng.random_range(2..=10);
        let density = rng.random_range(0.15..0.7);
        let g = random_graph(&mut rng, n, density);
        let target = VertexId(rng.random_range(0..n));
        let nbhd = g.neighborhood(target).unwrap();
        if nbhd.is_empty() {
            continue;
        }
        let kept = random_kept(&mut rng, &nbhd);
        let count = plan_fission(&g, target, &kept).unwrap().measurement_count();
        let outcomes: Vec<u8> = (0..count).map(|_| rng.random_range(0..2)).collect();
        check_round(&g, target, &kept, &outcomes);
        checked += 1;
    }
}

#[test]
fn final_graph_is_outcome_independent() {
    let mut rng = rng(18);
    let mut checked = 0;
    while checked < 150 {
        let n = rng.random_range(3..=8);
        let g = random_connected_graph(&mut rng, n, 0.3);
        let target = VertexId(rng.random_range(0..n));
        let nbhd = g.neighborhood(target).unwrap();
        let kept = random_kept(&mut rng, &nbhd);
        let spec = plan_fission(&g, target, &kept).unwrap();
        let count = spec.measurement_count();
        if g.vertex_count() + spec.ancilla.map_or(1, |k| k.qubits()) > 12 {
            continue;
        }
        let mut graphs = BTreeSet::new();
        for bits in 0u32..1 << count {
            let outcomes: Vec<u8> = (0..count).map(|i| (bits >> i & 1) as u8).collect();
            let out = execute_fission(&g, &spec, &outcomes).unwrap();
            graphs.insert(out.graph.edges());
            let ov = reference::replay_overlap(&g, &out.transcript, &out.graph);
            assert!(ov > 1.0 - TOL, "overlap {ov}");
            let lib = verify_transcript(&g, &out.transcript, 14, TOL).unwrap();
            assert!(lib.passed);
        }
        assert_eq!(graphs.len(), 1);
        checked += 1;
    }
}

#[test]
fn transcripts_survive_serialization() {
    let mut rng = rng(19);
    for _ in 0..200 {
        let n = rng.random_range(2..=9);
        let g = random_connected_graph(&mut rng, n, 0.3);
        let target = VertexId(rng.random_range(0..n));
        let kept = random_kept(&mut rng, &g.neighborhood(target).unwrap());
        let spec = plan_fission(&g, target, &kept).unwrap();
        let outcomes: Vec<u8> = (0..spec.measurement_count())
            .map(|_| rng.random_range(0..2))
            .collect();
        let out = execute_fission(&g, &spec, &outcomes).unwrap();
        let back = Transcript::from_json(&out.transcript.to_json()).unwrap();
        assert_eq!(back, out.transcript);
        assert_eq!(back.replay(&g).unwrap(), out.graph);
    }
}

#[test]
fn iterated_fission_distributes_blocks() {
    let mut rng = rng(20);
    let mut checked = 0;
    while checked < 200 {
        let n = rng.random_range(3..=7);
        let g = random_connected_graph(&mut rng, n, 0.4);
        let target = VertexId(rng.random_range(0..n));
        let mut nbhd: Vec<VertexId> = g.neighborhood(target).unwrap().into_iter().collect();
        let k = rng.random_range(2..=3);
        nbhd.shuffle(&mut rng);
        let mut partition = vec![BTreeSet::new(); k];
        for v in nbhd {
            partition[rng.random_range(0..k)].insert(v);
        }
        let count = partition_measurement_count(&partition);
        let outcomes: Vec<u8> = (0..count).map(|_| rng.random_range(0..2)).collect();
        let out = iterate_fission(&g, target, &partition, &outcomes).unwrap();
        assert_eq!(out.rounds, k - 1);
        assert_eq!(out.transcript.split_vertices.len(), k - 1);
        for (block, &s) in partition.iter().zip(&out.transcript.split_vertices) {
            assert_eq!(out.graph.neighborhood(s).unwrap(), *block);
        }
        assert_eq!(out.graph.neighborhood(target).unwrap(), partition[k - 1]);
        if out.graph.vertex_count() <= 13 {
            let ov = reference::replay_overlap(&g, &out.transcript, &out.graph);
            assert!(ov > 1.0 - TOL);
        }
        checked += 1;
    }
}

#[test]
fn orbit_search_never_worsens_and_replays() {
    let mut rng = rng(21);
    let mut checked = 0;
    while checked < 150 {
        let n = rng.random_range(3..=8);
        let g = random_connected_graph(&mut rng, n, 0.3);
        let target = VertexId(rng.random_range(0..n));
        let kept = random_kept(&mut rng, &g.neighborhood(target).unwrap());
        let r = minimize_resources(&g, target, &kept, OrbitConfig::with_budget(100_000)).unwrap();
        assert!(r.cost_after <= r.cost_before);
        assert_eq!(replay_lc(&g, &r.lc_sequence).unwrap(), r.representative);
        assert!(!r.lc_sequence.contains(&target));
        let nbhd = r.representative.neighborhood(target).unwrap();
        assert!(r.kept.is_subset(&nbhd));
        // The target's bipartite entanglement is untouched by the moves.
        let p = Bipartition::single(target);
        assert_eq!(
            cut_rank(&g, &p).unwrap(),
            cut_rank(&r.representative, &p).unwrap()
        );
        checked += 1;
    }
}
