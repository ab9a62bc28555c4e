use super::*;
use crate::constraints::ConstraintMap;
use crate::graph::MultiGraph;
use proptest::prelude::*;

fn graph(n: usize, edges: &[(usize, usize)]) -> MultiGraph {
    MultiGraph::build(n, edges).unwrap()
}

fn allow(g: &MultiGraph, sets: &[&[usize]]) -> ConstraintMap {
    ConstraintMap::from_allowed(g, &sets.iter().map(|s| s.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn star() -> MultiGraph {
    graph(4, &[(0, 1), (0, 2), (0, 3)])
}

fn triangle() -> MultiGraph {
    graph(3, &[(0, 1), (1, 2), (2, 0)])
}

#[test]
fn initial_partition_examples() {
    let t = triangle();
    let p = initial_partition(&allow(&t, &[&[1], &[1], &[1]]));
    assert_eq!((p.odd, p.unresolved), (vec![0, 1, 2], vec![]));

    let path = graph(3, &[(0, 1), (1, 2)]);
    let p = initial_partition(&allow(&path, &[&[1], &[0, 1, 2], &[1]]));
    assert_eq!((p.odd, p.unresolved), (vec![0, 2], vec![1]));

    let k2 = graph(2, &[(0, 1)]);
    let p = initial_partition(&allow(&k2, &[&[0, 1], &[0, 1]]));
    assert_eq!(p.unresolved, vec![0, 1]);
}

#[test]
fn star_windows() {
    let g = star();
    let h = allow(&g, &[&[0, 2], &[1], &[1], &[1]]);
    let w = window(&g, &h, 0, &Partition::initial(&h)).unwrap();
    assert_eq!((w.lower, w.excluded, w.upper, w.members.clone()), (0, 3, 0, vec![0]));
    assert_eq!(w.shape(), WindowShape::Single(Parity::Even));

    let h = allow(&g, &[&[1, 3], &[1], &[1], &[1]]);
    let w = window(&g, &h, 0, &Partition::initial(&h)).unwrap();
    assert!(w.members.is_empty());
    assert_eq!(w.shape(), WindowShape::Empty);
}

#[test]
fn path_window_forces_both_edges_inward() {
    let g = graph(3, &[(0, 1), (1, 2)]);
    let h = allow(&g, &[&[1], &[0, 2], &[1]]);
    let w = window(&g, &h, 1, &Partition::initial(&h)).unwrap();
    assert_eq!((w.lower, w.excluded, w.upper, w.members), (0, 2, 0, vec![0]));
}

#[test]
fn window_rejects_two_open_components() {
    let g = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
    let h = ConstraintMap::unconstrained(&g);
    assert_eq!(
        window(&g, &h, 2, &Partition::initial(&h)),
        Err(DecisionError::TooManyUnresolvedComponents { vertex: 2, count: 2 })
    );
}

#[test]
fn pick_next_examples() {
    let caterpillar = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
    assert_eq!(pick_next(&caterpillar, &[1, 2, 3]).unwrap(), 1);
    let path = graph(3, &[(0, 1), (1, 2)]);
    assert_eq!(pick_next(&path, &[1]).unwrap(), 1);
    let bowtie = graph(5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]);
    assert_eq!(pick_next(&bowtie, &[0]).unwrap(), 0);
}

#[test]
fn decide_examples() {
    let t = triangle();
    let d = decide(&t, &allow(&t, &[&[1], &[1], &[1]])).unwrap();
    assert!(d.verdict.exists());
    assert!(matches!(
        d.verdict,
        Verdict::Exists {
            reason: ExistsReason::TraceCompletedMatching { .. },
            ..
        }
    ));

    let h = allow(&t, &[&[0, 2], &[0, 2], &[0, 2]]);
    let d = decide(&t, &h).unwrap();
    let cert = d.verdict.certificate().expect("no orientation").clone();
    assert!(matches!(cert.kind, CertificateKind::TraceMismatch { .. }));
    assert_eq!(verify_certificate(&t, &h, &cert), Ok(()));

    // `{1, 3}` on a degree-3 vertex is odd-fixed, so the center gets no
    // trace step and the refutation is a parity mismatch.
    let g = star();
    let h = allow(&g, &[&[1, 3], &[1], &[1], &[1]]);
    let cert = decide(&g, &h).unwrap().verdict.certificate().unwrap().clone();
    assert!(matches!(cert.kind, CertificateKind::TraceMismatch { .. }));
    assert_eq!(verify_certificate(&g, &h, &cert), Ok(()));

    let h = allow(&g, &[&[1, 2, 3], &[1], &[1], &[1]]);
    let cert = decide(&g, &h).unwrap().verdict.certificate().unwrap().clone();
    match &cert.kind {
        CertificateKind::EmptyWindow { prefix, step } => {
            assert!(prefix.is_empty());
            assert_eq!(step.vertex, 0);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(verify_certificate(&g, &h, &cert), Ok(()));

    let path = graph(3, &[(0, 1), (1, 2)]);
    let h = allow(&path, &[&[0, 1], &[1], &[1]]);
    assert_eq!(
        decide(&path, &h).unwrap().verdict,
        Verdict::Exists {
            witness: 0,
            reason: ExistsReason::MixedParityVertex
        }
    );
}

#[test]
fn per_vertex_void_on_isolated_vertex() {
    let g = graph(1, &[]);
    let h = allow(&g, &[&[]]);
    let cert = decide(&g, &h).unwrap().verdict.certificate().unwrap().clone();
    assert_eq!(cert.kind, CertificateKind::PerVertexVoid { vertex: 0 });
    assert_eq!(verify_certificate(&g, &h, &cert), Ok(()));
    let ok = allow(&g, &[&[0]]);
    assert!(verify_certificate(&g, &ok, &cert).is_err());
}

#[test]
fn tampered_certificates_are_rejected() {
    let t = triangle();
    let h = allow(&t, &[&[0, 2], &[0, 2], &[0, 2]]);
    let mut cert = decide(&t, &h).unwrap().verdict.certificate().unwrap().clone();
    if let CertificateKind::TraceMismatch { trace } = &mut cert.kind {
        std::mem::swap(&mut trace.odd, &mut trace.even);
    }
    assert_eq!(
        verify_certificate(&t, &h, &cert),
        Err(CertificateRejection::PartitionMismatch)
    );

    let g = star();
    let h = allow(&g, &[&[1, 2, 3], &[1], &[1], &[1]]);
    let good = decide(&g, &h).unwrap().verdict.certificate().unwrap().clone();
    let mut bad = good.clone();
    if let CertificateKind::EmptyWindow { step, .. } = &mut bad.kind {
        step.lower = 1;
    }
    assert_eq!(
        verify_certificate(&g, &h, &bad),
        Err(CertificateRejection::WindowMismatch { step: 0 })
    );
    let other = allow(&g, &[&[0, 2], &[1], &[1], &[1]]);
    assert_eq!(
        verify_certificate(&g, &other, &good),
        Err(CertificateRejection::DigestMismatch)
    );
}

#[test]
fn two_connected_closed_form() {
    let t = triangle();
    assert!(decide_2connected(&t, &allow(&t, &[&[1], &[1], &[1]])).unwrap().exists());
    let digon = graph(2, &[(0, 1), (0, 1)]);
    assert!(decide_2connected(&digon, &allow(&digon, &[&[1], &[1]]))
        .unwrap()
        .exists());
    let c4 = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
    assert!(decide_2connected(&c4, &allow(&c4, &[&[1], &[1], &[1], &[1]]))
        .unwrap()
        .exists());
    let path = graph(3, &[(0, 1), (1, 2)]);
    assert_eq!(
        decide_2connected(&path, &ConstraintMap::unconstrained(&path)),
        Err(DecisionError::Not2Connected(1))
    );
}

#[test]
fn rejects_non_dense_input() {
    let path = graph(3, &[(0, 1), (1, 2)]);
    let h = allow(&path, &[&[0, 1], &[2], &[0, 1]]);
    assert!(matches!(decide(&path, &h), Err(DecisionError::NotDense(_))));
}

#[test]
fn mutant_inverts_the_final_comparison() {
    let t = triangle();
    let h = allow(&t, &[&[1], &[1], &[1]]);
    let options = DecideOptions {
        mutation: Some(Mutation::InvertTraceParity),
        ..DecideOptions::default()
    };
    assert!(!decide_with(&t, &h, &options).unwrap().verdict.exists());
}

/// A chain of blocks (triangles, digons, bridges) glued at cut vertices, with
/// extra pendant blocks hanging off some of them.
fn block_chain() -> impl Strategy<Value = (MultiGraph, ConstraintMap)> {
    (
        prop::collection::vec((0usize..3, any::<bool>()), 1..9),
        prop::collection::vec(0usize..4, 16),
    )
        .prop_map(|(shapes, choices)| {
            let mut edges = Vec::new();
            let mut n = 1;
            let mut spine = 0;
            for (kind, pendant) in shapes {
                let attach = if pendant { n - 1 } else { spine };
                let a = n;
                match kind {
                    0 => {
                        edges.push((attach, a));
                        n += 1;
                    }
                    1 => {
                        edges.push((attach, a));
                        edges.push((attach, a));
                        n += 1;
                    }
                    _ => {
                        edges.extend([(attach, a), (a, a + 1), (a + 1, attach)]);
                        n += 2;
                    }
                }
                if !pendant {
                    spine = n - 1;
                }
            }
            let g = MultiGraph::build(n, &edges).unwrap();
            let sets = (0..n)
                .map(|v| {
                    let d = g.degree(v);
                    match choices[v % choices.len()] {
                        0 => DegreeSet::parity_class(d, Parity::Odd),
                        1 => DegreeSet::parity_class(d, Parity::Even),
                        2 => DegreeSet::full(d),
                        _ => {
                            let mut s = DegreeSet::full(d);
                            s.remove(d / 2);
                            s
                        }
                    }
                })
                .collect();
            (g, ConstraintMap::from_sets(sets))
        })
}

use crate::constraints::DegreeSet;

proptest! {
    #[test]
    fn engine_matches_reference((g, h) in block_chain()) {
        let fast = decide(&g, &h).unwrap();
        let slow = decide_with(&g, &h, &DecideOptions { reference: true, ..DecideOptions::default() }).unwrap();
        prop_assert_eq!(&fast, &slow);
        if let Some(c) = fast.verdict.certificate() {
            prop_assert_eq!(verify_certificate(&g, &h, c), Ok(()));
        }
    }

    #[test]
    fn window_sums_are_consistent((g, h) in block_chain()) {
        let p = Partition::initial(&h);
        for x in 0..g.vertex_count() {
            let comps = g.components_minus(x).unwrap();
            prop_assert_eq!(comps.iter().map(|c| c.attachment).sum::<usize>(), g.degree(x));
            if let Ok(w) = window(&g, &h, x, &p) {
                prop_assert!(w.members.iter().all(|&i| w.lower <= i && i <= w.upper));
            }
        }
    }
}
