use cliquetile::graph::io::{graph_from_json, graph_to_json, PackingDoc};
use cliquetile::graph::{build_gamma, is_clique, partite_min_degree, CliquePacking, MultipartiteGraph, PackingViolation};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(sizes: &[usize], keep_percent: u32, seed: u64) -> MultipartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let complete = MultipartiteGraph::complete(sizes);
    let mut g = MultipartiteGraph::new(sizes);
    for (u, v) in complete.edges() {
        if rng.gen_ratio(keep_percent, 100) {
            g.add_edge(u, v).unwrap();
        }
    }
    g
}

fn arb_graph() -> impl Strategy<Value = MultipartiteGraph> {
    (prop::collection::vec(1usize..=4, 2..=4), 0u32..=100, any::<u64>()).prop_map(|(s, keep, seed)| random_graph(&s, keep, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip(g in arb_graph()) {
        let (back, labels) = graph_from_json(&graph_to_json(&g, None)).unwrap();
        prop_assert_eq!(back, g);
        prop_assert!(labels.is_none());
    }

    #[test]
    fn no_edges_inside_classes(g in arb_graph()) {
        for c in 0..g.r() {
            for u in g.class_range(c) {
                for v in g.class_range(c) {
                    prop_assert!(!g.has_edge(u, v));
                }
            }
        }
        prop_assert_eq!(g.edges().count(), g.edge_count());
    }

    #[test]
    fn blow_up_scales_min_degree(g in arb_graph(), f in 1usize..=3) {
        let b = g.blow_up(f).unwrap();
        prop_assert_eq!(b.vertex_count(), f * g.vertex_count());
        prop_assert_eq!(b.edge_count(), f * f * g.edge_count());
        prop_assert_eq!(partite_min_degree(&b), f * partite_min_degree(&g));
    }

    #[test]
    fn induced_preserves_adjacency(g in arb_graph(), pick in any::<u64>()) {
        let ids: Vec<usize> = (0..g.vertex_count()).filter(|i| pick >> (i % 64) & 1 == 1).collect();
        let (h, map) = g.induced(&ids);
        prop_assert_eq!(h.r(), g.r());
        for a in 0..h.vertex_count() {
            prop_assert_eq!(g.class_of(map[a]), h.class_of(a));
            for b in 0..h.vertex_count() {
                prop_assert_eq!(h.has_edge(a, b), g.has_edge(map[a], map[b]));
            }
        }
    }
}

#[test]
fn gamma_min_degree_is_exact() {
    for (n, r, k) in [(3, 3, 3), (3, 4, 3), (6, 3, 3), (4, 4, 4), (2, 5, 2)] {
        let inst = build_gamma(n, r, k).unwrap();
        assert_eq!(partite_min_degree(&inst.graph), (k - 1) * n / k, "n={n} r={r} k={k}");
        assert_eq!(inst.no_perfect_packing, (r * n / k) % 2 == 1);
    }
    assert!(build_gamma(5, 3, 3).is_err());
}

#[test]
fn violations_name_each_defect() {
    let mut g = MultipartiteGraph::complete(&[2, 2, 2]);
    let good = CliquePacking::new(vec![vec![0, 2, 4], vec![1, 3, 5]]);
    assert!(good.violations(&g, 3, true).is_empty());

    g.remove_edge(0, 2);
    assert!(good.violations(&g, 3, true).iter().any(|v| matches!(v, PackingViolation::MissingEdge { .. })));

    let g = MultipartiteGraph::complete(&[2, 2, 2]);
    let short = CliquePacking::new(vec![vec![0, 2, 4]]);
    assert!(short.violations(&g, 3, false).is_empty());
    assert!(short.violations(&g, 3, true).iter().any(|v| matches!(v, PackingViolation::Uncovered { .. })));

    let overlap = CliquePacking::new(vec![vec![0, 2, 4], vec![0, 3, 5]]);
    assert!(overlap.violations(&g, 3, false).iter().any(|v| matches!(v, PackingViolation::Overlap { .. })));

    let same_class = CliquePacking::new(vec![vec![0, 1, 2]]);
    assert!(same_class.violations(&g, 3, false).iter().any(|v| matches!(v, PackingViolation::RepeatedClass { .. })));
    assert!(!is_clique(&g, &[0, 1]));
}

#[test]
fn packing_doc_uses_class_offsets() {
    let g = MultipartiteGraph::complete(&[2, 2]);
    let p = CliquePacking::new(vec![vec![0, 3], vec![1, 2]]);
    let doc = PackingDoc::from_packing(&g, &p);
    let json = serde_json::to_value(&doc).unwrap();
    assert_eq!(json["cliques"][0], serde_json::json!([[0, 0], [1, 1]]));
    assert_eq!(doc.to_packing(&g).unwrap().normalized(), p.normalized());
}
