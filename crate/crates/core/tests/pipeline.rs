use cliquetile::graph::{degree_threshold, is_clique};
use cliquetile::matching::{exact_balanced_clique_packing, ExactOutcome};
use cliquetile::oracle::brute_force_packing;
use cliquetile::oracle::generate::{planted_rows, random_dense};
use cliquetile::pipeline::{glue_rows, run_pipeline, sigma_partition, solve, Params, PipelineInput, Status};
use cliquetile::Rational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solve_matches_oracle(r in 2usize..=5, n in 1usize..=5, k in 2usize..=4, seed in any::<u64>()) {
        prop_assume!(k <= r && r * n <= 15 && (r * n) % k == 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_dense(r, n, degree_threshold(n, k), &mut rng);
        let out = solve(&g, k, &Params::default()).unwrap();
        prop_assert_eq!(out.exists(), brute_force_packing(&g, k, u64::MAX).verdict.exists());
        if let Some(p) = &out.packing {
            prop_assert!(p.is_perfect_packing(&g, k));
            prop_assert_eq!(out.status, Status::Packed);
        }
    }

    #[test]
    fn sigma_sets_are_consecutive(weights in prop::collection::vec(1usize..=3, 1..=4)) {
        let sets = sigma_partition(&weights);
        prop_assert_eq!(sets.len(), weights.len());
        let flat: Vec<usize> = sets.iter().flatten().copied().collect();
        prop_assert_eq!(flat, (0..weights.iter().sum()).collect::<Vec<_>>());
        for (s, &w) in sets.iter().zip(&weights) {
            prop_assert_eq!(s.len(), w);
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(Status::Packed.exit_code(), 0);
    assert_eq!(Status::Extremal.exit_code(), 2);
    assert_eq!(Status::Diagnosis.exit_code(), 3);
}

#[test]
fn deleted_cliques_are_disjoint_cliques() {
    for seed in 0..6u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights: &[usize] = if seed % 2 == 0 { &[1, 1, 1] } else { &[2, 1] };
        let (g, dec, halves) = planted_rows(4, weights, 24, Rational::new(19, 20), &[], &mut rng).unwrap();
        let run = run_pipeline(&g, &PipelineInput { k: 3, decomposition: dec, halves }, &Params::default());
        let ledger = run.ledger.as_ref().expect("ledger is kept");
        let mut seen = vec![false; g.vertex_count()];
        for c in &ledger.cliques {
            assert!(is_clique(&g, &c.clique), "seed {seed}: {:?}", c.clique);
            assert_eq!(c.clique.len(), 3);
            for &v in &c.clique {
                assert!(!std::mem::replace(&mut seen[v], true), "seed {seed}: vertex {v} deleted twice");
            }
        }
        if let Some(p) = &run.packing {
            assert!(p.is_perfect_packing(&g, 3), "seed {seed}");
        } else {
            assert!(run.error.is_some(), "seed {seed}: no packing and no error");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn glued_rows_form_a_perfect_packing(seed in any::<u64>()) {
        // Rows dense inside, complete across.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut g, dec, _) = planted_rows(3, &[2, 1], 2, Rational::new(9, 10), &[], &mut rng).unwrap();
        let row_of = dec.row_of(g.vertex_count());
        for u in 0..g.vertex_count() {
            for v in (u + 1)..g.vertex_count() {
                if g.class_of(u) != g.class_of(v) && row_of[u] != row_of[v] {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        let mut rows = Vec::new();
        for i in 0..dec.rows() {
            let (sub, map) = g.induced(&dec.row_vertices(i));
            let rep = exact_balanced_clique_packing(&sub, dec.weights[i], true, u64::MAX).unwrap();
            match rep.outcome {
                ExactOutcome::Found(p) => rows.push(p.mapped(&map)),
                _ => return Ok(()),
            }
        }
        let rep = glue_rows(&g, &dec, &rows, 1_000_000).unwrap();
        prop_assert!(rep.packing.is_perfect_packing(&g, 3));
        for c in &rep.packing.cliques {
            let in_first = c.iter().filter(|&&v| row_of[v] == Some(0)).count();
            prop_assert_eq!(in_first, 2);
        }
    }
}
