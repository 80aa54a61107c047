use cliquetile::graph::{build_gamma, MultipartiteGraph};
use cliquetile::oracle::generate::random_dense;
use cliquetile::oracle::{
    are_isomorphic, brute_force_multigraphic, brute_force_packing, canonical_form, is_isomorphic_to_gamma,
    verify_theorem_boundary, BoundaryMode, InstanceVerdict, OracleVerdict,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_ignores_relabelling(r in 2usize..=4, n in 1usize..=3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_dense(r, n, 0, &mut rng);
        let mut classes: Vec<usize> = (0..r).collect();
        classes.shuffle(&mut rng);
        let offsets: Vec<Vec<usize>> = (0..r)
            .map(|_| {
                let mut o: Vec<usize> = (0..n).collect();
                o.shuffle(&mut rng);
                o
            })
            .collect();
        let h = g.permuted(&classes, &offsets);
        prop_assert_eq!(canonical_form(&g), canonical_form(&h));
        prop_assert!(are_isomorphic(&g, &h));
    }

    #[test]
    fn found_packings_verify(r in 2usize..=4, n in 1usize..=3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_dense(r, n, 0, &mut rng);
        if let OracleVerdict::Found(p) = brute_force_packing(&g, 2, u64::MAX).verdict {
            prop_assert!(p.is_perfect_packing(&g, 2));
        }
    }
}

#[test]
fn multigraph_oracle_small_cases() {
    assert!(brute_force_multigraphic(&[2, 1, 1]));
    assert!(brute_force_multigraphic(&[3, 3]));
    assert!(!brute_force_multigraphic(&[3, 1]));
    assert!(!brute_force_multigraphic(&[1, 1, 1]));
    assert!(brute_force_multigraphic(&[]));
}

#[test]
fn gamma_is_recognised_and_blocks_odd_packings() {
    let inst = build_gamma(3, 3, 3).unwrap();
    assert!(is_isomorphic_to_gamma(&inst.graph, 3));
    assert!(matches!(brute_force_packing(&inst.graph, 3, u64::MAX).verdict, OracleVerdict::Absent));
    assert!(!is_isomorphic_to_gamma(&MultipartiteGraph::complete(&[3, 3, 3]), 3));
    let even = build_gamma(3, 4, 3).unwrap();
    assert!(!even.no_perfect_packing);
    assert!(matches!(brute_force_packing(&even.graph, 3, u64::MAX).verdict, OracleVerdict::Found(_)));
}

#[test]
fn budget_is_reported() {
    let g = MultipartiteGraph::complete(&[4, 4, 4]);
    assert!(matches!(brute_force_packing(&g, 3, 1).verdict, OracleVerdict::BudgetExhausted | OracleVerdict::Found(_)));
}

#[test]
fn boundary_has_no_counterexamples_on_small_cases() {
    let rep = verify_theorem_boundary(2, 2, 3, BoundaryMode::Exhaustive, u64::MAX).unwrap();
    assert_eq!(rep.count(InstanceVerdict::Counterexample), 0);
    assert_eq!(rep.count(InstanceVerdict::Undecided), 0);
    let rep = verify_theorem_boundary(3, 3, 3, BoundaryMode::Sample { count: 40, seed: 7 }, u64::MAX).unwrap();
    assert_eq!(rep.count(InstanceVerdict::Counterexample), 0);
    assert_eq!(rep.verdicts.len(), 40);
}
