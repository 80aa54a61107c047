use cliquetile::graph::{CliquePacking, MultipartiteGraph};
use cliquetile::matching::{
    exact_balanced_clique_packing, find_transversal, is_multigraphic, is_transversal, maximum_matching,
    realize_multigraph, BipartiteGraph, ExactOutcome, Rectangle,
};
use cliquetile::oracle::brute_force_packing;
use cliquetile::oracle::generate::random_dense;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn multigraphic_iff_even_and_no_dominant_degree(mut d in prop::collection::vec(0usize..=6, 0..=6)) {
        d.sort_unstable_by(|a, b| b.cmp(a));
        let sum: usize = d.iter().sum();
        let max = d.first().copied().unwrap_or(0);
        prop_assert_eq!(is_multigraphic(&d), sum % 2 == 0 && max <= sum - max);
        if is_multigraphic(&d) {
            let mut deg = vec![0; d.len()];
            for (a, b) in realize_multigraph(&d).unwrap() {
                prop_assert_ne!(a, b);
                deg[a] += 1;
                deg[b] += 1;
            }
            prop_assert_eq!(deg, d);
        }
    }

    #[test]
    fn exact_search_agrees_with_oracle(r in 2usize..=4, n in 1usize..=3, k in 2usize..=4, seed in any::<u64>()) {
        prop_assume!(k <= r && (r * n) % k == 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_dense(r, n, 0, &mut rng);
        let exact = exact_balanced_clique_packing(&g, k, false, u64::MAX).unwrap();
        let brute = brute_force_packing(&g, k, u64::MAX).verdict.exists();
        match exact.outcome {
            ExactOutcome::Found(p) => {
                prop_assert!(p.is_perfect_packing(&g, k));
                prop_assert_eq!(brute, Some(true));
            }
            ExactOutcome::Absent => prop_assert_eq!(brute, Some(false)),
            ExactOutcome::BudgetExhausted => prop_assert!(false, "unbounded search ran out"),
        }
    }

    #[test]
    fn transversal_exists_under_hypotheses(s in 1usize..=4, extra in 0usize..=2, cols in prop::collection::vec(any::<u8>(), 6)) {
        let r = s + extra;
        let cells: Vec<(usize, usize)> = (0..r)
            .filter_map(|c| {
                let x = cols[c] as usize % (s + 1);
                (x < s).then_some((x, c))
            })
            .collect();
        let per_row = (0..s).map(|row| cells.iter().filter(|c| c.0 == row).count()).max().unwrap_or(0);
        prop_assume!(per_row < r);
        let rect = Rectangle::new(s, r, cells).unwrap();
        let t = find_transversal(&rect).expect("transversal");
        prop_assert!(is_transversal(&rect, &t));
    }
}

#[test]
fn balanced_search_uses_every_index_equally() {
    let g = MultipartiteGraph::complete(&[4, 4, 4]);
    let rep = exact_balanced_clique_packing(&g, 2, true, u64::MAX).unwrap();
    let p: &CliquePacking = rep.packing().expect("complete graph packs");
    assert!(p.is_perfect_packing(&g, 2));
    let counts = p.index_counts(&g);
    assert_eq!(counts.len(), 3);
    assert!(counts.values().all(|&c| c == 2));
}

#[test]
fn maximum_matching_on_a_path() {
    let mut b = BipartiteGraph::new(3, 3);
    for (l, r) in [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)] {
        b.add_edge(l, r);
    }
    assert_eq!(maximum_matching(&b).iter().flatten().count(), 3);
    let mut b = BipartiteGraph::new(2, 2);
    b.add_edge(0, 0);
    b.add_edge(1, 0);
    assert_eq!(maximum_matching(&b).iter().flatten().count(), 1);
}
