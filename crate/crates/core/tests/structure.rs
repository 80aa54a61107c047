use cliquetile::graph::{build_gamma, MultipartiteGraph};
use cliquetile::oracle::generate::{divisibility_barrier, space_barrier};
use cliquetile::structure::{
    is_pair_complete, is_splittable, iterate_decomposition, min_diagonal_density, robust_edge_lattice, verify_split,
    Detection, DetectOptions, IntegerLattice,
};
use cliquetile::Rational;
use proptest::prelude::*;

fn arb_generators() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1usize..=4).prop_flat_map(|d| (Just(d), prop::collection::vec(prop::collection::vec(-6i64..=6, d), 0..=5)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lattice_contains_its_generators((d, gens) in arb_generators(), coeffs in prop::collection::vec(-3i64..=3, 5)) {
        let l = IntegerLattice::from_generators(d, &gens);
        for g in &gens {
            prop_assert!(l.contains(g));
        }
        let combo: Vec<i64> = (0..d).map(|i| gens.iter().zip(&coeffs).map(|(g, c)| g[i] * c).sum()).collect();
        prop_assert!(l.contains(&combo));
        // The normal form is a fixed point.
        prop_assert_eq!(&IntegerLattice::from_generators(d, l.basis()), &l);
        prop_assert!(l.rank() <= d);
    }

    #[test]
    fn lattice_is_independent_of_generator_order((d, mut gens) in arb_generators()) {
        let l = IntegerLattice::from_generators(d, &gens);
        gens.reverse();
        prop_assert_eq!(IntegerLattice::from_generators(d, &gens), l);
    }
}

#[test]
fn space_barrier_splits() {
    for (r, p, j) in [(2, 2, 1), (3, 2, 1), (3, 3, 1), (3, 3, 2)] {
        let (g, _) = space_barrier(r, p, j, 2).unwrap();
        let d = Rational::new(1, 10);
        match is_splittable(&g, p, d, &DetectOptions::exact()).unwrap() {
            Detection::Found(w) => assert!(verify_split(&g, p, d, &w)),
            other => panic!("r={r} p={p} j={j}: {other:?}"),
        }
    }
}

#[test]
fn complete_graph_and_small_gamma_split() {
    let g = MultipartiteGraph::complete(&[4, 4, 4]);
    let d = Rational::new(1, 10);
    assert!(matches!(is_splittable(&g, 2, d, &DetectOptions::exact()).unwrap(), Detection::Found(_)));
    assert!(matches!(is_pair_complete(&g, d, &DetectOptions::exact()).unwrap(), Detection::Absent));
    let gamma = build_gamma(3, 3, 3).unwrap().graph;
    // The last vertex of each class misses exactly the other two.
    match is_splittable(&gamma, 3, d, &DetectOptions::exact()).unwrap() {
        Detection::Found(w) => {
            assert!(verify_split(&gamma, 3, d, &w));
            assert_eq!(w.sets, vec![vec![2], vec![5], vec![8]]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn divisibility_barrier_is_pair_complete() {
    let (g, lab) = divisibility_barrier(3, 2, false).unwrap();
    assert!(matches!(is_pair_complete(&g, Rational::new(1, 10), &DetectOptions::exact()).unwrap(), Detection::Found(_)));
    let edges: Vec<Vec<usize>> = g.edges().map(|(u, v)| vec![u, v]).collect();
    let rl = robust_edge_lattice(&edges, &lab, 1);
    // X0 + X1 is an edge vector, X0 + Y1 is not, 2·X0 is generated.
    assert!(rl.lattice.contains(&[1, 0, 1, 0, 0, 0]));
    assert!(!rl.lattice.contains(&[1, 0, 0, 1, 0, 0]));
    assert!(rl.lattice.contains(&[2, 0, 0, 0, 0, 0]));
}

#[test]
fn decomposition_of_a_split_graph_has_dense_diagonal() {
    let (g, _) = space_barrier(3, 3, 1, 2).unwrap();
    let thresholds = vec![Rational::new(1, 10), Rational::new(1, 5), Rational::new(3, 10)];
    let rep = iterate_decomposition(&g, 3, &thresholds, &DetectOptions::exact()).unwrap();
    let dec = &rep.decomposition;
    assert!(dec.is_consistent());
    assert!(dec.rows() >= 2);
    assert_eq!(dec.weights.iter().sum::<usize>(), 3);
    assert!(min_diagonal_density(&g, dec) >= Rational::new(7, 10));
}
