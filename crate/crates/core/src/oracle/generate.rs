//! Seeded instance generators.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{GraphError, MultipartiteGraph, PartitionLabeling};
use crate::structure::RowDecomposition;
use crate::Rational;

/// Start from the complete r-partite graph with classes of size n and delete
/// a random number of edges in random order, skipping any deletion that
/// would push a partite degree below `min_degree`.
pub fn random_dense<R: Rng>(r: usize, n: usize, min_degree: usize, rng: &mut R) -> MultipartiteGraph {
    let mut g = MultipartiteGraph::complete(&vec![n; r]);
    let mut pairs: Vec<(usize, usize)> = g.edges().collect();
    pairs.shuffle(rng);
    let target = rng.gen_range(0..=pairs.len());
    let mut deleted = 0;
    for (u, v) in pairs {
        if deleted == target {
            break;
        }
        let (cu, cv) = (g.class_of(u), g.class_of(v));
        if g.degree_in_class(u, cv) > min_degree && g.degree_in_class(v, cu) > min_degree {
            g.remove_edge(u, v);
            deleted += 1;
        }
    }
    g
}

/// Space barrier: classes of size p·unit, and S holds the first j·unit
/// vertices of every class. Vertices of S are coloured by offset / unit and
/// two S-vertices are adjacent only when their colours differ, so no clique
/// meets S in more than j vertices. All other cross pairs are edges.
pub fn space_barrier(r: usize, p: usize, j: usize, unit: usize) -> Result<(MultipartiteGraph, Vec<usize>), GraphError> {
    if p < 2 || j == 0 || j >= p || unit == 0 || r < p {
        return Err(GraphError::InvalidParameters(format!("space barrier needs 1 <= j < p <= r (p={p}, j={j}, r={r})")));
    }
    let mut base = MultipartiteGraph::complete(&vec![p; r]);
    let in_s = |g: &MultipartiteGraph, v: usize| g.vertex(v).offset < j;
    let pairs: Vec<(usize, usize)> = base.edges().collect();
    for (u, v) in pairs {
        if in_s(&base, u) && in_s(&base, v) && base.vertex(u).offset == base.vertex(v).offset {
            base.remove_edge(u, v);
        }
    }
    let g = base.blow_up(unit)?;
    let s = (0..g.vertex_count()).filter(|&v| g.vertex(v).offset < j * unit).collect();
    Ok((g, s))
}

/// Divisibility barrier: classes of size 2·unit split into halves X (first
/// `unit` offsets) and Y, with every cross-class X–X and Y–Y pair an edge and
/// no X–Y edges. With `odd_x`, one vertex of class 0 moves from Y to X.
/// The labeling has part 2c for X ∩ V_c and 2c + 1 for Y ∩ V_c.
pub fn divisibility_barrier(r: usize, unit: usize, odd_x: bool) -> Result<(MultipartiteGraph, PartitionLabeling), GraphError> {
    if r < 2 || unit == 0 || (odd_x && unit < 2) {
        return Err(GraphError::InvalidParameters("divisibility barrier needs r >= 2 and unit >= 1".into()));
    }
    let mut g = MultipartiteGraph::new(&vec![2 * unit; r]);
    let x_size = |c: usize| if odd_x && c == 0 { unit + 1 } else { unit };
    let in_x = |g: &MultipartiteGraph, v: usize| {
        let x = g.vertex(v);
        x.offset < x_size(x.class)
    };
    let total = g.vertex_count();
    for u in 0..total {
        for v in (u + 1)..total {
            if g.class_of(u) != g.class_of(v) && in_x(&g, u) == in_x(&g, v) {
                g.add_edge(u, v)?;
            }
        }
    }
    let parts = (0..total).map(|v| 2 * g.class_of(v) + usize::from(!in_x(&g, v))).collect();
    let lab = PartitionLabeling::new(2 * r, parts)?;
    Ok((g, lab))
}

/// Rows planted by offset: row i takes the next weights[i]·n offsets of
/// every class. Each cross-class pair is an edge with probability `density`,
/// except that inside a row listed in `pair_complete` (weight 2) the first n
/// offsets of each block form one half and no edge crosses the halves.
/// Returns the graph, the planted decomposition and the halves.
pub fn planted_rows<R: Rng>(
    r: usize,
    weights: &[usize],
    n: usize,
    density: Rational,
    pair_complete: &[usize],
    rng: &mut R,
) -> Result<(MultipartiteGraph, RowDecomposition, Vec<Option<Vec<Vec<usize>>>>), GraphError> {
    if r < 2 || n == 0 || weights.is_empty() || weights.contains(&0) {
        return Err(GraphError::InvalidParameters("planted rows need r >= 2, n >= 1 and positive weights".into()));
    }
    if pair_complete.iter().any(|&i| weights.get(i) != Some(&2)) {
        return Err(GraphError::InvalidParameters("pair-complete rows must have weight 2".into()));
    }
    if *density.numer() < 0 || density > Rational::from_integer(1) {
        return Err(GraphError::InvalidParameters("density must lie in [0, 1]".into()));
    }
    let k: usize = weights.iter().sum();
    let mut g = MultipartiteGraph::new(&vec![k * n; r]);
    let mut starts = Vec::with_capacity(weights.len());
    let mut acc = 0;
    for &p in weights {
        starts.push(acc);
        acc += p * n;
    }
    let row_of = |offset: usize| starts.iter().rposition(|&s| s <= offset).expect("offset in some row");
    let half = |offset: usize| (offset - starts[row_of(offset)]) < n;
    let (num, den) = (*density.numer() as u32, *density.denom() as u32);
    let total = g.vertex_count();
    for u in 0..total {
        for v in (u + 1)..total {
            let (a, b) = (g.vertex(u), g.vertex(v));
            if a.class == b.class {
                continue;
            }
            let row = row_of(a.offset);
            if row == row_of(b.offset) && pair_complete.contains(&row) && half(a.offset) != half(b.offset) {
                continue;
            }
            if rng.gen_ratio(num, den) {
                g.add_edge(u, v)?;
            }
        }
    }
    let blocks: Vec<Vec<Vec<usize>>> = weights
        .iter()
        .zip(&starts)
        .map(|(&p, &s)| (0..r).map(|c| g.class_range(c).skip(s).take(p * n).collect()).collect())
        .collect();
    let halves = (0..weights.len())
        .map(|i| pair_complete.contains(&i).then(|| blocks[i].iter().map(|b| b[..n].to_vec()).collect()))
        .collect();
    Ok((g, RowDecomposition { unit: n, weights: weights.to_vec(), blocks }, halves))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cliques, partite_min_degree};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_respects_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let g = random_dense(3, 4, 3, &mut rng);
            assert!(partite_min_degree(&g) >= 3);
        }
    }

    #[test]
    fn space_barrier_cliques_avoid_s() {
        let (g, s) = space_barrier(4, 3, 1, 2).unwrap();
        assert_eq!(partite_min_degree(&g), 4);
        for c in cliques(&g, 3) {
            assert!(c.iter().filter(|v| s.contains(v)).count() <= 1);
        }
    }

    #[test]
    fn divisibility_barrier_has_two_halves() {
        let (g, lab) = divisibility_barrier(3, 2, false).unwrap();
        assert_eq!(g.edge_count(), 2 * 3 * 4);
        assert!(lab.respects_classes(&g));
    }
}
