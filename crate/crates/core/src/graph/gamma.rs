//! The extremal family: r classes of size n, each cut into k subparts.

use super::{GraphError, MultipartiteGraph, PartitionLabeling};

/// An extremal graph together with its subpart labeling.
#[derive(Clone, Debug)]
pub struct GammaInstance {
    pub graph: MultipartiteGraph,
    /// Part `class * k + j` is subpart j of that class.
    pub labeling: PartitionLabeling,
    /// True when rn/k is odd, in which case no perfect K_k-packing exists.
    pub no_perfect_packing: bool,
}

/// Subparts are 0-based here. Subparts 0 and 1 play the special roles: each
/// misses the other across classes, while every other subpart misses only
/// its own copies in other classes.
fn subparts_adjacent(a: usize, b: usize) -> bool {
    if a >= 2 {
        b != a
    } else {
        b != 1 - a
    }
}

pub fn build_gamma(n: usize, r: usize, k: usize) -> Result<GammaInstance, GraphError> {
    if k < 2 || r < k || n == 0 || n % k != 0 {
        return Err(GraphError::InvalidParameters(format!(
            "need k >= 2, r >= k and k | n (got n={n}, r={r}, k={k})"
        )));
    }
    let block = n / k;
    let mut g = MultipartiteGraph::new(&vec![n; r]);
    let sub = |id: usize, g: &MultipartiteGraph| g.vertex(id).offset / block;
    let total = g.vertex_count();
    for u in 0..total {
        for v in (u + 1)..total {
            if g.class_of(u) != g.class_of(v) && subparts_adjacent(sub(u, &g), sub(v, &g)) {
                g.add_edge(u, v)?;
            }
        }
    }
    let part_of = (0..total).map(|id| g.class_of(id) * k + sub(id, &g)).collect();
    let labeling = PartitionLabeling::new(r * k, part_of)?;
    Ok(GammaInstance { graph: g, labeling, no_perfect_packing: (r * n / k) % 2 == 1 })
}

/// The instance with one vertex per subpart; blowing it up by n/k gives
/// `build_gamma(n, r, k)`.
pub fn gamma_skeleton(r: usize, k: usize) -> Result<GammaInstance, GraphError> {
    build_gamma(k, r, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::partite_min_degree;

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_gamma(4, 3, 3).is_err());
        assert!(build_gamma(3, 2, 3).is_err());
        assert!(build_gamma(2, 2, 1).is_err());
    }

    #[test]
    fn small_cases() {
        let g = build_gamma(3, 3, 3).unwrap();
        assert_eq!(partite_min_degree(&g.graph), 2);
        assert!(g.no_perfect_packing);
        let g = build_gamma(3, 4, 3).unwrap();
        assert!(!g.no_perfect_packing);
    }

    #[test]
    fn k_two_splits_into_two_halves() {
        let g = build_gamma(2, 3, 2).unwrap().graph;
        // Offsets 0 of every class form one triangle, offsets 1 the other.
        assert!(g.has_edge(0, 2) && g.has_edge(2, 4) && g.has_edge(1, 3));
        assert!(!g.has_edge(0, 3));
        assert_eq!(g.edge_count(), 6);
    }
}
