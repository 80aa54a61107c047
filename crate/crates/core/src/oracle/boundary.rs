use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{brute_force_packing, generate::random_dense, is_isomorphic_to_gamma, OracleVerdict};
use crate::graph::io::GraphDoc;
use crate::graph::{degree_threshold, partite_min_degree, GraphError, MultipartiteGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryMode {
    /// Every graph on the given classes meeting the degree threshold.
    Exhaustive,
    /// `count` random graphs from the seeded generator.
    Sample { count: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstanceVerdict {
    Packed,
    /// No packing, and the graph is the extremal one with rn/k odd.
    Extremal,
    /// No packing and not explained by the extremal family.
    Counterexample,
    Undecided,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub r: usize,
    pub k: usize,
    pub n: usize,
    pub verdicts: Vec<InstanceVerdict>,
    pub counterexamples: Vec<GraphDoc>,
}

impl BoundaryReport {
    pub fn count(&self, v: InstanceVerdict) -> usize {
        self.verdicts.iter().filter(|&&x| x == v).count()
    }
}

/// Largest number of cross-class pairs allowed for exhaustive enumeration.
pub const EXHAUSTIVE_MAX_PAIRS: usize = 20;

/// Run the oracle over graphs with r classes of size n and partite minimum
/// degree at least ⌈(k−1)n/k⌉, classifying each outcome.
pub fn verify_theorem_boundary(r: usize, k: usize, n: usize, mode: BoundaryMode, budget: u64) -> Result<BoundaryReport, GraphError> {
    if k < 2 || r < k || (r * n) % k != 0 {
        return Err(GraphError::InvalidParameters(format!("need r >= k >= 2 and k | rn (r={r}, k={k}, n={n})")));
    }
    let threshold = degree_threshold(n, k);
    let graphs: Vec<MultipartiteGraph> = match mode {
        BoundaryMode::Exhaustive => {
            let complete = MultipartiteGraph::complete(&vec![n; r]);
            let pairs: Vec<(usize, usize)> = complete.edges().collect();
            if pairs.len() > EXHAUSTIVE_MAX_PAIRS {
                return Err(GraphError::InvalidParameters(format!("{} pairs is too many to enumerate", pairs.len())));
            }
            (0u64..1 << pairs.len())
                .filter_map(|mask| {
                    let mut g = MultipartiteGraph::new(&vec![n; r]);
                    for (i, &(u, v)) in pairs.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            g.add_edge(u, v).expect("cross pair");
                        }
                    }
                    (partite_min_degree(&g) >= threshold).then_some(g)
                })
                .collect()
        }
        BoundaryMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count).map(|_| random_dense(r, n, threshold, &mut rng)).collect()
        }
    };
    let mut report = BoundaryReport { r, k, n, verdicts: Vec::new(), counterexamples: Vec::new() };
    for g in graphs {
        let verdict = match brute_force_packing(&g, k, budget).verdict {
            OracleVerdict::Found(p) => {
                assert!(p.is_perfect_packing(&g, k), "oracle returned an invalid packing");
                InstanceVerdict::Packed
            }
            OracleVerdict::Absent => {
                if n % k == 0 && (r * n / k) % 2 == 1 && is_isomorphic_to_gamma(&g, k) {
                    InstanceVerdict::Extremal
                } else {
                    report.counterexamples.push(GraphDoc::from_graph(&g, None));
                    InstanceVerdict::Counterexample
                }
            }
            OracleVerdict::BudgetExhausted => InstanceVerdict::Undecided,
        };
        report.verdicts.push(verdict);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bipartite_halves_always_match() {
        let rep = verify_theorem_boundary(2, 2, 2, BoundaryMode::Exhaustive, 10_000).unwrap();
        assert!(!rep.verdicts.is_empty());
        assert_eq!(rep.count(InstanceVerdict::Packed), rep.verdicts.len());
    }

    #[test]
    fn tripartite_pairs_find_the_extremal_graph() {
        // r = 3, n = 2, k = 2: the two disjoint triangles are the only failure.
        let rep = verify_theorem_boundary(3, 2, 2, BoundaryMode::Exhaustive, 100_000).unwrap();
        assert_eq!(rep.count(InstanceVerdict::Counterexample), 0);
        assert!(rep.count(InstanceVerdict::Extremal) >= 1);
    }
}
