use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{clique_index, MultipartiteGraph};

/// A collection of cliques, each given as vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliquePacking {
    pub cliques: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PackingViolation {
    WrongSize { clique: usize, size: usize },
    RepeatedClass { clique: usize, class: usize },
    MissingEdge { clique: usize, u: usize, v: usize },
    UnknownVertex { clique: usize, vertex: usize },
    Overlap { vertex: usize },
    Uncovered { vertex: usize },
}

impl CliquePacking {
    pub fn new(cliques: Vec<Vec<usize>>) -> Self {
        CliquePacking { cliques }
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.cliques.iter().flatten().copied()
    }

    pub fn index_counts(&self, g: &MultipartiteGraph) -> BTreeMap<Vec<usize>, usize> {
        let mut out = BTreeMap::new();
        for c in &self.cliques {
            *out.entry(clique_index(g, c)).or_insert(0) += 1;
        }
        out
    }

    /// Every violation of "vertex-disjoint k-cliques covering all of g".
    pub fn violations(&self, g: &MultipartiteGraph, k: usize, perfect: bool) -> Vec<PackingViolation> {
        let n = g.vertex_count();
        let mut out = Vec::new();
        let mut seen = vec![false; n];
        for (i, c) in self.cliques.iter().enumerate() {
            if c.len() != k {
                out.push(PackingViolation::WrongSize { clique: i, size: c.len() });
            }
            if let Some(&bad) = c.iter().find(|&&v| v >= n) {
                out.push(PackingViolation::UnknownVertex { clique: i, vertex: bad });
                continue;
            }
            let mut classes: Vec<usize> = c.iter().map(|&v| g.class_of(v)).collect();
            classes.sort_unstable();
            if let Some(w) = classes.windows(2).find(|w| w[0] == w[1]) {
                out.push(PackingViolation::RepeatedClass { clique: i, class: w[0] });
            }
            for (a, &u) in c.iter().enumerate() {
                for &v in &c[a + 1..] {
                    if g.class_of(u) != g.class_of(v) && !g.has_edge(u, v) {
                        out.push(PackingViolation::MissingEdge { clique: i, u, v });
                    }
                }
                if seen[u] {
                    out.push(PackingViolation::Overlap { vertex: u });
                }
                seen[u] = true;
            }
        }
        if perfect {
            out.extend((0..n).filter(|&v| !seen[v]).map(|vertex| PackingViolation::Uncovered { vertex }));
        }
        out
    }

    pub fn is_perfect_packing(&self, g: &MultipartiteGraph, k: usize) -> bool {
        self.violations(g, k, true).is_empty()
    }

    /// Map every vertex through `map` (for packings of induced subgraphs).
    pub fn mapped(&self, map: &[usize]) -> CliquePacking {
        CliquePacking {
            cliques: self.cliques.iter().map(|c| c.iter().map(|&v| map[v]).collect()).collect(),
        }
    }

    pub fn extend(&mut self, other: CliquePacking) {
        self.cliques.extend(other.cliques);
    }

    /// Sort each clique and the list of cliques.
    pub fn normalized(mut self) -> Self {
        for c in &mut self.cliques {
            c.sort_unstable();
        }
        self.cliques.sort();
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_overlap_and_uncovered() {
        let g = MultipartiteGraph::complete(&[2, 2]);
        let p = CliquePacking::new(vec![vec![0, 2], vec![0, 3]]);
        let v = p.violations(&g, 2, true);
        assert!(v.contains(&PackingViolation::Overlap { vertex: 0 }));
        assert!(v.contains(&PackingViolation::Uncovered { vertex: 1 }));
        let ok = CliquePacking::new(vec![vec![0, 2], vec![1, 3]]);
        assert!(ok.is_perfect_packing(&g, 2));
        assert_eq!(ok.index_counts(&g)[&vec![0, 1]], 2);
    }
}
