use std::collections::{BTreeMap, HashSet};

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use num_integer::binomial;
use serde::{Deserialize, Serialize};

use super::MatchingError;
use crate::graph::{cliques, CliquePacking, MultipartiteGraph};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExactOutcome {
    Found(CliquePacking),
    /// The search completed without finding a packing.
    Absent,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactReport {
    pub outcome: ExactOutcome,
    pub nodes: u64,
}

impl ExactReport {
    pub fn packing(&self) -> Option<&CliquePacking> {
        match &self.outcome {
            ExactOutcome::Found(p) => Some(p),
            _ => None,
        }
    }
}

/// Backtracking search for a perfect K_p-packing, branching on the least
/// uncovered vertex and trying its cliques in lexicographic order, so the
/// packing found is the first in that order. With `require_balanced` every
/// index set must be used exactly N = r·m / (p·C(r, p)) times for classes of
/// size m.
pub fn exact_balanced_clique_packing(
    g: &MultipartiteGraph,
    p: usize,
    require_balanced: bool,
    budget: u64,
) -> Result<ExactReport, MatchingError> {
    let n = g.vertex_count();
    let r = g.r();
    let absent = Ok(ExactReport { outcome: ExactOutcome::Absent, nodes: 0 });
    if n == 0 {
        return Ok(ExactReport { outcome: ExactOutcome::Found(CliquePacking::default()), nodes: 0 });
    }
    if p == 0 || p > r {
        return absent;
    }
    let per_index = if require_balanced {
        let m = g.uniform_class_size().ok_or_else(|| MatchingError::Precondition("balanced packing needs equal classes".into()))?;
        let denom = p * binomial(r, p);
        if (r * m) % denom != 0 {
            return Err(MatchingError::Precondition(format!("N = {r}·{m}/({p}·C({r},{p})) is not an integer")));
        }
        Some((r * m) / denom)
    } else {
        None
    };
    if n % p != 0 {
        return absent;
    }
    let index_of: BTreeMap<Vec<usize>, usize> = (0..r).combinations(p).enumerate().map(|(i, a)| (a, i)).collect();
    let mut by_min: Vec<Vec<(FixedBitSet, usize, Vec<usize>)>> = vec![Vec::new(); n];
    for c in cliques(g, p) {
        let mut mask = FixedBitSet::with_capacity(n);
        mask.extend(c.iter().copied());
        let idx: Vec<usize> = c.iter().map(|&v| g.class_of(v)).collect();
        by_min[c[0]].push((mask, index_of[&idx], c));
    }
    let mut search = Search {
        by_min: &by_min,
        per_index,
        counts: vec![0; index_of.len()],
        failed: HashSet::new(),
        nodes: 0,
        budget,
        chosen: Vec::new(),
    };
    let mut covered = FixedBitSet::with_capacity(n);
    let outcome = match search.run(&mut covered) {
        Some(true) => {
            let cliques = search.chosen.iter().map(|&(v, i)| by_min[v][i].2.clone()).collect();
            ExactOutcome::Found(CliquePacking::new(cliques))
        }
        Some(false) => ExactOutcome::Absent,
        None => ExactOutcome::BudgetExhausted,
    };
    Ok(ExactReport { outcome, nodes: search.nodes })
}

type Entry = (FixedBitSet, usize, Vec<usize>);

struct Search<'a> {
    by_min: &'a [Vec<Entry>],
    per_index: Option<usize>,
    counts: Vec<usize>,
    failed: HashSet<(FixedBitSet, Vec<usize>)>,
    nodes: u64,
    budget: u64,
    /// (least vertex, position in by_min[least vertex]).
    chosen: Vec<(usize, usize)>,
}

impl Search<'_> {
    fn run(&mut self, covered: &mut FixedBitSet) -> Option<bool> {
        let Some(v) = first_zero(covered) else { return Some(true) };
        let key = (covered.clone(), self.counts.clone());
        if self.failed.contains(&key) {
            return Some(false);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        for (i, (mask, idx, _)) in self.by_min[v].iter().enumerate() {
            if !mask.is_disjoint(covered) || self.per_index.is_some_and(|cap| self.counts[*idx] >= cap) {
                continue;
            }
            covered.union_with(mask);
            self.counts[*idx] += 1;
            self.chosen.push((v, i));
            let res = self.run(covered);
            if res != Some(false) {
                return res;
            }
            self.chosen.pop();
            self.counts[*idx] -= 1;
            covered.difference_with(mask);
        }
        self.failed.insert(key);
        Some(false)
    }
}

fn first_zero(set: &FixedBitSet) -> Option<usize> {
    let (i, block) = set.as_slice().iter().enumerate().find(|(_, &b)| b != u32::MAX)?;
    let v = i * 32 + block.trailing_ones() as usize;
    (v < set.len()).then_some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_gamma;

    #[test]
    fn complete_graph_balanced() {
        let g = MultipartiteGraph::complete(&[6, 6, 6, 6]);
        let rep = exact_balanced_clique_packing(&g, 2, true, 100_000).unwrap();
        let p = rep.packing().unwrap();
        assert!(p.is_perfect_packing(&g, 2));
        let counts = p.index_counts(&g);
        assert_eq!(counts.len(), 6);
        assert!(counts.values().all(|&c| c == 2));
    }

    #[test]
    fn gamma_is_absent() {
        let g = build_gamma(3, 3, 3).unwrap().graph;
        let rep = exact_balanced_clique_packing(&g, 3, false, 1_000_000).unwrap();
        assert_eq!(rep.outcome, ExactOutcome::Absent);
    }

    #[test]
    fn empty_graph_absent_and_bad_n() {
        let g = MultipartiteGraph::new(&[2, 2, 2]);
        assert_eq!(exact_balanced_clique_packing(&g, 2, false, 1000).unwrap().outcome, ExactOutcome::Absent);
        let g = MultipartiteGraph::complete(&[3, 3, 3]);
        assert!(exact_balanced_clique_packing(&g, 2, true, 1000).is_err());
    }
}
