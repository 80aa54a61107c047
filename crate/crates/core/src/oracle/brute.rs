use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::graph::{CliquePacking, MultipartiteGraph};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleVerdict {
    Found(CliquePacking),
    Absent,
    BudgetExhausted,
}

impl OracleVerdict {
    /// `Some(true)` for a packing, `Some(false)` for a proof of absence.
    pub fn exists(&self) -> Option<bool> {
        match self {
            OracleVerdict::Found(_) => Some(true),
            OracleVerdict::Absent => Some(false),
            OracleVerdict::BudgetExhausted => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleReport {
    pub verdict: OracleVerdict,
    pub nodes: u64,
}

/// Largest graph the brute-force oracle accepts.
pub const ORACLE_MAX_VERTICES: usize = 128;

/// Exhaustive search for a perfect K_k-packing.
///
/// Kept independent of the rest of the crate: cliques are listed by plain
/// combination loops against an edge set, and states are u128 masks.
pub fn brute_force_packing(g: &MultipartiteGraph, k: usize, budget: u64) -> OracleReport {
    let n = g.vertex_count();
    assert!(n <= ORACLE_MAX_VERTICES, "oracle limited to {ORACLE_MAX_VERTICES} vertices");
    if k == 0 || n % k != 0 {
        return OracleReport { verdict: OracleVerdict::Absent, nodes: 0 };
    }
    let edges: HashSet<(usize, usize)> = g.edges().collect();
    let adjacent = |a: usize, b: usize| edges.contains(&(a.min(b), a.max(b)));
    let mut adj_mask = vec![0u128; n];
    for &(a, b) in &edges {
        adj_mask[a] |= 1 << b;
        adj_mask[b] |= 1 << a;
    }

    // by_min[v]: cliques whose least vertex is v.
    let mut by_min: Vec<Vec<u128>> = vec![Vec::new(); n];
    let mut combo = Vec::with_capacity(k);
    list_cliques(n, k, 0, &mut combo, &adjacent, &mut |c: &[usize]| {
        let mask = c.iter().fold(0u128, |m, &v| m | (1 << v));
        by_min[c[0]].push(mask);
    });

    let full: u128 = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let mut search = Search { by_min: &by_min, adj: &adj_mask, k, full, failed: HashSet::new(), nodes: 0, budget, chosen: Vec::new() };
    let verdict = match search.run(0) {
        Some(true) => {
            let cliques = search
                .chosen
                .iter()
                .map(|&m| (0..n).filter(|&v| m >> v & 1 == 1).collect())
                .collect();
            OracleVerdict::Found(CliquePacking::new(cliques))
        }
        Some(false) => OracleVerdict::Absent,
        None => OracleVerdict::BudgetExhausted,
    };
    OracleReport { verdict, nodes: search.nodes }
}

fn list_cliques(
    n: usize,
    k: usize,
    start: usize,
    combo: &mut Vec<usize>,
    adjacent: &dyn Fn(usize, usize) -> bool,
    emit: &mut dyn FnMut(&[usize]),
) {
    if combo.len() == k {
        emit(combo);
        return;
    }
    for v in start..n {
        if combo.iter().all(|&u| adjacent(u, v)) {
            combo.push(v);
            list_cliques(n, k, v + 1, combo, adjacent, emit);
            combo.pop();
        }
    }
}

struct Search<'a> {
    by_min: &'a [Vec<u128>],
    adj: &'a [u128],
    k: usize,
    full: u128,
    failed: HashSet<u128>,
    nodes: u64,
    budget: u64,
    chosen: Vec<u128>,
}

impl Search<'_> {
    /// Some(found) or None when the budget runs out.
    fn run(&mut self, covered: u128) -> Option<bool> {
        if covered == self.full {
            return Some(true);
        }
        if self.failed.contains(&covered) {
            return Some(false);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        if !self.components_divisible(covered) {
            self.failed.insert(covered);
            return Some(false);
        }
        let v = (!covered & self.full).trailing_zeros() as usize;
        for &c in &self.by_min[v] {
            if c & covered != 0 {
                continue;
            }
            self.chosen.push(c);
            match self.run(covered | c) {
                Some(true) => return Some(true),
                Some(false) => {}
                None => return None,
            }
            self.chosen.pop();
        }
        self.failed.insert(covered);
        Some(false)
    }

    /// Each connected component of the uncovered graph must have a size
    /// divisible by k.
    fn components_divisible(&self, covered: u128) -> bool {
        let mut left = !covered & self.full;
        while left != 0 {
            let start = left.trailing_zeros() as usize;
            let mut comp = 1u128 << start;
            let mut frontier = comp;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let fresh = self.adj[v] & left & !comp;
                comp |= fresh;
                frontier |= fresh;
            }
            if comp.count_ones() as usize % self.k != 0 {
                return false;
            }
            left &= !comp;
        }
        true
    }
}

/// Does some loopless multigraph have degree sequence `d`? Exhaustive
/// pairing search, used to cross-check the closed-form test.
pub fn brute_force_multigraphic(d: &[usize]) -> bool {
    fn go(d: &mut Vec<usize>, memo: &mut HashMap<Vec<usize>, bool>) -> bool {
        let Some(i) = d.iter().position(|&x| x > 0) else { return true };
        let mut key = d.clone();
        key.sort_unstable();
        if let Some(&r) = memo.get(&key) {
            return r;
        }
        let mut ok = false;
        for j in (i + 1)..d.len() {
            if d[j] > 0 {
                d[i] -= 1;
                d[j] -= 1;
                ok = go(d, memo);
                d[i] += 1;
                d[j] += 1;
                if ok {
                    break;
                }
            }
        }
        memo.insert(key, ok);
        ok
    }
    go(&mut d.to_vec(), &mut HashMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_gamma;

    #[test]
    fn complete_tripartite_packs() {
        let g = MultipartiteGraph::complete(&[2, 2, 2]);
        let rep = brute_force_packing(&g, 3, 10_000);
        match rep.verdict {
            OracleVerdict::Found(p) => assert!(p.is_perfect_packing(&g, 3)),
            v => panic!("expected packing, got {v:?}"),
        }
    }

    #[test]
    fn odd_gamma_has_no_packing() {
        let g = build_gamma(3, 3, 3).unwrap().graph;
        assert_eq!(brute_force_packing(&g, 3, 100_000).verdict, OracleVerdict::Absent);
    }

    #[test]
    fn multigraphic_small() {
        assert!(brute_force_multigraphic(&[2, 1, 1]));
        assert!(!brute_force_multigraphic(&[3, 1]));
        assert!(!brute_force_multigraphic(&[1, 1, 1]));
        assert!(brute_force_multigraphic(&[]));
    }
}
