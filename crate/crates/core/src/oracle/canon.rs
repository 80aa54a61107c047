//! Canonical forms up to class-preserving isomorphism (classes may be
//! permuted among themselves).
//!
//! Twins (same class, same neighbourhood) are merged into weighted nodes
//! first. The quotient gets one extra node per class, joined to the class
//! members, and a canonical labeling is found by refinement followed by an
//! exhaustive individualization search that keeps the least certificate.

use std::collections::BTreeMap;

use crate::graph::{build_gamma, MultipartiteGraph};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    colors: Vec<u64>,
    adjacency: Vec<u64>,
}

struct Colored {
    colors: Vec<u64>,
    adj: Vec<Vec<bool>>,
}

fn quotient(g: &MultipartiteGraph) -> Colored {
    // Group vertices by (class, neighbourhood).
    let mut groups: BTreeMap<(usize, Vec<usize>), Vec<usize>> = BTreeMap::new();
    for v in 0..g.vertex_count() {
        groups.entry((g.class_of(v), g.neighbors(v).ones().collect())).or_default().push(v);
    }
    let reps: Vec<(usize, usize, u64)> = groups.iter().map(|((c, _), vs)| (*c, vs[0], vs.len() as u64)).collect();
    let t = reps.len();
    let size = t + g.r();
    let mut adj = vec![vec![false; size]; size];
    let mut colors = Vec::with_capacity(size);
    for (i, &(ci, vi, w)) in reps.iter().enumerate() {
        colors.push(w);
        for (j, &(_, vj, _)) in reps.iter().enumerate() {
            adj[i][j] = g.has_edge(vi, vj);
        }
        adj[i][t + ci] = true;
        adj[t + ci][i] = true;
    }
    // Class nodes get colour 0, which no weighted node has.
    colors.extend(std::iter::repeat(0).take(g.r()));
    Colored { colors, adj }
}

type Partition = Vec<Vec<usize>>;

fn refine(h: &Colored, mut cells: Partition) -> Partition {
    loop {
        let n = h.colors.len();
        let mut cell_of = vec![0; n];
        for (i, c) in cells.iter().enumerate() {
            for &v in c {
                cell_of[v] = i;
            }
        }
        let mut next: Partition = Vec::with_capacity(cells.len());
        for cell in &cells {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut sig: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
            for &v in cell {
                let mut counts = vec![0; cells.len()];
                for (w, &a) in h.adj[v].iter().enumerate() {
                    if a {
                        counts[cell_of[w]] += 1;
                    }
                }
                sig.entry(counts).or_default().push(v);
            }
            next.extend(sig.into_values());
        }
        if next.len() == cells.len() {
            return next;
        }
        cells = next;
    }
}

fn certificate(h: &Colored, order: &[usize]) -> CanonicalForm {
    let n = order.len();
    let colors = order.iter().map(|&v| h.colors[v]).collect();
    let mut adjacency = vec![0u64; (n * n).div_ceil(64)];
    for (i, &a) in order.iter().enumerate() {
        for (j, &b) in order.iter().enumerate() {
            if h.adj[a][b] {
                let bit = i * n + j;
                adjacency[bit / 64] |= 1 << (bit % 64);
            }
        }
    }
    CanonicalForm { colors, adjacency }
}

fn search(h: &Colored, cells: Partition, best: &mut Option<CanonicalForm>) {
    let cells = refine(h, cells);
    let target = cells.iter().enumerate().filter(|(_, c)| c.len() > 1).min_by_key(|(_, c)| c.len()).map(|(i, _)| i);
    match target {
        None => {
            let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
            let cert = certificate(h, &order);
            if best.as_ref().map_or(true, |b| cert < *b) {
                *best = Some(cert);
            }
        }
        Some(i) => {
            for &v in &cells[i] {
                let mut next = cells.clone();
                let rest: Vec<usize> = cells[i].iter().copied().filter(|&w| w != v).collect();
                next.splice(i..=i, [vec![v], rest]);
                search(h, next, best);
            }
        }
    }
}

pub fn canonical_form(g: &MultipartiteGraph) -> CanonicalForm {
    let h = quotient(g);
    let mut by_color: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (v, &c) in h.colors.iter().enumerate() {
        by_color.entry(c).or_default().push(v);
    }
    let mut best = None;
    search(&h, by_color.into_values().collect(), &mut best);
    best.unwrap_or(CanonicalForm { colors: Vec::new(), adjacency: Vec::new() })
}

pub fn are_isomorphic(a: &MultipartiteGraph, b: &MultipartiteGraph) -> bool {
    let mut sa = a.class_sizes().to_vec();
    let mut sb = b.class_sizes().to_vec();
    sa.sort_unstable();
    sb.sort_unstable();
    sa == sb && a.edge_count() == b.edge_count() && canonical_form(a) == canonical_form(b)
}

/// Is `g` the extremal graph with classes of size n, up to relabeling?
pub fn is_isomorphic_to_gamma(g: &MultipartiteGraph, k: usize) -> bool {
    let Some(n) = g.uniform_class_size() else { return false };
    match build_gamma(n, g.r(), k) {
        Ok(inst) => are_isomorphic(g, &inst.graph),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relabeling_preserves_form() {
        let g = build_gamma(4, 3, 2).unwrap().graph;
        let h = g.permuted(&[2, 0, 1], &[vec![3, 2, 1, 0], vec![1, 0, 3, 2], vec![0, 2, 1, 3]]);
        assert!(are_isomorphic(&g, &h));
        assert!(is_isomorphic_to_gamma(&h, 2));
    }

    #[test]
    fn distinguishes_complete_graph() {
        let g = MultipartiteGraph::complete(&[3, 3, 3]);
        assert!(!is_isomorphic_to_gamma(&g, 3));
        let mut h = g.clone();
        h.remove_edge(0, 3);
        assert!(!are_isomorphic(&g, &h));
    }
}
