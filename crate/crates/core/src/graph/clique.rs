use fixedbitset::FixedBitSet;

use super::MultipartiteGraph;

/// Sorted class tuple of a clique.
pub fn clique_index(g: &MultipartiteGraph, clique: &[usize]) -> Vec<usize> {
    let mut idx: Vec<usize> = clique.iter().map(|&v| g.class_of(v)).collect();
    idx.sort_unstable();
    idx
}

pub fn is_clique(g: &MultipartiteGraph, vs: &[usize]) -> bool {
    vs.iter().enumerate().all(|(i, &a)| vs[i + 1..].iter().all(|&b| g.has_edge(a, b)))
}

/// All p-cliques (at most one vertex per class, automatically) as ascending
/// id lists, in lexicographic order.
pub fn cliques(g: &MultipartiteGraph, p: usize) -> Vec<Vec<usize>> {
    let mut all = FixedBitSet::with_capacity(g.vertex_count());
    all.insert_range(..);
    cliques_within(g, p, &all)
}

pub fn cliques_within(g: &MultipartiteGraph, p: usize, allowed: &FixedBitSet) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if p == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut stack = Vec::with_capacity(p);
    extend(g, p, allowed.clone(), &mut stack, &mut out);
    out
}

/// p-cliques containing `v` whose other vertices lie in `allowed`.
pub fn cliques_containing(g: &MultipartiteGraph, p: usize, v: usize, allowed: &FixedBitSet) -> Vec<Vec<usize>> {
    let mut cand = allowed.clone();
    cand.intersect_with(g.neighbors(v));
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(p);
    extend(g, p - 1, cand, &mut stack, &mut out);
    for c in &mut out {
        c.push(v);
        c.sort_unstable();
    }
    out
}

fn extend(
    g: &MultipartiteGraph,
    remaining: usize,
    cand: FixedBitSet,
    stack: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if remaining == 0 {
        out.push(stack.clone());
        return;
    }
    for v in cand.ones() {
        let mut next = cand.clone();
        next.set_range(..v + 1, false);
        next.intersect_with(g.neighbors(v));
        if next.count_ones(..) + 1 < remaining {
            continue;
        }
        stack.push(v);
        extend(g, remaining - 1, next, stack, out);
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangles_of_complete_tripartite() {
        let g = MultipartiteGraph::complete(&[2, 2, 2]);
        assert_eq!(cliques(&g, 3).len(), 8);
        assert_eq!(cliques(&g, 2).len(), 12);
        assert_eq!(cliques(&g, 4).len(), 0);
    }

    #[test]
    fn cliques_through_vertex() {
        let g = MultipartiteGraph::complete(&[2, 2, 2]);
        let mut all = FixedBitSet::with_capacity(6);
        all.insert_range(..);
        let cs = cliques_containing(&g, 3, 0, &all);
        assert_eq!(cs.len(), 4);
        assert!(cs.iter().all(|c| c.contains(&0) && is_clique(&g, c)));
    }
}
