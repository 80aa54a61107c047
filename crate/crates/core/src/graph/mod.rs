//! Multipartite graphs with bitset adjacency.

mod clique;
mod gamma;
pub mod io;
mod labeling;
mod packing;

pub use clique::{cliques, cliques_containing, cliques_within, clique_index, is_clique};
pub use gamma::{build_gamma, gamma_skeleton, GammaInstance};
pub use labeling::PartitionLabeling;
pub use packing::{CliquePacking, PackingViolation};

use std::ops::Range;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge joins two vertices of class {0}")]
    SameClass(usize),
    #[error("vertex {class}:{offset} out of range")]
    OutOfRange { class: usize, offset: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("empty vertex set")]
    EmptySet,
    #[error("malformed graph document: {0}")]
    Malformed(String),
}

/// A vertex named by its class and its position inside the class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub class: usize,
    pub offset: usize,
}

impl Vertex {
    pub fn new(class: usize, offset: usize) -> Self {
        Vertex { class, offset }
    }
}

/// An r-partite graph. Vertices are numbered class by class, so every class
/// occupies a contiguous id range and each adjacency row is a bitset over ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultipartiteGraph {
    class_sizes: Vec<usize>,
    starts: Vec<usize>,
    class_of: Vec<usize>,
    adj: Vec<FixedBitSet>,
}

impl MultipartiteGraph {
    pub fn new(class_sizes: &[usize]) -> Self {
        let mut starts = Vec::with_capacity(class_sizes.len() + 1);
        let mut class_of = Vec::new();
        let mut acc = 0;
        for (c, &s) in class_sizes.iter().enumerate() {
            starts.push(acc);
            acc += s;
            class_of.extend(std::iter::repeat(c).take(s));
        }
        starts.push(acc);
        let adj = (0..acc).map(|_| FixedBitSet::with_capacity(acc)).collect();
        MultipartiteGraph { class_sizes: class_sizes.to_vec(), starts, class_of, adj }
    }

    /// Complete r-partite graph with the given class sizes.
    pub fn complete(class_sizes: &[usize]) -> Self {
        let mut g = Self::new(class_sizes);
        let total = g.vertex_count();
        for u in 0..total {
            let cu = g.class_of[u];
            for v in (u + 1)..total {
                if g.class_of[v] != cu {
                    g.adj[u].insert(v);
                    g.adj[v].insert(u);
                }
            }
        }
        g
    }

    pub fn r(&self) -> usize {
        self.class_sizes.len()
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    pub fn class_size(&self, c: usize) -> usize {
        self.class_sizes[c]
    }

    /// Common class size, if all classes have the same size.
    pub fn uniform_class_size(&self) -> Option<usize> {
        let first = *self.class_sizes.first()?;
        self.class_sizes.iter().all(|&s| s == first).then_some(first)
    }

    pub fn vertex_count(&self) -> usize {
        self.class_of.len()
    }

    pub fn class_range(&self, c: usize) -> Range<usize> {
        self.starts[c]..self.starts[c + 1]
    }

    pub fn class_set(&self, c: usize) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.vertex_count());
        s.insert_range(self.class_range(c));
        s
    }

    pub fn class_of(&self, id: usize) -> usize {
        self.class_of[id]
    }

    pub fn id(&self, v: Vertex) -> Result<usize, GraphError> {
        if v.class >= self.r() || v.offset >= self.class_sizes[v.class] {
            return Err(GraphError::OutOfRange { class: v.class, offset: v.offset });
        }
        Ok(self.starts[v.class] + v.offset)
    }

    pub fn vertex(&self, id: usize) -> Vertex {
        let c = self.class_of[id];
        Vertex::new(c, id - self.starts[c])
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let n = self.vertex_count();
        if u >= n || v >= n {
            let bad = if u >= n { u } else { v };
            return Err(GraphError::OutOfRange { class: usize::MAX, offset: bad });
        }
        if self.class_of[u] == self.class_of[v] {
            return Err(GraphError::SameClass(self.class_of[u]));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    pub fn add_edge_vertices(&mut self, a: Vertex, b: Vertex) -> Result<(), GraphError> {
        let (u, v) = (self.id(a)?, self.id(b)?);
        self.add_edge(u, v)
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u].set(v, false);
        self.adj[v].set(u, false);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn neighbors(&self, u: usize) -> &FixedBitSet {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].count_ones(..)
    }

    pub fn degree_in_class(&self, u: usize, c: usize) -> usize {
        self.adj[u].count_ones(self.class_range(c))
    }

    /// |N(u) ∩ set|.
    pub fn degree_into(&self, u: usize, set: &FixedBitSet) -> usize {
        self.adj[u].intersection(set).count()
    }

    pub fn degree_into_slice(&self, u: usize, set: &[usize]) -> usize {
        set.iter().filter(|&&v| self.adj[u].contains(v)).count()
    }

    /// Edges as (u, v) with u < v, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count())
            .flat_map(move |u| self.adj[u].ones().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones(..)).sum::<usize>() / 2
    }

    /// Number of adjacent pairs (a, b) with a ∈ A and b ∈ B.
    pub fn edges_between(&self, a: &[usize], b: &[usize]) -> usize {
        a.iter().map(|&x| self.degree_into_slice(x, b)).sum()
    }

    /// Exact density e(A, B) / (|A||B|).
    pub fn density(&self, a: &[usize], b: &[usize]) -> Result<Rational, GraphError> {
        if a.is_empty() || b.is_empty() {
            return Err(GraphError::EmptySet);
        }
        Ok(Rational::new(self.edges_between(a, b) as i64, (a.len() * b.len()) as i64))
    }

    /// Subgraph induced on `ids`, keeping all r classes. Returns the graph and
    /// the map from new ids back to old ids (ascending).
    pub fn induced(&self, ids: &[usize]) -> (MultipartiteGraph, Vec<usize>) {
        let mut sorted = ids.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut sizes = vec![0; self.r()];
        for &v in &sorted {
            sizes[self.class_of[v]] += 1;
        }
        let mut h = MultipartiteGraph::new(&sizes);
        let mut new_id = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in sorted.iter().enumerate() {
            new_id[v] = i;
        }
        for (i, &v) in sorted.iter().enumerate() {
            for w in self.adj[v].ones() {
                let j = new_id[w];
                if j != usize::MAX && j > i {
                    h.adj[i].insert(j);
                    h.adj[j].insert(i);
                }
            }
        }
        (h, sorted)
    }

    /// Relabel: `class_perm[c]` is the new class of class c and
    /// `offset_perm[c][o]` the new offset of vertex (c, o).
    pub fn permuted(&self, class_perm: &[usize], offset_perm: &[Vec<usize>]) -> MultipartiteGraph {
        let mut sizes = vec![0; self.r()];
        for c in 0..self.r() {
            sizes[class_perm[c]] = self.class_sizes[c];
        }
        let mut h = MultipartiteGraph::new(&sizes);
        let map: Vec<usize> = (0..self.vertex_count())
            .map(|id| {
                let v = self.vertex(id);
                h.starts[class_perm[v.class]] + offset_perm[v.class][v.offset]
            })
            .collect();
        for (u, v) in self.edges() {
            h.adj[map[u]].insert(map[v]);
            h.adj[map[v]].insert(map[u]);
        }
        h
    }

    /// Replace every vertex by `factor` copies and every edge by a complete
    /// bipartite graph. Copy t of (c, o) becomes (c, o * factor + t).
    pub fn blow_up(&self, factor: usize) -> Result<MultipartiteGraph, GraphError> {
        if factor == 0 {
            return Err(GraphError::InvalidParameters("blow-up factor must be positive".into()));
        }
        let sizes: Vec<usize> = self.class_sizes.iter().map(|s| s * factor).collect();
        let mut h = MultipartiteGraph::new(&sizes);
        for (u, v) in self.edges() {
            let (bu, bv) = (self.blow_id(u, factor), self.blow_id(v, factor));
            for a in 0..factor {
                for b in 0..factor {
                    h.adj[bu + a].insert(bv + b);
                    h.adj[bv + b].insert(bu + a);
                }
            }
        }
        Ok(h)
    }

    fn blow_id(&self, id: usize, factor: usize) -> usize {
        let v = self.vertex(id);
        self.starts[v.class] * factor + v.offset * factor
    }
}

/// min over v and classes j ≠ class(v) of |N(v) ∩ V_j|.
pub fn partite_min_degree(g: &MultipartiteGraph) -> usize {
    let mut best = usize::MAX;
    for u in 0..g.vertex_count() {
        let cu = g.class_of(u);
        for c in (0..g.r()).filter(|&c| c != cu) {
            best = best.min(g.degree_in_class(u, c));
        }
    }
    if best == usize::MAX {
        0
    } else {
        best
    }
}

/// ⌈(k−1)n/k⌉, the partite minimum degree the packing theorem asks for.
pub fn degree_threshold(n: usize, k: usize) -> usize {
    ((k - 1) * n).div_ceil(k)
}

/// Bitset over `universe` ids holding exactly `ids`.
pub fn bitset_of(universe: usize, ids: impl IntoIterator<Item = usize>) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(universe);
    for v in ids {
        s.insert(v);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_counts() {
        let g = MultipartiteGraph::complete(&[2, 3, 1]);
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.edge_count(), 2 * 3 + 2 + 3);
        assert_eq!(partite_min_degree(&g), 1);
    }

    #[test]
    fn rejects_same_class_edge() {
        let mut g = MultipartiteGraph::new(&[2, 2]);
        assert_eq!(g.add_edge(0, 1), Err(GraphError::SameClass(0)));
        assert!(g.add_edge(0, 2).is_ok());
        assert!(g.has_edge(2, 0));
    }

    #[test]
    fn density_is_exact() {
        let mut g = MultipartiteGraph::new(&[2, 3]);
        g.add_edge(0, 2).unwrap();
        g.add_edge(1, 4).unwrap();
        assert_eq!(g.density(&[0, 1], &[2, 3, 4]).unwrap(), Rational::new(1, 3));
        assert_eq!(g.density(&[], &[2]), Err(GraphError::EmptySet));
    }

    #[test]
    fn induced_keeps_classes() {
        let g = MultipartiteGraph::complete(&[2, 2, 2]);
        let (h, map) = g.induced(&[5, 0, 2]);
        assert_eq!(map, vec![0, 2, 5]);
        assert_eq!(h.class_sizes(), &[1, 1, 1]);
        assert_eq!(h.edge_count(), 3);
    }

    #[test]
    fn blow_up_sizes() {
        let mut g = MultipartiteGraph::new(&[1, 1]);
        g.add_edge(0, 1).unwrap();
        let h = g.blow_up(3).unwrap();
        assert_eq!(h.class_sizes(), &[3, 3]);
        assert_eq!(h.edge_count(), 9);
    }
}
