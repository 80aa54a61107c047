use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::{Params, PipelineError};
use crate::graph::MultipartiteGraph;
use crate::structure::RowDecomposition;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BadReason {
    /// At most (1 − f)·p·n neighbours in the diagonal block X^row_class.
    Diagonal { row: usize, class: usize, neighbours: usize },
    /// Too few neighbours in its own half of a pair-complete row.
    Half { class: usize, neighbours: usize },
    /// Left out of the decomposition to make class sizes divisible by k.
    Trimmed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadVertex {
    pub vertex: usize,
    pub reasons: Vec<BadReason>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexMove {
    pub vertex: usize,
    pub from: Option<usize>,
    pub to: usize,
    /// Bad blocks of the vertex in the row it was assigned to.
    pub bad_blocks: usize,
}

/// The blocks W^i_j together with the fixed decomposition X^i_j they came
/// from, the good/bad split and the halves S^i_j of pair-complete rows.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockAssignment {
    pub r: usize,
    pub k: usize,
    /// Class size n⁺ of the whole graph.
    pub n_plus: usize,
    /// Unit n of the decomposition: |X^i_j| = p_i·n.
    pub unit: usize,
    pub weights: Vec<usize>,
    pub x_blocks: Vec<Vec<Vec<usize>>>,
    pub blocks: Vec<Vec<Vec<usize>>>,
    pub row_of: Vec<usize>,
    pub good: Vec<bool>,
    pub bad: Vec<BadVertex>,
    pub pair_complete: Vec<bool>,
    /// The halves T^i_j found in X^i_j for pair-complete rows.
    pub t_sets: Vec<Option<Vec<Vec<usize>>>>,
    /// Membership in S^i for vertices of pair-complete rows.
    pub in_s: Vec<bool>,
    pub moves: Vec<VertexMove>,
}

fn at_most_fraction(count: usize, f: Rational, whole: usize) -> bool {
    // count ≤ (1 − f)·whole
    let (num, den) = (*f.numer(), *f.denom());
    (count as i64) * den <= (den - num) * whole as i64
}

impl BlockAssignment {
    pub fn s(&self) -> usize {
        self.weights.len()
    }

    pub fn class_of(&self, g: &MultipartiteGraph, v: usize) -> usize {
        g.class_of(v)
    }

    /// X^i_j is bad with respect to v when v misses more than n/2 of it.
    pub fn is_bad_block(&self, g: &MultipartiteGraph, v: usize, i: usize, j: usize) -> bool {
        let block = &self.x_blocks[i][j];
        let hits = g.degree_into_slice(v, block);
        2 * hits + self.unit < 2 * self.weights[i] * self.unit
    }

    /// The row holding the only weight-2 pair-complete row when every other
    /// row has weight 1.
    pub fn extremal_row(&self) -> Option<usize> {
        let heavy: Vec<usize> = (0..self.s()).filter(|&i| self.weights[i] >= 2).collect();
        match heavy.as_slice() {
            [i] if self.pair_complete[*i] => Some(*i),
            _ => None,
        }
    }

    pub fn heavy_rows(&self) -> Vec<usize> {
        (0..self.s()).filter(|&i| self.weights[i] >= 2).collect()
    }

    /// |K ∩ W^i| for every row.
    pub fn row_counts(&self, clique: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.s()];
        for &v in clique {
            c[self.row_of[v]] += 1;
        }
        c
    }

    /// |K ∩ S^i| for every row (zero for rows that are not pair-complete).
    pub fn s_counts(&self, clique: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.s()];
        for &v in clique {
            if self.in_s[v] {
                c[self.row_of[v]] += 1;
            }
        }
        c
    }

    /// Current sizes |W^i_j ∖ used|.
    pub fn remaining_sizes(&self, used: &FixedBitSet) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|row| row.iter().map(|b| b.iter().filter(|&&v| !used.contains(v)).count()).collect()).collect()
    }

    pub fn bad_set(&self) -> Vec<usize> {
        self.bad.iter().map(|b| b.vertex).collect()
    }

    /// Re-derive every recorded reason from the graph.
    pub fn recheck_bad(&self, g: &MultipartiteGraph, f: Rational) -> bool {
        self.bad.iter().all(|b| {
            !b.reasons.is_empty()
                && b.reasons.iter().all(|reason| match *reason {
                    BadReason::Trimmed => !self.x_blocks.iter().flatten().any(|blk| blk.contains(&b.vertex)),
                    BadReason::Diagonal { row, class, neighbours } => {
                        neighbours == g.degree_into_slice(b.vertex, &self.x_blocks[row][class])
                            && at_most_fraction(neighbours, f, self.weights[row] * self.unit)
                    }
                    BadReason::Half { class, neighbours } => {
                        let Some(i) = self.x_row(b.vertex) else { return false };
                        let Some(t) = &self.t_sets[i] else { return false };
                        let own = t[g.class_of(b.vertex)].contains(&b.vertex);
                        let target: Vec<usize> = if own {
                            t[class].clone()
                        } else {
                            self.x_blocks[i][class].iter().copied().filter(|v| !t[class].contains(v)).collect()
                        };
                        neighbours == g.degree_into_slice(b.vertex, &target) && at_most_fraction(neighbours, f, self.unit)
                    }
                })
        })
    }

    /// Row of v in the fixed decomposition X, if any.
    pub fn x_row(&self, v: usize) -> Option<usize> {
        self.x_blocks.iter().position(|row| row.iter().any(|b| b.binary_search(&v).is_ok()))
    }
}

/// Blocks X^i_j that are bad with respect to v, as (row, class) cells.
pub fn bad_blocks(g: &MultipartiteGraph, a: &BlockAssignment, v: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..a.s() {
        for j in 0..a.r {
            if a.is_bad_block(g, v, i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Classify bad vertices against the decomposition `dec` of the trimmed
/// graph (ids are those of `g`), move each bad vertex to the row holding most
/// of its bad blocks, and form the halves S^i_j of pair-complete rows from
/// the given T^i_j.
pub fn classify_bad_vertices(
    g: &MultipartiteGraph,
    dec: &RowDecomposition,
    halves: &[Option<Vec<Vec<usize>>>],
    params: &Params,
) -> Result<BlockAssignment, PipelineError> {
    let r = g.r();
    let n_plus = g.uniform_class_size().ok_or_else(|| PipelineError::Precondition("classes differ in size".into()))?;
    let k: usize = dec.weights.iter().sum();
    let n = dec.unit;
    let s = dec.rows();
    if !dec.is_consistent() || dec.blocks.iter().any(|row| row.len() != r) {
        return Err(PipelineError::Precondition("decomposition blocks do not match their weights".into()));
    }
    if k * n > n_plus || n_plus - k * n >= k.max(1) {
        return Err(PipelineError::Precondition(format!("decomposition unit {n} does not fit class size {n_plus} with k = {k}")));
    }
    if halves.len() != s {
        return Err(PipelineError::Precondition("one halves entry per row expected".into()));
    }
    let f = params.bad_fraction;
    let total = g.vertex_count();
    let mut x_blocks = dec.blocks.clone();
    for row in &mut x_blocks {
        for b in row.iter_mut() {
            b.sort_unstable();
        }
    }
    let mut x_row = vec![None; total];
    for (i, row) in x_blocks.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            for &v in b {
                if g.class_of(v) != j || x_row[v].is_some() {
                    return Err(PipelineError::Precondition(format!("vertex {v} misplaced in the decomposition")));
                }
                x_row[v] = Some(i);
            }
        }
    }
    let mut t_sets: Vec<Option<Vec<Vec<usize>>>> = vec![None; s];
    for (i, h) in halves.iter().enumerate() {
        if let Some(h) = h {
            if dec.weights[i] != 2 || h.len() != r {
                return Err(PipelineError::Precondition(format!("row {i} cannot carry halves")));
            }
            let mut h = h.clone();
            for (j, set) in h.iter_mut().enumerate() {
                set.sort_unstable();
                if set.len() != n || set.iter().any(|v| x_blocks[i][j].binary_search(v).is_err()) {
                    return Err(PipelineError::Precondition(format!("half {j} of row {i} is not an n-subset of its block")));
                }
            }
            t_sets[i] = Some(h);
        }
    }
    let pair_complete: Vec<bool> = t_sets.iter().map(Option::is_some).collect();

    let mut bad: Vec<BadVertex> = Vec::new();
    for v in 0..total {
        let mut reasons = Vec::new();
        let cv = g.class_of(v);
        match x_row[v] {
            None => reasons.push(BadReason::Trimmed),
            Some(i) => {
                for i2 in (0..s).filter(|&i2| i2 != i) {
                    for j2 in (0..r).filter(|&j2| j2 != cv) {
                        let hits = g.degree_into_slice(v, &x_blocks[i2][j2]);
                        if at_most_fraction(hits, f, dec.weights[i2] * n) {
                            reasons.push(BadReason::Diagonal { row: i2, class: j2, neighbours: hits });
                        }
                    }
                }
                if let Some(t) = &t_sets[i] {
                    let own = t[cv].binary_search(&v).is_ok();
                    for j2 in (0..r).filter(|&j2| j2 != cv) {
                        let target: Vec<usize> = if own {
                            t[j2].clone()
                        } else {
                            x_blocks[i][j2].iter().copied().filter(|w| t[j2].binary_search(w).is_err()).collect()
                        };
                        let hits = g.degree_into_slice(v, &target);
                        if at_most_fraction(hits, f, n) {
                            reasons.push(BadReason::Half { class: j2, neighbours: hits });
                        }
                    }
                }
            }
        }
        if !reasons.is_empty() {
            bad.push(BadVertex { vertex: v, reasons });
        }
    }
    let mut good = vec![true; total];
    for b in &bad {
        good[b.vertex] = false;
    }

    let mut a = BlockAssignment {
        r,
        k,
        n_plus,
        unit: n,
        weights: dec.weights.clone(),
        x_blocks,
        blocks: vec![vec![Vec::new(); r]; s],
        row_of: vec![usize::MAX; total],
        good,
        bad,
        pair_complete,
        t_sets,
        in_s: vec![false; total],
        moves: Vec::new(),
    };

    for v in 0..total {
        let cv = g.class_of(v);
        let row = if a.good[v] {
            x_row[v].expect("good vertices lie in the decomposition")
        } else {
            let per_row: Vec<usize> = (0..s).map(|i| (0..r).filter(|&j| a.is_bad_block(g, v, i, j)).count()).collect();
            let best = *per_row.iter().max().expect("at least one row");
            // Keep the original row on ties, else the least row with most bad blocks.
            let chosen = match x_row[v] {
                Some(i) if per_row[i] == best => i,
                _ => per_row.iter().position(|&c| c == best).expect("maximum attained"),
            };
            if x_row[v] != Some(chosen) {
                a.moves.push(VertexMove { vertex: v, from: x_row[v], to: chosen, bad_blocks: best });
            }
            chosen
        };
        a.row_of[v] = row;
        a.blocks[row][cv].push(v);
    }

    for i in 0..s {
        let Some(t) = a.t_sets[i].clone() else { continue };
        for j in 0..r {
            for &v in &a.blocks[i][j].clone() {
                a.in_s[v] = if a.good[v] {
                    t[j].binary_search(&v).is_ok()
                } else {
                    (0..r).filter(|&j2| j2 != j).any(|j2| 2 * g.degree_into_slice(v, &t[j2]) >= n)
                };
            }
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Three rows of weight 1 over four classes of size 3·unit; row i holds
    /// offsets [i·unit, (i+1)·unit) of each class.
    pub(crate) fn planted_dec(g: &MultipartiteGraph, weights: &[usize], unit: usize) -> RowDecomposition {
        let mut blocks = Vec::new();
        let mut start = 0;
        for &p in weights {
            blocks.push((0..g.r()).map(|c| g.class_range(c).skip(start).take(p * unit).collect()).collect());
            start += p * unit;
        }
        RowDecomposition { unit, weights: weights.to_vec(), blocks }
    }

    #[test]
    fn complete_graph_has_no_bad_vertices() {
        let g = MultipartiteGraph::complete(&[6, 6, 6, 6]);
        let dec = planted_dec(&g, &[1, 1, 1], 2);
        let a = classify_bad_vertices(&g, &dec, &[None, None, None], &Params::default()).unwrap();
        assert!(a.bad.is_empty());
        assert_eq!(a.blocks, dec.blocks);
        assert!(a.moves.is_empty());
    }

    #[test]
    fn planted_bad_vertex_moves_to_its_worst_row() {
        let mut g = MultipartiteGraph::complete(&[60, 60, 60, 60]);
        let dec = planted_dec(&g, &[1, 1, 1], 20);
        // Vertex 0 (row 0, class 0) loses 15 of 20 neighbours in every row-1
        // block of the other classes; each of those keeps 19 of 20 in X^0_0.
        for j in 1..4 {
            for &w in dec.blocks[1][j].iter().take(15) {
                g.remove_edge(0, w);
            }
        }
        let a = classify_bad_vertices(&g, &dec, &[None, None, None], &Params::default()).unwrap();
        assert_eq!(a.bad_set(), vec![0]);
        assert_eq!(a.row_of[0], 1);
        assert_eq!(a.moves, vec![VertexMove { vertex: 0, from: Some(0), to: 1, bad_blocks: 4 }]);
        assert!(a.recheck_bad(&g, Params::default().bad_fraction));
        assert_eq!(bad_blocks(&g, &a, 0), vec![(0, 0), (1, 0), (1, 1), (1, 2), (1, 3), (2, 0)]);
    }

    #[test]
    fn trimmed_vertices_are_bad() {
        let g = MultipartiteGraph::complete(&[7, 7, 7, 7]);
        let dec = planted_dec(&g, &[1, 1, 1], 2);
        let a = classify_bad_vertices(&g, &dec, &[None, None, None], &Params::default()).unwrap();
        assert_eq!(a.bad.len(), 4);
        assert!(a.bad.iter().all(|b| b.reasons == vec![BadReason::Trimmed]));
        assert!(a.bad.iter().all(|b| g.vertex(b.vertex).offset == 6));
    }
}
