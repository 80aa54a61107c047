use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::detect::{is_splittable, DetectOptions, Detection};
use super::DetectError;
use crate::graph::MultipartiteGraph;
use crate::Rational;

/// Rows X^1..X^s of a graph with classes of size k·n: row i meets every class
/// in a block of p_i·n vertices, and the weights p_i sum to k.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowDecomposition {
    pub unit: usize,
    pub weights: Vec<usize>,
    /// blocks[i][j]: sorted ids of X^i_j.
    pub blocks: Vec<Vec<Vec<usize>>>,
}

impl RowDecomposition {
    /// The single row holding everything.
    pub fn trivial(g: &MultipartiteGraph, k: usize, unit: usize) -> Self {
        RowDecomposition { unit, weights: vec![k], blocks: vec![(0..g.r()).map(|c| g.class_range(c).collect()).collect()] }
    }

    pub fn rows(&self) -> usize {
        self.weights.len()
    }

    pub fn row_vertices(&self, i: usize) -> Vec<usize> {
        self.blocks[i].concat()
    }

    /// Row index of every vertex appearing in a block.
    pub fn row_of(&self, vertex_count: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; vertex_count];
        for (i, row) in self.blocks.iter().enumerate() {
            for &v in row.iter().flatten() {
                out[v] = Some(i);
            }
        }
        out
    }

    /// Blocks have the sizes the weights promise.
    pub fn is_consistent(&self) -> bool {
        self.blocks.iter().zip(&self.weights).all(|(row, &p)| row.iter().all(|b| b.len() == p * self.unit))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitEvent {
    /// Number of rows when the split happened.
    pub rows_before: usize,
    pub row: usize,
    pub p_prime: usize,
    #[serde(with = "crate::rational_serde")]
    pub threshold: Rational,
    #[serde(with = "crate::rational_serde")]
    pub min_density: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub decomposition: RowDecomposition,
    pub events: Vec<SplitEvent>,
    /// min over rows i ≠ i' and classes j ≠ j' of d(X^i_j, X^i'_j'); 1 with one row.
    #[serde(with = "crate::rational_serde")]
    pub min_diagonal_density: Rational,
}

pub fn min_diagonal_density(g: &MultipartiteGraph, dec: &RowDecomposition) -> Rational {
    let mut best = Rational::from_integer(1);
    for (i, i2) in (0..dec.rows()).tuple_combinations() {
        for j in 0..g.r() {
            for j2 in (0..g.r()).filter(|&j2| j2 != j) {
                if let Ok(d) = g.density(&dec.blocks[i][j], &dec.blocks[i2][j2]) {
                    best = best.min(d);
                }
            }
        }
    }
    best
}

/// Start from one row and keep splitting: with s rows, the lowest-index row
/// that is d_s-splittable (thresholds[s − 1]) is split along its witness,
/// keeping S in place and appending the rest as a new row.
pub fn iterate_decomposition(
    g: &MultipartiteGraph,
    k: usize,
    thresholds: &[Rational],
    opts: &DetectOptions,
) -> Result<DecompositionReport, DetectError> {
    let m = g.uniform_class_size().ok_or(DetectError::UnequalClasses)?;
    if k == 0 || m % k != 0 {
        return Err(DetectError::Indivisible { class_size: m, p: k });
    }
    if thresholds.len() + 1 < k {
        return Err(DetectError::MissingThresholds { needed: k - 1, got: thresholds.len() });
    }
    let unit = m / k;
    let mut dec = RowDecomposition::trivial(g, k, unit);
    let mut events = Vec::new();
    'outer: while dec.rows() < k {
        let s = dec.rows();
        let d = thresholds[s - 1];
        for i in 0..s {
            if dec.weights[i] < 2 {
                continue;
            }
            let (sub, map) = g.induced(&dec.row_vertices(i));
            let row_opts = DetectOptions { seed: opts.seed.wrapping_add(s as u64 * 1_000 + i as u64), ..*opts };
            if let Detection::Found(w) = is_splittable(&sub, dec.weights[i], d, &row_opts)? {
                let keep: Vec<Vec<usize>> = w.sets.iter().map(|set| set.iter().map(|&v| map[v]).collect()).collect();
                let rest: Vec<Vec<usize>> = dec.blocks[i]
                    .iter()
                    .zip(&keep)
                    .map(|(block, kept)| block.iter().copied().filter(|v| !kept.contains(v)).collect())
                    .collect();
                let p = dec.weights[i];
                dec.weights[i] = w.p_prime;
                dec.blocks[i] = keep;
                dec.weights.push(p - w.p_prime);
                dec.blocks.push(rest);
                events.push(SplitEvent { rows_before: s, row: i, p_prime: w.p_prime, threshold: d, min_density: w.min_density });
                continue 'outer;
            }
        }
        break;
    }
    let min_diagonal_density = min_diagonal_density(g, &dec);
    Ok(DecompositionReport { decomposition: dec, events, min_diagonal_density })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thresholds() -> Vec<Rational> {
        vec![Rational::new(1, 100), Rational::new(1, 10), Rational::new(1, 4)]
    }

    #[test]
    fn complete_graph_splits_fully() {
        let g = MultipartiteGraph::complete(&[4, 4, 4]);
        let rep = iterate_decomposition(&g, 2, &thresholds(), &DetectOptions::exact()).unwrap();
        assert_eq!(rep.decomposition.weights, vec![1, 1]);
        let g = MultipartiteGraph::complete(&[3, 3, 3, 3]);
        let rep = iterate_decomposition(&g, 3, &thresholds(), &DetectOptions::exact()).unwrap();
        assert_eq!(rep.decomposition.weights, vec![1, 1, 1]);
        assert!(rep.decomposition.is_consistent());
        assert_eq!(rep.min_diagonal_density, Rational::from_integer(1));
    }
}
