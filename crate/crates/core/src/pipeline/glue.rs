use std::collections::BTreeMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::graph::{CliquePacking, MultipartiteGraph};
use crate::matching::{maximum_matching, BipartiteGraph};
use crate::structure::RowDecomposition;

/// Consecutive index sets A_1, ..., A_s partitioning {0, ..., k − 1} with
/// |A_i| = weights[i].
pub fn sigma_partition(weights: &[usize]) -> Vec<Vec<usize>> {
    let mut next = 0;
    weights
        .iter()
        .map(|&p| {
            let a = (next..next + p).collect();
            next += p;
            a
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaLog {
    /// Images σ(0), ..., σ(k − 1).
    pub sigma: Vec<usize>,
    /// Size N of every part of H_σ.
    pub n: usize,
    /// Least degree of a vertex of H_σ.
    pub min_degree: u64,
    /// N^{s−1}, the largest possible degree.
    pub possible: u64,
    pub matched: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GlueReport {
    pub packing: CliquePacking,
    pub logs: Vec<SigmaLog>,
    pub sets: Vec<Vec<usize>>,
    /// Some H_σ had no perfect matching, and the rows were matched as a whole
    /// instead: any tuple of row cliques with disjoint index sets forming a
    /// K_k is allowed.
    pub global: bool,
}

/// Complete between; cliques sharing a class never are.
fn compatible(g: &MultipartiteGraph, a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|&x| b.iter().all(|&y| g.has_edge(x, y)))
}

/// Match the row packings as a whole: one clique per row, the union a K_k.
fn glue_globally(g: &MultipartiteGraph, rows: &[CliquePacking], budget: &mut u64) -> Option<CliquePacking> {
    let parts: Vec<Vec<Vec<usize>>> = rows.iter().map(|p| p.cliques.clone()).collect();
    let m = perfect_matching(g, &parts, budget)?;
    let cliques = m
        .iter()
        .map(|t| t.iter().enumerate().flat_map(|(i, &x)| parts[i][x].iter().copied()).sorted().collect())
        .collect();
    Some(CliquePacking::new(cliques))
}

/// Degree of every vertex of H_σ (parts[i][x] is a clique of row i), counted
/// by extending partial tuples part by part.
fn degrees(g: &MultipartiteGraph, parts: &[Vec<Vec<usize>>]) -> Vec<Vec<u64>> {
    let s = parts.len();
    let mut deg: Vec<Vec<u64>> = parts.iter().map(|p| vec![0; p.len()]).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(s);
    fn walk(g: &MultipartiteGraph, parts: &[Vec<Vec<usize>>], chosen: &mut Vec<usize>, deg: &mut [Vec<u64>]) {
        let i = chosen.len();
        if i == parts.len() {
            for (part, &x) in chosen.iter().enumerate() {
                deg[part][x] += 1;
            }
            return;
        }
        for x in 0..parts[i].len() {
            if chosen.iter().enumerate().all(|(j, &y)| compatible(g, &parts[i][x], &parts[j][y])) {
                chosen.push(x);
                walk(g, parts, chosen, deg);
                chosen.pop();
            }
        }
    }
    walk(g, parts, &mut chosen, &mut deg);
    deg
}

/// Perfect matching of the s-partite s-graph H_σ: a tuple for every vertex of
/// part 0 using each vertex of the other parts once.
fn perfect_matching(g: &MultipartiteGraph, parts: &[Vec<Vec<usize>>], budget: &mut u64) -> Option<Vec<Vec<usize>>> {
    let s = parts.len();
    let n = parts[0].len();
    if s == 1 {
        return Some((0..n).map(|x| vec![x]).collect());
    }
    if s == 2 {
        let mut b = BipartiteGraph::new(n, parts[1].len());
        for x in 0..n {
            for y in 0..parts[1].len() {
                if compatible(g, &parts[0][x], &parts[1][y]) {
                    b.add_edge(x, y);
                }
            }
        }
        let m = maximum_matching(&b);
        return m.iter().enumerate().map(|(x, y)| y.map(|y| vec![x, y])).collect();
    }
    let mut used: Vec<Vec<bool>> = parts.iter().map(|p| vec![false; p.len()]).collect();
    let mut out: Vec<Vec<usize>> = Vec::with_capacity(n);
    fn tuple(
        g: &MultipartiteGraph,
        parts: &[Vec<Vec<usize>>],
        used: &mut [Vec<bool>],
        out: &mut Vec<Vec<usize>>,
        cur: &mut Vec<usize>,
        budget: &mut u64,
    ) -> bool {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let i = cur.len();
        if i == parts.len() {
            for (j, &y) in cur.iter().enumerate() {
                used[j][y] = true;
            }
            out.push(cur.clone());
            let done = out.len() == parts[0].len() || {
                let mut next = vec![out.len()];
                tuple(g, parts, used, out, &mut next, budget)
            };
            if !done {
                let t = out.pop().expect("tuple just pushed");
                for (j, &y) in t.iter().enumerate() {
                    used[j][y] = false;
                }
            }
            return done;
        }
        for y in 0..parts[i].len() {
            if !used[i][y] && cur.iter().enumerate().all(|(j, &z)| compatible(g, &parts[i][y], &parts[j][z])) {
                cur.push(y);
                if tuple(g, parts, used, out, cur, budget) {
                    return true;
                }
                cur.pop();
            }
        }
        false
    }
    if n == 0 {
        return Some(Vec::new());
    }
    let mut first = vec![0];
    tuple(g, parts, &mut used, &mut out, &mut first, budget).then_some(out)
}

/// Combine balanced perfect K_{p_i}-packings of the rows into a perfect
/// K_k-packing: for every injective σ: {0..k−1} → classes, row i hands N of
/// its cliques with index set σ(A_i) to H_σ, whose hyperedges are the tuples
/// forming a K_k; a perfect matching of each H_σ gives the cliques.
pub fn glue_rows(
    g: &MultipartiteGraph,
    dec: &RowDecomposition,
    rows: &[CliquePacking],
    budget: u64,
) -> Result<GlueReport, PipelineError> {
    let r = g.r();
    let k: usize = dec.weights.iter().sum();
    let s = dec.rows();
    if rows.len() != s {
        return Err(PipelineError::Precondition(format!("{} row packings for {s} rows", rows.len())));
    }
    let sets = sigma_partition(&dec.weights);
    let n_prime = dec.unit;
    let sigmas: Vec<Vec<usize>> = (0..r).permutations(k).collect();
    let big_n = if sigmas.is_empty() { 0 } else { r * n_prime / sigmas.len() };
    if big_n * sigmas.len() != r * n_prime {
        return Err(PipelineError::Precondition(format!("r·n′ = {} is not a multiple of {} maps", r * n_prime, sigmas.len())));
    }
    // Pools of row cliques by index set.
    let mut pools: Vec<BTreeMap<Vec<usize>, std::vec::IntoIter<Vec<usize>>>> = Vec::with_capacity(s);
    for (i, pk) in rows.iter().enumerate() {
        let verts: Vec<usize> = dec.row_vertices(i).into_iter().sorted().collect();
        let violations = pk.violations(g, dec.weights[i], false);
        let covered: Vec<usize> = pk.vertices().into_iter().sorted().collect();
        if !violations.is_empty() || covered != verts {
            return Err(PipelineError::Precondition(format!("row {i} packing is not a perfect K_{} packing of the row", dec.weights[i])));
        }
        let mut by: BTreeMap<Vec<usize>, Vec<Vec<usize>>> = BTreeMap::new();
        for c in &pk.cliques {
            let mut c = c.clone();
            c.sort_unstable();
            by.entry(c.iter().map(|&v| g.class_of(v)).collect()).or_default().push(c);
        }
        let want = r * n_prime / num_integer::binomial(r, dec.weights[i]);
        if by.values().any(|v| v.len() != want) || by.len() != num_integer::binomial(r, dec.weights[i]) {
            return Err(PipelineError::Precondition(format!("row {i} packing is not balanced")));
        }
        pools.push(by.into_iter().map(|(key, mut v)| {
            v.sort();
            (key, v.into_iter())
        }).collect());
    }
    let mut cliques = Vec::with_capacity(r * n_prime);
    let mut logs = Vec::with_capacity(sigmas.len());
    let mut budget = budget;
    for sigma in sigmas {
        let parts: Vec<Vec<Vec<usize>>> = (0..s)
            .map(|i| {
                let key: Vec<usize> = sets[i].iter().map(|&x| sigma[x]).sorted().collect();
                pools[i].get_mut(&key).expect("balanced row has every index set").by_ref().take(big_n).collect()
            })
            .collect();
        let deg = degrees(g, &parts);
        let min_degree = deg.iter().flatten().copied().min().unwrap_or(0);
        let possible = (big_n as u64).pow(s as u32 - 1);
        let m = perfect_matching(g, &parts, &mut budget);
        logs.push(SigmaLog { sigma: sigma.clone(), n: big_n, min_degree, possible, matched: m.is_some() });
        let Some(m) = m else {
            if let Some(packing) = glue_globally(g, rows, &mut budget) {
                return Ok(GlueReport { packing, logs, sets, global: true });
            }
            return Err(PipelineError::Glue {
                sigma,
                min_degree,
                possible,
                detail: if budget == 0 { "search budget exhausted".into() } else { "H_σ has no perfect matching".into() },
            });
        };
        for t in m {
            let mut c: Vec<usize> = t.iter().enumerate().flat_map(|(i, &x)| parts[i][x].iter().copied()).collect();
            c.sort_unstable();
            cliques.push(c);
        }
    }
    Ok(GlueReport { packing: CliquePacking::new(cliques), logs, sets, global: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_is_consecutive() {
        assert_eq!(sigma_partition(&[2, 1]), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn complete_rows_glue() {
        // r = 3, k = 3, rows of weights 2 and 1 with n′ = 2.
        let g = MultipartiteGraph::complete(&[6, 6, 6]);
        let blocks: Vec<Vec<Vec<usize>>> = vec![
            (0..3).map(|j| g.class_range(j).take(4).collect()).collect(),
            (0..3).map(|j| g.class_range(j).skip(4).collect()).collect(),
        ];
        let dec = RowDecomposition { unit: 2, weights: vec![2, 1], blocks };
        let b = &dec.blocks[0];
        let row0 = CliquePacking::new(vec![
            vec![b[0][0], b[1][0]],
            vec![b[0][1], b[1][1]],
            vec![b[0][2], b[2][0]],
            vec![b[0][3], b[2][1]],
            vec![b[1][2], b[2][2]],
            vec![b[1][3], b[2][3]],
        ]);
        let row1 = CliquePacking::new(dec.row_vertices(1).into_iter().map(|v| vec![v]).collect());
        let rep = glue_rows(&g, &dec, &[row0, row1], 10_000).unwrap();
        assert!(rep.packing.is_perfect_packing(&g, 3));
        assert_eq!(rep.logs.len(), 6);
        assert!(rep.logs.iter().all(|l| l.n == 1 && l.min_degree == 1 && l.possible == 1));
    }
}
