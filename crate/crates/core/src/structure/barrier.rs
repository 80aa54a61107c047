//! Candidate barriers: splittable and pair-complete structure, space
//! barriers (too few cliques avoid a set S) and divisibility barriers
//! (incomplete robust lattices of a class refinement).

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::detect::{is_pair_complete, is_splittable, DetectOptions, PairCompleteWitness, SplitWitness};
use super::lattice::{incomplete_pairs, merge_to_minimal, robust_edge_lattice, IntegerLattice};
use super::DetectError;
use crate::graph::{cliques, MultipartiteGraph, PartitionLabeling};
use crate::Rational;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BarrierThresholds {
    /// Density slack for the splittable and pair-complete tests.
    #[serde(with = "crate::rational_serde")]
    pub d: Rational,
    /// A space candidate is reported when at most β·(all p-cliques) cliques
    /// meet S in more than j vertices.
    #[serde(with = "crate::rational_serde")]
    pub beta: Rational,
    /// Index vectors count toward the robust lattice from this many cliques.
    pub mu_count: usize,
    /// Smallest part allowed in a refinement.
    pub floor: usize,
    /// Largest number of candidate sets or refinements enumerated exactly.
    pub enumeration_cap: usize,
    /// Longest list of candidates kept per barrier kind.
    pub max_reports: usize,
}

impl BarrierThresholds {
    pub fn new(d: Rational, beta: Rational, floor: usize) -> Self {
        BarrierThresholds { d, beta, mu_count: 1, floor, enumeration_cap: 20_000, max_reports: 32 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceCandidate {
    pub j: usize,
    /// S ∩ V_i per class.
    pub sets: Vec<Vec<usize>>,
    pub violating: usize,
    pub total_cliques: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DivisibilityCandidate {
    /// Part of every vertex after the minimality merge.
    pub part_of: Vec<usize>,
    pub class_of_part: Vec<usize>,
    pub lattice: IntegerLattice,
    /// Same-class part pairs whose difference is missing from the lattice.
    pub missing: Vec<(usize, usize)>,
    /// Whether the index vector of the whole vertex set lies in the lattice.
    pub whole_in_lattice: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BarrierReport {
    pub splittable: Option<SplitWitness>,
    pub pair_complete: Option<PairCompleteWitness>,
    pub space: Vec<SpaceCandidate>,
    pub divisibility: Vec<DivisibilityCandidate>,
}

impl BarrierReport {
    pub fn flags_anything(&self) -> bool {
        self.splittable.is_some() || self.pair_complete.is_some() || !self.space.is_empty() || !self.divisibility.is_empty()
    }
}

fn mask_of(universe: usize, ids: &[usize]) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(universe);
    s.extend(ids.iter().copied());
    s
}

fn violations(clique_masks: &[FixedBitSet], s: &FixedBitSet, j: usize) -> usize {
    clique_masks.iter().filter(|c| c.intersection(s).count() > j).count()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn space_candidates(
    g: &MultipartiteGraph,
    p: usize,
    th: &BarrierThresholds,
    opts: &DetectOptions,
) -> Vec<SpaceCandidate> {
    let m = g.class_size(0);
    let n = m / p;
    let all = cliques(g, p);
    let total = all.len();
    let masks: Vec<FixedBitSet> = all.iter().map(|c| mask_of(g.vertex_count(), c)).collect();
    let allowed = (th.beta * Rational::from_integer(total as i64)).floor().to_integer() as usize;
    let mut out = Vec::new();
    for j in 1..p {
        let size = j * n;
        let space = binomial(m, size).saturating_pow(g.r() as u32);
        let mut found: Vec<SpaceCandidate> = Vec::new();
        if space <= th.enumeration_cap as u128 {
            let per_class: Vec<Vec<Vec<usize>>> =
                (0..g.r()).map(|c| g.class_range(c).combinations(size).collect()).collect();
            for choice in per_class.iter().map(|v| v.iter()).multi_cartesian_product() {
                let ids: Vec<usize> = choice.iter().flat_map(|s| s.iter().copied()).collect();
                let v = violations(&masks, &mask_of(g.vertex_count(), &ids), j);
                if v <= allowed {
                    found.push(SpaceCandidate { j, sets: choice.into_iter().cloned().collect(), violating: v, total_cliques: total });
                }
            }
        } else if let Some(c) = space_local_search(g, &masks, size, j, opts) {
            if c.1 <= allowed {
                found.push(SpaceCandidate { j, sets: c.0, violating: c.1, total_cliques: total });
            }
        }
        found.sort_by(|a, b| (a.violating, &a.sets).cmp(&(b.violating, &b.sets)));
        found.truncate(th.max_reports);
        out.extend(found);
    }
    out
}

/// Hill climbing on the number of violating cliques, from random sets and
/// from non-neighbourhoods of single vertices.
fn space_local_search(
    g: &MultipartiteGraph,
    masks: &[FixedBitSet],
    size: usize,
    j: usize,
    opts: &DetectOptions,
) -> Option<(Vec<Vec<usize>>, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let mut best: Option<(Vec<Vec<usize>>, usize)> = None;
    for attempt in 0..opts.restarts.max(1) {
        let mut sets: Vec<Vec<usize>> = (0..g.r())
            .map(|c| {
                let mut vs: Vec<usize> = g.class_range(c).collect();
                if attempt % 2 == 0 {
                    let v = rng.gen_range(0..g.vertex_count());
                    vs.sort_by_key(|&w| (g.has_edge(v, w), w));
                } else {
                    vs.shuffle(&mut rng);
                }
                vs.truncate(size);
                vs
            })
            .collect();
        let score = |sets: &Vec<Vec<usize>>| violations(masks, &mask_of(g.vertex_count(), &sets.concat()), j);
        let mut cur = score(&sets);
        let mut improved = true;
        while improved && cur > 0 {
            improved = false;
            for c in 0..g.r() {
                let outside: Vec<usize> = g.class_range(c).filter(|v| !sets[c].contains(v)).collect();
                for a in 0..sets[c].len() {
                    for &w in &outside {
                        let old = sets[c][a];
                        sets[c][a] = w;
                        let s = score(&sets);
                        if s < cur {
                            cur = s;
                            improved = true;
                            break;
                        }
                        sets[c][a] = old;
                    }
                }
            }
        }
        for s in &mut sets {
            s.sort_unstable();
        }
        if best.as_ref().map_or(true, |b| cur < b.1) {
            best = Some((sets, cur));
        }
        if cur == 0 {
            break;
        }
    }
    best
}

/// Per-class options: keep the class whole, or cut it in two parts of size
/// at least `floor` (the part holding the first vertex comes first).
fn class_refinements(g: &MultipartiteGraph, c: usize, floor: usize) -> Vec<Vec<usize>> {
    let range: Vec<usize> = g.class_range(c).collect();
    let m = range.len();
    let mut out = vec![vec![0; m]];
    for size in floor.max(1)..=m.saturating_sub(floor.max(1)) {
        for first in (1..m).combinations(size - 1) {
            let mut lab = vec![1; m];
            lab[0] = 0;
            for &o in &first {
                lab[o] = 0;
            }
            out.push(lab);
        }
    }
    out
}

fn refinement_labeling(g: &MultipartiteGraph, choice: &[&Vec<usize>]) -> (PartitionLabeling, Vec<usize>) {
    let mut part_of = vec![0; g.vertex_count()];
    let mut class_of_part = Vec::new();
    for (c, lab) in choice.iter().enumerate() {
        let base = class_of_part.len();
        let parts = lab.iter().max().map_or(0, |&x| x + 1);
        class_of_part.extend(std::iter::repeat(c).take(parts));
        for (o, v) in g.class_range(c).enumerate() {
            part_of[v] = base + lab[o];
        }
    }
    (PartitionLabeling::new(class_of_part.len(), part_of).expect("refinement labeling"), class_of_part)
}

/// Two-part refinements built from structure: pair-complete halves and the
/// neighbourhood of each vertex restricted to each other class.
fn structured_refinements(g: &MultipartiteGraph, pair: Option<&PairCompleteWitness>, floor: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let to_labels = |sets: &[Vec<usize>]| -> Vec<Vec<usize>> {
        (0..g.r())
            .map(|c| {
                let first = g.class_range(c).start;
                let inside = sets[c].contains(&first);
                g.class_range(c).map(|v| usize::from(sets[c].contains(&v) != inside)).collect()
            })
            .collect()
    };
    if let Some(w) = pair {
        out.push(to_labels(&w.halves));
    }
    for v in 0..g.vertex_count() {
        let sets: Vec<Vec<usize>> = (0..g.r()).map(|c| g.class_range(c).filter(|&w| g.has_edge(v, w)).collect()).collect();
        let ok = (0..g.r()).filter(|&c| c != g.class_of(v)).all(|c| {
            let a = sets[c].len();
            a >= floor.max(1) && g.class_size(c) - a >= floor.max(1)
        });
        if ok {
            let mut labels = to_labels(&sets);
            labels[g.class_of(v)] = vec![0; g.class_size(g.class_of(v))];
            out.push(labels);
        }
    }
    out
}

fn divisibility_candidates(
    g: &MultipartiteGraph,
    p: usize,
    th: &BarrierThresholds,
    pair: Option<&PairCompleteWitness>,
) -> Vec<DivisibilityCandidate> {
    let edges = cliques(g, p);
    let per_class: Vec<Vec<Vec<usize>>> = (0..g.r()).map(|c| class_refinements(g, c, th.floor)).collect();
    let space: u128 = per_class.iter().map(|v| v.len() as u128).product();
    let choices: Vec<Vec<Vec<usize>>> = if space <= th.enumeration_cap as u128 {
        per_class.iter().map(|v| v.iter()).multi_cartesian_product().map(|c| c.into_iter().cloned().collect()).collect()
    } else {
        structured_refinements(g, pair, th.floor)
    };
    let whole: Vec<usize> = (0..g.vertex_count()).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for choice in choices {
        if choice.iter().all(|lab| lab.iter().all(|&x| x == 0)) {
            continue;
        }
        let refs: Vec<&Vec<usize>> = choice.iter().collect();
        let (lab, classes) = refinement_labeling(g, &refs);
        let rl = robust_edge_lattice(&edges, &lab, th.mu_count);
        if incomplete_pairs(&rl.lattice, &classes).is_empty() {
            continue;
        }
        let (lab, classes, rl) = merge_to_minimal(&edges, &lab, &classes, th.mu_count);
        let missing = incomplete_pairs(&rl.lattice, &classes);
        if missing.is_empty() || !seen.insert(lab.parts().to_vec()) {
            continue;
        }
        let whole_in_lattice = rl.lattice.contains(&lab.index_vector(&whole));
        out.push(DivisibilityCandidate { part_of: lab.parts().to_vec(), class_of_part: classes, lattice: rl.lattice, missing, whole_in_lattice });
        if out.len() >= th.max_reports {
            break;
        }
    }
    out
}

/// Barrier candidates for K_p-packings of a graph whose classes have size
/// p·n (the splittable test needs p | class size; the pair-complete test
/// runs when p = 2).
pub fn diagnose_barriers(
    g: &MultipartiteGraph,
    p: usize,
    th: &BarrierThresholds,
    opts: &DetectOptions,
) -> Result<BarrierReport, DetectError> {
    let m = g.uniform_class_size().ok_or(DetectError::UnequalClasses)?;
    if p < 2 || m % p != 0 {
        return Err(DetectError::Indivisible { class_size: m, p });
    }
    let splittable = is_splittable(g, p, th.d, opts)?.into_witness();
    let pair_complete = if p == 2 { is_pair_complete(g, th.d, opts)?.into_witness() } else { None };
    let space = space_candidates(g, p, th, opts);
    let divisibility = divisibility_candidates(g, p, th, pair_complete.as_ref());
    Ok(BarrierReport { splittable, pair_complete, space, divisibility })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::generate::{divisibility_barrier, space_barrier};

    fn th(floor: usize) -> BarrierThresholds {
        BarrierThresholds::new(Rational::new(1, 4), Rational::new(1, 50), floor)
    }

    #[test]
    fn complete_graph_has_no_barriers() {
        let g = MultipartiteGraph::complete(&[4, 4, 4]);
        let rep = diagnose_barriers(&g, 2, &th(1), &DetectOptions::exact()).unwrap();
        assert!(rep.space.is_empty());
        assert!(rep.divisibility.is_empty());
    }

    #[test]
    fn planted_space_barrier_is_reported() {
        let (g, s) = space_barrier(3, 2, 1, 2).unwrap();
        let rep = diagnose_barriers(&g, 2, &th(1), &DetectOptions::exact()).unwrap();
        let planted: Vec<Vec<usize>> = (0..3).map(|c| s.iter().copied().filter(|&v| g.class_of(v) == c).collect()).collect();
        assert!(rep.space.iter().any(|c| c.sets == planted && c.violating == 0));
    }

    #[test]
    fn two_halves_give_incomplete_lattice() {
        let (g, _) = divisibility_barrier(3, 2, false).unwrap();
        let rep = diagnose_barriers(&g, 2, &th(2), &DetectOptions::exact()).unwrap();
        assert!(rep.pair_complete.is_some());
        assert!(!rep.divisibility.is_empty());
    }
}
