use fixedbitset::FixedBitSet;
use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::search::{exact_search, random_sets, total_cost, vertex_seed, LocalSearch, Rule};
use super::DetectError;
use crate::graph::MultipartiteGraph;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectMode {
    Exact,
    Heuristic,
    /// Exact up to the class-size cap, heuristic above it.
    Auto,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DetectOptions {
    pub mode: DetectMode,
    pub exact_cap: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions { mode: DetectMode::Auto, exact_cap: 8, restarts: 24, seed: 0 }
    }
}

impl DetectOptions {
    pub fn exact() -> Self {
        DetectOptions { mode: DetectMode::Exact, ..Self::default() }
    }

    pub fn heuristic(seed: u64) -> Self {
        DetectOptions { mode: DetectMode::Heuristic, seed, ..Self::default() }
    }

    fn use_exact(&self, class_size: usize) -> Result<bool, DetectError> {
        match self.mode {
            DetectMode::Exact if class_size > self.exact_cap => {
                Err(DetectError::ExceedsCap { class_size, cap: self.exact_cap })
            }
            DetectMode::Exact => Ok(true),
            DetectMode::Heuristic => Ok(false),
            DetectMode::Auto => Ok(class_size <= self.exact_cap),
        }
    }
}

/// Outcome of a structure search. `Absent` is a proof (exact search);
/// `NotFound` only means the heuristic gave up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Detection<W> {
    Found(W),
    Absent,
    NotFound,
}

impl<W> Detection<W> {
    pub fn witness(&self) -> Option<&W> {
        match self {
            Detection::Found(w) => Some(w),
            _ => None,
        }
    }

    pub fn into_witness(self) -> Option<W> {
        match self {
            Detection::Found(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitWitness {
    /// |S_i| = p_prime · n.
    pub p_prime: usize,
    /// S_i as sorted vertex ids, one list per class.
    pub sets: Vec<Vec<usize>>,
    /// min over i ≠ i' of d(S_i, V_i' ∖ S_i').
    #[serde(with = "crate::rational_serde")]
    pub min_density: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCompleteWitness {
    /// Halves S_i of size n, one list per class.
    pub halves: Vec<Vec<usize>>,
    /// min of d(S_i, S_j) and d(T_i, T_j) over i ≠ j.
    #[serde(with = "crate::rational_serde")]
    pub min_inside: Rational,
    /// max of d(S_i, T_j) over i ≠ j.
    #[serde(with = "crate::rational_serde")]
    pub max_across: Rational,
}

fn to_lists(sets: &[FixedBitSet]) -> Vec<Vec<usize>> {
    sets.iter().map(|s| s.ones().collect()).collect()
}

fn class_complement(g: &MultipartiteGraph, c: usize, s: &[usize]) -> Vec<usize> {
    g.class_range(c).filter(|v| !s.contains(v)).collect()
}

/// min over ordered pairs i ≠ i' of d(S_i, V_i' ∖ S_i'), computed directly.
pub fn split_min_density(g: &MultipartiteGraph, sets: &[Vec<usize>]) -> Rational {
    let mut best = Rational::from_integer(1);
    for (a, b) in (0..g.r()).tuple_combinations() {
        for (x, y) in [(a, b), (b, a)] {
            let t = class_complement(g, y, &sets[y]);
            if let Ok(d) = g.density(&sets[x], &t) {
                best = best.min(d);
            }
        }
    }
    best
}

/// Check a split witness from scratch.
pub fn verify_split(g: &MultipartiteGraph, p: usize, d: Rational, w: &SplitWitness) -> bool {
    let Some(m) = g.uniform_class_size() else { return false };
    if p < 2 || m % p != 0 || w.p_prime == 0 || w.p_prime >= p || w.sets.len() != g.r() {
        return false;
    }
    let size = w.p_prime * (m / p);
    let shaped = w.sets.iter().enumerate().all(|(c, s)| {
        s.len() == size && s.iter().all_unique() && s.iter().all(|&v| v < g.vertex_count() && g.class_of(v) == c)
    });
    shaped && split_min_density(g, &w.sets) >= Rational::from_integer(1) - d
}

/// Check a pair-complete witness from scratch, returning (min_inside, max_across).
pub fn pair_complete_densities(g: &MultipartiteGraph, halves: &[Vec<usize>]) -> (Rational, Rational) {
    let mut inside = Rational::from_integer(1);
    let mut across = Rational::from_integer(0);
    for (a, b) in (0..g.r()).tuple_combinations() {
        let (ta, tb) = (class_complement(g, a, &halves[a]), class_complement(g, b, &halves[b]));
        for d in [g.density(&halves[a], &halves[b]), g.density(&ta, &tb)].into_iter().flatten() {
            inside = inside.min(d);
        }
        for d in [g.density(&halves[a], &tb), g.density(&ta, &halves[b])].into_iter().flatten() {
            across = across.max(d);
        }
    }
    (inside, across)
}

pub fn verify_pair_complete(g: &MultipartiteGraph, d: Rational, w: &PairCompleteWitness) -> bool {
    let Some(m) = g.uniform_class_size() else { return false };
    if m % 2 != 0 || w.halves.len() != g.r() {
        return false;
    }
    let shaped = w.halves.iter().enumerate().all(|(c, s)| {
        s.len() == m / 2 && s.iter().all_unique() && s.iter().all(|&v| v < g.vertex_count() && g.class_of(v) == c)
    });
    let (inside, across) = pair_complete_densities(g, &w.halves);
    shaped && inside >= Rational::from_integer(1) - d && across <= d
}

fn heuristic(g: &MultipartiteGraph, size: usize, rule: Rule, opts: &DetectOptions, non_adjacent: bool) -> Option<Vec<FixedBitSet>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let total = g.vertex_count();
    let step = (total / opts.restarts.max(1)).max(1);
    let rounds = 4 * g.class_size(0).max(4);
    for attempt in 0..opts.restarts.max(1) {
        let seed_sets = if attempt % 2 == 0 && total > 0 {
            vertex_seed(g, (attempt / 2 * step) % total, size, non_adjacent, &rule)
        } else {
            random_sets(g, size, &mut rng)
        };
        let mut ls = LocalSearch::new(g, rule, &seed_sets);
        if ls.climb(&mut rng, rounds) == 0 {
            let sets = ls.sets();
            debug_assert_eq!(total_cost(g, &sets, &rule), 0);
            return Some(sets);
        }
    }
    None
}

/// Is there p' ∈ [1, p−1] and S_i ⊆ V_i with |S_i| = p'n such that
/// d(S_i, V_i' ∖ S_i') ≥ 1 − d for all i ≠ i'? Classes must have size pn.
///
/// Complements of a witness are again a witness (with p − p'), so only
/// p' ≤ p/2 is searched. Exact search returns the lexicographically least
/// witness for the least such p'.
pub fn is_splittable(g: &MultipartiteGraph, p: usize, d: Rational, opts: &DetectOptions) -> Result<Detection<SplitWitness>, DetectError> {
    let m = g.uniform_class_size().ok_or(DetectError::UnequalClasses)?;
    if p == 0 || m % p != 0 {
        return Err(DetectError::Indivisible { class_size: m, p });
    }
    if p == 1 || g.r() < 2 {
        return Ok(Detection::Absent);
    }
    let n = m / p;
    let exact = opts.use_exact(m)?;
    let rule = Rule::Split(d);
    for p_prime in 1..=p / 2 {
        let size = p_prime * n;
        let found = if exact {
            exact_search(g, size, 2 * p_prime == p, &rule)
        } else {
            heuristic(g, size, rule, opts, true)
        };
        if let Some(sets) = found {
            let sets = to_lists(&sets);
            let min_density = split_min_density(g, &sets);
            return Ok(Detection::Found(SplitWitness { p_prime, sets, min_density }));
        }
    }
    Ok(if exact { Detection::Absent } else { Detection::NotFound })
}

/// Classes of size 2n: halves S_i of size n with dense S–S and T–T pairs and
/// sparse S–T pairs. Swapping every S with its T maps witnesses to witnesses,
/// so exact search fixes the first vertex of class 0 inside S.
pub fn is_pair_complete(g: &MultipartiteGraph, d: Rational, opts: &DetectOptions) -> Result<Detection<PairCompleteWitness>, DetectError> {
    let m = g.uniform_class_size().ok_or(DetectError::UnequalClasses)?;
    if m % 2 != 0 {
        return Err(DetectError::Indivisible { class_size: m, p: 2 });
    }
    if g.r() < 2 || m == 0 {
        return Ok(Detection::Absent);
    }
    let exact = opts.use_exact(m)?;
    let rule = Rule::PairComplete(d);
    let found = if exact { exact_search(g, m / 2, true, &rule) } else { heuristic(g, m / 2, rule, opts, false) };
    Ok(match found {
        Some(sets) => {
            let halves = to_lists(&sets);
            let (min_inside, max_across) = pair_complete_densities(g, &halves);
            Detection::Found(PairCompleteWitness { halves, min_inside, max_across })
        }
        None if exact => Detection::Absent,
        None => Detection::NotFound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::generate::divisibility_barrier;

    #[test]
    fn complete_graph_splits() {
        let g = MultipartiteGraph::complete(&[4, 4, 4]);
        let w = is_splittable(&g, 2, Rational::new(1, 10), &DetectOptions::exact()).unwrap();
        let w = w.witness().unwrap();
        assert_eq!(w.p_prime, 1);
        assert_eq!(w.sets[0], vec![0, 1]);
        assert!(verify_split(&g, 2, Rational::new(1, 10), w));
    }

    #[test]
    fn p_one_never_splits() {
        let g = MultipartiteGraph::complete(&[3, 3]);
        assert_eq!(is_splittable(&g, 1, Rational::new(1, 2), &DetectOptions::exact()).unwrap(), Detection::Absent);
    }

    #[test]
    fn two_halves_are_pair_complete() {
        let (g, _) = divisibility_barrier(3, 2, false).unwrap();
        let det = is_pair_complete(&g, Rational::new(1, 10), &DetectOptions::exact()).unwrap();
        let w = det.witness().unwrap();
        assert_eq!(w.max_across, Rational::from_integer(0));
        assert!(verify_pair_complete(&g, Rational::new(1, 10), w));
        let complete = MultipartiteGraph::complete(&[4, 4, 4]);
        assert_eq!(is_pair_complete(&complete, Rational::new(1, 10), &DetectOptions::exact()).unwrap(), Detection::Absent);
    }

    #[test]
    fn heuristic_finds_planted_halves() {
        let (g, _) = divisibility_barrier(4, 6, false).unwrap();
        let perm: Vec<Vec<usize>> = (0..4).map(|c| (0..12).map(|o| (o * 5 + c) % 12).collect()).collect();
        let h = g.permuted(&[1, 3, 0, 2], &perm);
        let det = is_pair_complete(&h, Rational::new(1, 20), &DetectOptions::heuristic(3)).unwrap();
        assert!(verify_pair_complete(&h, Rational::new(1, 20), det.witness().unwrap()));
    }

    #[test]
    fn exact_mode_respects_cap() {
        let g = MultipartiteGraph::complete(&[10, 10]);
        assert!(matches!(
            is_splittable(&g, 2, Rational::new(1, 4), &DetectOptions::exact()),
            Err(DetectError::ExceedsCap { .. })
        ));
    }
}
