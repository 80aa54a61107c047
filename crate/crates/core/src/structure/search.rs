//! Shared search over "one subset of fixed size per class" witnesses whose
//! validity is a conjunction of conditions on pairs of classes.

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::MultipartiteGraph;
use crate::Rational;

/// Edge counts between the chosen subset S and its complement T in two
/// classes a < b, with the part sizes.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct PairCounts {
    pub ss: i64,
    pub st: i64,
    pub ts: i64,
    pub tt: i64,
    pub sa: i64,
    pub ta: i64,
    pub sb: i64,
    pub tb: i64,
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Rule {
    /// d(S_a, T_b) ≥ 1 − d for every ordered pair.
    Split(Rational),
    /// d(S_a, S_b), d(T_a, T_b) ≥ 1 − d and d(S_a, T_b) ≤ d.
    PairComplete(Rational),
}

/// Shortfall of `e ≥ (1 − d)·size`, scaled by the denominator of d.
fn lower_deficit(d: Rational, e: i64, size: i64) -> i64 {
    let (num, den) = (*d.numer(), *d.denom());
    ((den - num) * size - den * e).max(0)
}

/// Excess of `e ≤ d·size`, scaled by the denominator of d.
fn upper_excess(d: Rational, e: i64, size: i64) -> i64 {
    let (num, den) = (*d.numer(), *d.denom());
    (den * e - num * size).max(0)
}

impl Rule {
    pub fn cost(&self, c: &PairCounts) -> i64 {
        match *self {
            Rule::Split(d) => lower_deficit(d, c.st, c.sa * c.tb) + lower_deficit(d, c.ts, c.ta * c.sb),
            Rule::PairComplete(d) => {
                lower_deficit(d, c.ss, c.sa * c.sb)
                    + lower_deficit(d, c.tt, c.ta * c.tb)
                    + upper_excess(d, c.st, c.sa * c.tb)
                    + upper_excess(d, c.ts, c.ta * c.sb)
            }
        }
    }
}

pub(crate) fn complement_in_class(g: &MultipartiteGraph, c: usize, s: &FixedBitSet) -> FixedBitSet {
    let mut t = g.class_set(c);
    t.difference_with(s);
    t
}

fn count(g: &MultipartiteGraph, a: &FixedBitSet, b: &FixedBitSet) -> i64 {
    a.ones().map(|v| g.degree_into(v, b) as i64).sum()
}

pub(crate) fn pair_counts(g: &MultipartiteGraph, sets: &[FixedBitSet], a: usize, b: usize) -> PairCounts {
    let (sa, sb) = (&sets[a], &sets[b]);
    let (ta, tb) = (complement_in_class(g, a, sa), complement_in_class(g, b, sb));
    PairCounts {
        ss: count(g, sa, sb),
        st: count(g, sa, &tb),
        ts: count(g, &ta, sb),
        tt: count(g, &ta, &tb),
        sa: sa.count_ones(..) as i64,
        ta: ta.count_ones(..) as i64,
        sb: sb.count_ones(..) as i64,
        tb: tb.count_ones(..) as i64,
    }
}

pub(crate) fn total_cost(g: &MultipartiteGraph, sets: &[FixedBitSet], rule: &Rule) -> i64 {
    (0..g.r()).tuple_combinations().map(|(a, b)| rule.cost(&pair_counts(g, sets, a, b))).sum()
}

/// Depth-first search over classes in order, each class trying its subsets
/// of `size` in lexicographic order. The first witness found is therefore the
/// lexicographically least. With `fix_first`, class 0 only tries subsets
/// containing its first vertex.
pub(crate) fn exact_search(g: &MultipartiteGraph, size: usize, fix_first: bool, rule: &Rule) -> Option<Vec<FixedBitSet>> {
    let mut chosen: Vec<FixedBitSet> = Vec::with_capacity(g.r());
    if descend(g, size, fix_first, rule, &mut chosen) {
        Some(chosen)
    } else {
        None
    }
}

fn descend(g: &MultipartiteGraph, size: usize, fix_first: bool, rule: &Rule, chosen: &mut Vec<FixedBitSet>) -> bool {
    let c = chosen.len();
    if c == g.r() {
        return true;
    }
    let range = g.class_range(c);
    let first = range.start;
    for combo in range.combinations(size) {
        if fix_first && c == 0 && combo[0] != first {
            break;
        }
        let mut s = FixedBitSet::with_capacity(g.vertex_count());
        s.extend(combo.iter().copied());
        chosen.push(s);
        let ok = (0..c).all(|a| rule.cost(&pair_counts(g, chosen, a, c)) == 0);
        if ok && descend(g, size, fix_first, rule, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Swap-based hill climbing. Each state keeps |N(v) ∩ S_c| for every vertex
/// and class so a swap is scored in O(r).
pub(crate) struct LocalSearch<'a> {
    g: &'a MultipartiteGraph,
    rule: Rule,
    in_s: Vec<bool>,
    deg_s: Vec<Vec<i64>>,
    deg_class: Vec<Vec<i64>>,
    counts: Vec<Vec<PairCounts>>,
}

impl<'a> LocalSearch<'a> {
    pub fn new(g: &'a MultipartiteGraph, rule: Rule, sets: &[FixedBitSet]) -> Self {
        let n = g.vertex_count();
        let r = g.r();
        let mut in_s = vec![false; n];
        for s in sets {
            for v in s.ones() {
                in_s[v] = true;
            }
        }
        let deg_s = (0..n).map(|v| (0..r).map(|c| g.degree_into(v, &sets[c]) as i64).collect()).collect();
        let deg_class = (0..n).map(|v| (0..r).map(|c| g.degree_in_class(v, c) as i64).collect()).collect();
        let mut counts = vec![vec![PairCounts::default(); r]; r];
        for (a, b) in (0..r).tuple_combinations() {
            counts[a][b] = pair_counts(g, sets, a, b);
        }
        LocalSearch { g, rule, in_s, deg_s, deg_class, counts }
    }

    pub fn cost(&self) -> i64 {
        let r = self.g.r();
        (0..r).tuple_combinations().map(|(a, b)| self.rule.cost(&self.counts[a][b])).sum()
    }

    /// Counts for every pair touching class c after swapping u (in S) with w.
    fn swapped(&self, c: usize, u: usize, w: usize) -> Vec<(usize, usize, PairCounts)> {
        let r = self.g.r();
        let mut out = Vec::with_capacity(r - 1);
        for b in (0..r).filter(|&b| b != c) {
            let (su, sw) = (self.deg_s[u][b], self.deg_s[w][b]);
            let (tu, tw) = (self.deg_class[u][b] - su, self.deg_class[w][b] - sw);
            let mut k = if c < b { self.counts[c][b] } else { self.counts[b][c] };
            if c < b {
                k.ss += sw - su;
                k.st += tw - tu;
                k.ts += su - sw;
                k.tt += tu - tw;
                out.push((c, b, k));
            } else {
                k.ss += sw - su;
                k.ts += tw - tu;
                k.st += su - sw;
                k.tt += tu - tw;
                out.push((b, c, k));
            }
        }
        out
    }

    fn apply(&mut self, c: usize, u: usize, w: usize) {
        for (a, b, k) in self.swapped(c, u, w) {
            self.counts[a][b] = k;
        }
        self.in_s[u] = false;
        self.in_s[w] = true;
        for x in self.g.neighbors(u).ones() {
            self.deg_s[x][c] -= 1;
        }
        for x in self.g.neighbors(w).ones() {
            self.deg_s[x][c] += 1;
        }
    }

    /// Climb until no improving swap remains or the cost reaches zero.
    pub fn climb<R: Rng>(&mut self, rng: &mut R, max_rounds: usize) -> i64 {
        let r = self.g.r();
        let mut cost = self.cost();
        for _ in 0..max_rounds {
            if cost == 0 {
                break;
            }
            let mut improved = false;
            let mut classes: Vec<usize> = (0..r).collect();
            classes.shuffle(rng);
            for c in classes {
                let range = self.g.class_range(c);
                let ins: Vec<usize> = range.clone().filter(|&v| self.in_s[v]).collect();
                let outs: Vec<usize> = range.filter(|&v| !self.in_s[v]).collect();
                let mut best: Option<(i64, usize, usize)> = None;
                for &u in &ins {
                    for &w in &outs {
                        let delta: i64 = self
                            .swapped(c, u, w)
                            .iter()
                            .map(|(a, b, k)| self.rule.cost(k) - self.rule.cost(&self.counts[*a][*b]))
                            .sum();
                        if delta < 0 && best.map_or(true, |(d, _, _)| delta < d) {
                            best = Some((delta, u, w));
                        }
                    }
                }
                if let Some((delta, u, w)) = best {
                    self.apply(c, u, w);
                    cost += delta;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        cost
    }

    pub fn sets(&self) -> Vec<FixedBitSet> {
        (0..self.g.r())
            .map(|c| {
                let mut s = FixedBitSet::with_capacity(self.g.vertex_count());
                s.extend(self.g.class_range(c).filter(|&v| self.in_s[v]));
                s
            })
            .collect()
    }
}

/// A uniformly random subset of `size` vertices in every class.
pub(crate) fn random_sets<R: Rng>(g: &MultipartiteGraph, size: usize, rng: &mut R) -> Vec<FixedBitSet> {
    (0..g.r())
        .map(|c| {
            let mut vs: Vec<usize> = g.class_range(c).collect();
            vs.shuffle(rng);
            let mut s = FixedBitSet::with_capacity(g.vertex_count());
            s.extend(vs.into_iter().take(size));
            s
        })
        .collect()
}

/// Seed built around vertex v: every class takes the non-neighbours of v
/// first (neighbours first when `non_adjacent` is false), then v's own class
/// is re-picked to fit the other classes under `rule`.
pub(crate) fn vertex_seed(g: &MultipartiteGraph, v: usize, size: usize, non_adjacent: bool, rule: &Rule) -> Vec<FixedBitSet> {
    let cv = g.class_of(v);
    let mut sets: Vec<FixedBitSet> = (0..g.r())
        .map(|c| {
            let mut vs: Vec<usize> = g.class_range(c).collect();
            vs.sort_by_key(|&w| (g.has_edge(v, w) == non_adjacent, w));
            let mut s = FixedBitSet::with_capacity(g.vertex_count());
            s.extend(vs.into_iter().take(size));
            s
        })
        .collect();
    // Re-pick v's own class greedily against the other classes.
    let mut scored: Vec<(i64, usize)> = g
        .class_range(cv)
        .map(|w| {
            let score: i64 = (0..g.r())
                .filter(|&c| c != cv)
                .map(|c| {
                    let into_s = g.degree_into(w, &sets[c]) as i64;
                    let into_t = g.degree_in_class(w, c) as i64 - into_s;
                    match rule {
                        Rule::Split(_) => into_t,
                        Rule::PairComplete(_) => into_s - into_t,
                    }
                })
                .sum();
            (-score, w)
        })
        .collect();
    scored.sort();
    let mut s = FixedBitSet::with_capacity(g.vertex_count());
    s.extend(scored.into_iter().take(size).map(|(_, w)| w));
    sets[cv] = s;
    sets
}
