use std::collections::{BTreeMap, BTreeSet, HashMap};

use itertools::Itertools;
use num_integer::binomial;
use serde::{Deserialize, Serialize};

use super::MatchingError;
use crate::graph::{clique_index, is_clique, CliquePacking, MultipartiteGraph};

/// Two disjoint (p−1)-cliques K (index S ∪ {b}) and K′ (index S ∪ {b′}) with
/// apexes v ∈ V_a and v′ ∈ V_a′. Unflipped it contributes K + v and K′ + v′;
/// flipped, K + v′ and K′ + v.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub k: Vec<usize>,
    pub k_prime: Vec<usize>,
    pub v: usize,
    pub v_prime: usize,
    pub flipped: bool,
    /// Only the unflipped cliques are guaranteed; never flipped.
    pub fake: bool,
}

fn sorted(mut c: Vec<usize>) -> Vec<usize> {
    c.sort_unstable();
    c
}

impl Configuration {
    /// A genuine configuration; both states must be cliques.
    pub fn new(g: &MultipartiteGraph, k: Vec<usize>, k_prime: Vec<usize>, v: usize, v_prime: usize) -> Result<Self, MatchingError> {
        let c = Configuration { k: sorted(k), k_prime: sorted(k_prime), v, v_prime, flipped: false, fake: false };
        c.check_shape(g)?;
        if !c.flipped_cliques().iter().all(|q| is_clique(g, q)) {
            return Err(MatchingError::Malformed("flipped state is not a pair of cliques".into()));
        }
        Ok(c)
    }

    /// A fake configuration (p = 2 with a ≠ 0): a pair of edges that is never
    /// flipped.
    pub fn fake(g: &MultipartiteGraph, k: Vec<usize>, k_prime: Vec<usize>, v: usize, v_prime: usize) -> Result<Self, MatchingError> {
        let c = Configuration { k: sorted(k), k_prime: sorted(k_prime), v, v_prime, flipped: false, fake: true };
        c.check_shape(g)?;
        if c.k.len() != 1 || g.class_of(v) == 0 {
            return Err(MatchingError::Malformed("fake configurations need p = 2 and a ≠ 0".into()));
        }
        Ok(c)
    }

    fn check_shape(&self, g: &MultipartiteGraph) -> Result<(), MatchingError> {
        let all: Vec<usize> = self.k.iter().chain(&self.k_prime).copied().chain([self.v, self.v_prime]).collect();
        if all.iter().any(|&x| x >= g.vertex_count()) || all.iter().unique().count() != all.len() || self.k.len() != self.k_prime.len() {
            return Err(MatchingError::Malformed("configuration vertices must be distinct".into()));
        }
        let (s, t) = self.pattern(g);
        let ks = clique_index(g, &self.k);
        let ks2 = clique_index(g, &self.k_prime);
        let mut base: Vec<usize> = s.iter().copied().chain(t).collect();
        base.sort_unstable();
        if s.len() + 1 != self.k.len() || base.windows(2).any(|w| w[0] == w[1]) || ks.len() != self.k.len() || ks2.len() != self.k.len() {
            return Err(MatchingError::Malformed(format!("configuration does not have an (S,T) pattern: {s:?} {t:?}")));
        }
        if !self.unflipped_cliques().iter().all(|q| is_clique(g, q)) {
            return Err(MatchingError::Malformed("unflipped state is not a pair of cliques".into()));
        }
        Ok(())
    }

    /// (S, T = (a, a′, b, b′)).
    pub fn pattern(&self, g: &MultipartiteGraph) -> (Vec<usize>, [usize; 4]) {
        let ki: BTreeSet<usize> = self.k.iter().map(|&x| g.class_of(x)).collect();
        let kpi: BTreeSet<usize> = self.k_prime.iter().map(|&x| g.class_of(x)).collect();
        let s: Vec<usize> = ki.intersection(&kpi).copied().collect();
        let b = ki.difference(&kpi).next().copied().unwrap_or(usize::MAX);
        let b2 = kpi.difference(&ki).next().copied().unwrap_or(usize::MAX);
        (s, [g.class_of(self.v), g.class_of(self.v_prime), b, b2])
    }

    pub fn unflipped_cliques(&self) -> [Vec<usize>; 2] {
        [sorted([self.k.clone(), vec![self.v]].concat()), sorted([self.k_prime.clone(), vec![self.v_prime]].concat())]
    }

    pub fn flipped_cliques(&self) -> [Vec<usize>; 2] {
        [sorted([self.k.clone(), vec![self.v_prime]].concat()), sorted([self.k_prime.clone(), vec![self.v]].concat())]
    }

    pub fn current_cliques(&self) -> [Vec<usize>; 2] {
        if self.flipped {
            self.flipped_cliques()
        } else {
            self.unflipped_cliques()
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.k.iter().chain(&self.k_prime).copied().chain([self.v, self.v_prime])
    }
}

/// Index sets [p−1] ∪ {i} (i ≥ p+2) and [p+1] ∖ {i}, shifted to 0-based.
pub fn terminal_family(r: usize, p: usize) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    if p == 0 || p + 1 > r {
        return out;
    }
    for i in (p + 1)..r {
        out.insert((0..p - 1).chain([i]).collect());
    }
    for i in 0..=p {
        out.insert((0..=p).filter(|&x| x != i).collect());
    }
    out
}

/// All p-subsets of the classes: the non-terminal ones by decreasing sum
/// (ties lexicographic), then the terminal family in the same order. Moving
/// an element of A to a smaller class always gives a later set.
pub fn balance_order(r: usize, p: usize) -> Vec<Vec<usize>> {
    let terminal = terminal_family(r, p);
    let key = |a: &Vec<usize>| (std::cmp::Reverse(a.iter().sum::<usize>()), a.clone());
    let (mut tail, mut head): (Vec<Vec<usize>>, Vec<Vec<usize>>) = (0..r).combinations(p).partition(|a| terminal.contains(a));
    head.sort_by_key(key);
    tail.sort_by_key(key);
    head.extend(tail);
    head
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipOutcome {
    pub packing: CliquePacking,
    pub configs: Vec<Configuration>,
    pub flips: usize,
}

/// How flipping a configuration affects index A, for one orientation.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Effect {
    Removes,
    Adds,
}

/// Whether this unflipped configuration, read in either orientation, is a
/// flip that removes (or adds) one clique of index A while only touching
/// index sets after A.
fn effect_on(g: &MultipartiteGraph, c: &Configuration, a_set: &[usize], p: usize) -> Option<Effect> {
    let (s, [a, a2, b, b2]) = c.pattern(g);
    let with = |x: usize, y: usize| -> Vec<usize> { sorted(s.iter().copied().chain([x, y]).collect()) };
    for (a, a2, b, b2) in [(a, a2, b, b2), (a2, a, b2, b)] {
        if p == 2 && a != 0 {
            continue;
        }
        if a < a2 && b < b2 && with(a2, b2) == a_set {
            return Some(Effect::Removes);
        }
        if a < a2 && b2 < b && with(a2, b) == a_set {
            return Some(Effect::Adds);
        }
    }
    None
}

/// Patterns (S, T) that can correct an excess (or deficit) at index A.
fn admissible_patterns(a_set: &[usize], r: usize, p: usize, over: bool) -> Vec<(Vec<usize>, [usize; 4])> {
    let outside: Vec<usize> = (0..r).filter(|x| !a_set.contains(x)).collect();
    let mut out = Vec::new();
    for (x, y) in a_set.iter().copied().tuple_combinations().flat_map(|(x, y)| [(x, y), (y, x)]) {
        for (x2, y2) in outside.iter().copied().tuple_combinations().flat_map(|(x, y)| [(x, y), (y, x)]) {
            if x2 < x && y2 < y && (p != 2 || x2 == 0) {
                let s: Vec<usize> = a_set.iter().copied().filter(|&z| z != x && z != y).collect();
                out.push((s, if over { [x2, x, y2, y] } else { [x2, x, y, y2] }));
            }
        }
    }
    out
}

/// Flip configurations until every index set is used exactly
/// N = r·m / (p·C(r, p)) times. Index sets are fixed in [`balance_order`];
/// each non-terminal set is corrected with flips that only disturb later
/// sets, and the terminal family is then balanced by counting.
pub fn flip_balance(g: &MultipartiteGraph, m: &CliquePacking, configs: &[Configuration], p: usize) -> Result<FlipOutcome, MatchingError> {
    let r = g.r();
    let size = g.uniform_class_size().ok_or_else(|| MatchingError::Precondition("classes differ in size".into()))?;
    if p == 0 || p > r || (r * size) % (p * binomial(r, p)) != 0 {
        return Err(MatchingError::Precondition(format!("N = r·m/(p·C(r,p)) is not an integer for r={r}, m={size}, p={p}")));
    }
    let target = (r * size) / (p * binomial(r, p));
    if !m.is_perfect_packing(g, p) {
        return Err(MatchingError::Precondition("input is not a perfect packing".into()));
    }
    let mut counts: BTreeMap<Vec<usize>, usize> = (0..r).combinations(p).map(|a| (a, 0)).collect();
    for (a, c) in m.index_counts(g) {
        counts.insert(a, c);
    }
    let unbalanced = |counts: &BTreeMap<Vec<usize>, usize>| counts.iter().find(|(_, &c)| c != target).map(|(a, &c)| format!("index {a:?} used {c} times, expected {target}"));
    if p + 1 >= r {
        // Every perfect packing is balanced here.
        return match unbalanced(&counts) {
            None => Ok(FlipOutcome { packing: m.clone(), configs: configs.to_vec(), flips: 0 }),
            Some(msg) => Err(MatchingError::Unbalanced(msg)),
        };
    }

    let mut cliques: Vec<Vec<usize>> = m.cliques.iter().cloned().map(sorted).collect();
    let mut position: HashMap<Vec<usize>, usize> = cliques.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    let mut seen = vec![false; g.vertex_count()];
    for c in configs {
        for x in c.vertices() {
            if std::mem::replace(&mut seen[x], true) {
                return Err(MatchingError::Precondition(format!("configurations share vertex {x}")));
            }
        }
        if c.current_cliques().iter().any(|q| !position.contains_key(q)) {
            return Err(MatchingError::Precondition("configuration is not embedded in the packing".into()));
        }
    }

    let mut pool = configs.to_vec();
    let mut flips = 0;
    let terminal = terminal_family(r, p);
    for a_set in balance_order(r, p).into_iter().filter(|a| !terminal.contains(a)) {
        let cur = counts[&a_set];
        if cur == target {
            continue;
        }
        let want = if cur > target { Effect::Removes } else { Effect::Adds };
        let needed = cur.abs_diff(target);
        let usable: Vec<usize> =
            (0..pool.len()).filter(|&i| !pool[i].flipped && effect_on(g, &pool[i], &a_set, p) == Some(want)).take(needed).collect();
        if usable.len() < needed {
            return Err(MatchingError::InsufficientConfigurations {
                patterns: admissible_patterns(&a_set, r, p, want == Effect::Removes),
                index: a_set,
                needed,
                found: usable.len(),
            });
        }
        for i in usable {
            let c = &mut pool[i];
            assert!(!c.fake, "fake configurations are never flipped");
            for (old, new) in c.unflipped_cliques().into_iter().zip(c.flipped_cliques()) {
                let at = position.remove(&old).expect("embedded clique");
                *counts.get_mut(&clique_index(g, &old)).expect("index") -= 1;
                *counts.get_mut(&clique_index(g, &new)).expect("index") += 1;
                cliques[at] = new.clone();
                position.insert(new, at);
            }
            c.flipped = true;
            flips += 1;
        }
        debug_assert_eq!(counts[&a_set], target);
    }
    if let Some(msg) = unbalanced(&counts) {
        return Err(MatchingError::Unbalanced(msg));
    }
    Ok(FlipOutcome { packing: CliquePacking::new(cliques), configs: pool, flips })
}

/// Greedy pool of vertex-disjoint genuine configurations embedded in m: for
/// every pattern (S, T) in turn, pairs of cliques of m with indices S ∪ {a, b}
/// and S ∪ {a′, b′} are scanned in order and claimed when the apexes see the
/// opposite (p−1)-clique. For p = 2 only patterns with a = 0 are used.
pub fn discover_configurations(g: &MultipartiteGraph, m: &CliquePacking, p: usize, per_pattern: usize) -> Vec<Configuration> {
    let r = g.r();
    let mut by_index: BTreeMap<Vec<usize>, Vec<Vec<usize>>> = BTreeMap::new();
    for c in &m.cliques {
        by_index.entry(clique_index(g, c)).or_default().push(sorted(c.clone()));
    }
    let mut claimed = vec![false; g.vertex_count()];
    let mut out = Vec::new();
    if p < 2 {
        return out;
    }
    for s in (0..r).combinations(p - 2) {
        let rest: Vec<usize> = (0..r).filter(|x| !s.contains(x)).collect();
        for t in rest.iter().copied().permutations(4) {
            let (a, a2, b, b2) = (t[0], t[1], t[2], t[3]);
            if p == 2 && a != 0 {
                continue;
            }
            let idx = |x: usize, y: usize| -> Vec<usize> { sorted(s.iter().copied().chain([x, y]).collect()) };
            let (Some(first), Some(second)) = (by_index.get(&idx(a, b)), by_index.get(&idx(a2, b2))) else { continue };
            let mut found = 0;
            'pairs: for c1 in first {
                if found == per_pattern {
                    break;
                }
                if c1.iter().any(|&x| claimed[x]) {
                    continue;
                }
                let v = *c1.iter().find(|&&x| g.class_of(x) == a).expect("class a in clique");
                let k: Vec<usize> = c1.iter().copied().filter(|&x| x != v).collect();
                for c2 in second {
                    if c2.iter().any(|&x| claimed[x]) {
                        continue;
                    }
                    let v2 = *c2.iter().find(|&&x| g.class_of(x) == a2).expect("class a' in clique");
                    let k2: Vec<usize> = c2.iter().copied().filter(|&x| x != v2).collect();
                    if k.iter().all(|&x| g.has_edge(x, v2)) && k2.iter().all(|&x| g.has_edge(x, v)) {
                        for &x in c1.iter().chain(c2) {
                            claimed[x] = true;
                        }
                        out.push(Configuration { k: k.clone(), k_prime: k2, v, v_prime: v2, flipped: false, fake: false });
                        found += 1;
                        continue 'pairs;
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_moves_down_to_later_sets() {
        for (r, p) in [(4, 2), (5, 2), (5, 3), (6, 3), (6, 4)] {
            let order = balance_order(r, p);
            let pos: HashMap<Vec<usize>, usize> = order.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
            for a in &order {
                for &x in a {
                    for y in (0..x).filter(|y| !a.contains(y)) {
                        let b = sorted(a.iter().copied().filter(|&z| z != x).chain([y]).collect());
                        assert!(pos[&b] > pos[a], "{a:?} -> {b:?}");
                    }
                }
            }
            let terminal = terminal_family(r, p);
            assert_eq!(terminal.len(), r);
            assert!(order[order.len() - r..].iter().all(|a| terminal.contains(a)));
        }
    }

    #[test]
    fn p_equals_r_is_a_check() {
        let g = MultipartiteGraph::complete(&[2, 2, 2]);
        let m = CliquePacking::new(vec![vec![0, 2, 4], vec![1, 3, 5]]);
        let out = flip_balance(&g, &m, &[], 3).unwrap();
        assert_eq!(out.flips, 0);
        assert_eq!(out.packing, m);
    }

    #[test]
    fn already_balanced_unchanged() {
        // r = 4, p = 2, classes of size 3: N = 1.
        let g = MultipartiteGraph::complete(&[3, 3, 3, 3]);
        let m = CliquePacking::new(vec![vec![0, 3], vec![1, 6], vec![2, 9], vec![4, 7], vec![5, 10], vec![8, 11]]);
        let out = flip_balance(&g, &m, &[], 2).unwrap();
        assert_eq!(out.flips, 0);
    }

    #[test]
    fn one_flip_fixes_a_four_cycle() {
        // Balanced means one edge per index. The 4-cycle 0-3-6-9 sits in its
        // flipped state (3-6 and 0-9), so {1,2} and {0,3} are over by one.
        let g = MultipartiteGraph::complete(&[3, 3, 3, 3]);
        let m = CliquePacking::new(vec![vec![3, 6], vec![0, 9], vec![1, 7], vec![4, 10], vec![2, 11], vec![5, 8]]);
        let c = Configuration::new(&g, vec![3], vec![9], 6, 0).unwrap();
        assert_eq!(c.pattern(&g), (vec![], [2, 0, 1, 3]));
        let out = flip_balance(&g, &m, &[c], 2).unwrap();
        assert_eq!(out.flips, 1);
        assert!(out.packing.is_perfect_packing(&g, 2));
        assert!(out.packing.index_counts(&g).values().all(|&x| x == 1));
        assert!(out.packing.cliques.contains(&vec![0, 3]) && out.packing.cliques.contains(&vec![6, 9]));
    }

    #[test]
    fn shortfall_names_the_index() {
        let g = MultipartiteGraph::complete(&[3, 3, 3, 3]);
        let m = CliquePacking::new(vec![vec![3, 6], vec![0, 9], vec![1, 7], vec![4, 10], vec![2, 11], vec![5, 8]]);
        match flip_balance(&g, &m, &[], 2) {
            Err(MatchingError::InsufficientConfigurations { index, needed, found, patterns }) => {
                assert_eq!((index, needed, found), (vec![2, 3], 1, 0));
                assert!(!patterns.is_empty());
            }
            other => panic!("expected shortfall, got {other:?}"),
        }
    }

    #[test]
    fn fake_configs_need_p2_and_a_nonzero() {
        let g = MultipartiteGraph::complete(&[3, 3, 3, 3]);
        assert!(Configuration::fake(&g, vec![6], vec![9], 0, 3).is_err());
        assert!(Configuration::fake(&g, vec![6], vec![9], 3, 0).is_ok());
    }
}
