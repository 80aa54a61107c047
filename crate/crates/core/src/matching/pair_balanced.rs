use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::bipartite::{maximum_matching, BipartiteGraph};
use super::exact::{exact_balanced_clique_packing, ExactOutcome};
use super::hakimi::{is_multigraphic, realize_multigraph};
use super::MatchingError;
use crate::graph::{CliquePacking, MultipartiteGraph};
use crate::{format_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairBalancedOptions {
    /// Tolerance for half sizes and non-neighbour counts; ζ ≥ 1 disables
    /// the checks.
    #[serde(with = "crate::rational_serde")]
    pub zeta: Rational,
    /// Fail with a sizing error when no multiple of r − 1 lies in
    /// [(1 − 5ζ)n, (1 − 4ζ)n], instead of scanning smaller n′.
    pub strict_window: bool,
    /// Node budget for the exact fallbacks.
    pub budget: u64,
}

impl PairBalancedOptions {
    pub fn new(zeta: Rational) -> Self {
        PairBalancedOptions { zeta, strict_window: false, budget: 2_000_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairRoute {
    /// Correction matchings plus bipartite matchings on every index group.
    Groups,
    /// Correction matchings, then exact balanced search on X′ and Y′.
    ExactHalves,
    /// Exact balanced search on the whole graph.
    ExactWhole,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairBalanced {
    pub packing: CliquePacking,
    pub n_prime: Option<usize>,
    /// Whether n′ came from the window [(1 − 5ζ)n, (1 − 4ζ)n].
    pub in_window: bool,
    pub route: PairRoute,
    /// Class pairs realizing the excess sequence a_j = |X_j| − n′.
    pub correction_pairs: Vec<(usize, usize)>,
}

/// Balanced perfect matching of an r-partite graph with classes of size 2n
/// split into halves X_j (given) and Y_j, where X and Y are each nearly
/// complete r-partite and |X| is even.
///
/// Pick n′ divisible by r − 1, realize a_j = |X_j| − n′ as a multigraph on
/// the classes, and for each of its edges {i, j} take one X-edge of index
/// {i, j} and one Y-edge of every other index. What is left of X and Y splits
/// into groups, one per index, finished with bipartite matchings.
pub fn pair_complete_balanced_matching(
    g: &MultipartiteGraph,
    x_sets: &[Vec<usize>],
    opts: &PairBalancedOptions,
) -> Result<PairBalanced, MatchingError> {
    let r = g.r();
    let m = g.uniform_class_size().ok_or_else(|| MatchingError::Malformed("classes differ in size".into()))?;
    if r < 2 || m % 2 != 0 {
        return Err(MatchingError::Malformed(format!("need r ≥ 2 classes of even size, got r = {r}, size {m}")));
    }
    let n = m / 2;
    if m % (r - 1) != 0 {
        return Err(MatchingError::Divisibility(format!("r − 1 = {} does not divide 2n = {m}", r - 1)));
    }
    if x_sets.len() != r {
        return Err(MatchingError::Malformed(format!("expected {r} halves, got {}", x_sets.len())));
    }
    let mut in_x = vec![false; g.vertex_count()];
    let mut xs: Vec<Vec<usize>> = Vec::with_capacity(r);
    for (j, set) in x_sets.iter().enumerate() {
        let mut set = set.clone();
        set.sort_unstable();
        set.dedup();
        if set.iter().any(|&v| v >= g.vertex_count() || g.class_of(v) != j) {
            return Err(MatchingError::Malformed(format!("X_{j} leaves class {j}")));
        }
        for &v in &set {
            in_x[v] = true;
        }
        xs.push(set);
    }
    let ys: Vec<Vec<usize>> = (0..r).map(|j| g.class_range(j).filter(|&v| !in_x[v]).collect()).collect();
    let x_size: usize = xs.iter().map(Vec::len).sum();
    if x_size % 2 == 1 {
        return Err(MatchingError::ParityObstruction { x_size });
    }
    if opts.zeta < Rational::from_integer(1) {
        check_halves(g, &xs, &ys, n, opts.zeta)?;
    }

    let step = r - 1;
    let nr = Rational::from_integer(n as i64);
    let one = Rational::from_integer(1);
    let lo = ((one - opts.zeta * 5) * nr).ceil().to_integer().max(0);
    let hi = ((one - opts.zeta * 4) * nr).floor().to_integer();
    let min_x = xs.iter().map(Vec::len).min().unwrap_or(0);
    let window: Vec<usize> = (lo..=hi).rev().map(|v| v as usize).filter(|&v| v % step == 0 && v <= min_x).collect();
    if window.is_empty() && opts.strict_window {
        return Err(MatchingError::Sizing { class_size: m, zeta: format_rational(opts.zeta) });
    }
    let mut candidates: Vec<(usize, bool)> = window.iter().map(|&v| (v, true)).collect();
    if !opts.strict_window {
        candidates.extend((0..=min_x / step).rev().map(|t| t * step).filter(|v| !window.contains(v)).map(|v| (v, false)));
    }
    for (n_prime, in_window) in candidates {
        if let Some((packing, route, correction_pairs)) = construct(g, &xs, &ys, n_prime, opts.budget) {
            return Ok(PairBalanced { packing, n_prime: Some(n_prime), in_window, route, correction_pairs });
        }
    }
    let rep = exact_balanced_clique_packing(g, 2, true, opts.budget)?;
    match rep.outcome {
        ExactOutcome::Found(packing) => {
            Ok(PairBalanced { packing, n_prime: None, in_window: false, route: PairRoute::ExactWhole, correction_pairs: Vec::new() })
        }
        ExactOutcome::Absent => Err(MatchingError::SearchFailed { proven_absent: true, detail: "no balanced perfect matching".into() }),
        ExactOutcome::BudgetExhausted => {
            Err(MatchingError::SearchFailed { proven_absent: false, detail: "balanced perfect matching search".into() })
        }
    }
}

fn check_halves(g: &MultipartiteGraph, xs: &[Vec<usize>], ys: &[Vec<usize>], n: usize, zeta: Rational) -> Result<(), MatchingError> {
    let nr = Rational::from_integer(n as i64);
    let (lo, hi) = ((Rational::from_integer(1) - zeta) * nr, (Rational::from_integer(1) + zeta) * nr);
    let slack = zeta * nr;
    for j in 0..g.r() {
        for (name, half) in [("X", &xs[j]), ("Y", &ys[j])] {
            let size = Rational::from_integer(half.len() as i64);
            if size < lo || size > hi {
                return Err(MatchingError::Precondition(format!("|{name}_{j}| = {} outside (1 ± ζ)n", half.len())));
            }
        }
    }
    for (i, j) in (0..g.r()).cartesian_product(0..g.r()).filter(|(i, j)| i != j) {
        for (name, a, b) in [("X", &xs[i], &xs[j]), ("Y", &ys[i], &ys[j])] {
            for &v in a.iter() {
                let missing = b.len() - g.degree_into_slice(v, b);
                if Rational::from_integer(missing as i64) > slack {
                    return Err(MatchingError::Precondition(format!("vertex {v} misses {missing} vertices of {name}_{j}")));
                }
            }
        }
    }
    Ok(())
}

fn construct(
    g: &MultipartiteGraph,
    xs: &[Vec<usize>],
    ys: &[Vec<usize>],
    n_prime: usize,
    budget: u64,
) -> Option<(CliquePacking, PairRoute, Vec<(usize, usize)>)> {
    let r = g.r();
    let excess: Vec<usize> = xs.iter().map(|x| x.len() - n_prime).collect();
    if !is_multigraphic(&excess) {
        return None;
    }
    let pairs = realize_multigraph(&excess).ok()?;
    let mut used = vec![false; g.vertex_count()];
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    let indices: Vec<(usize, usize)> = (0..r).tuple_combinations().collect();
    for &(i, j) in &pairs {
        cliques.push(take_edge(g, &xs[i], &xs[j], &mut used)?);
        for &(a, b) in indices.iter().filter(|&&e| e != (i, j)) {
            cliques.push(take_edge(g, &ys[a], &ys[b], &mut used)?);
        }
    }
    let rest = |sets: &[Vec<usize>], used: &[bool]| -> Vec<Vec<usize>> {
        sets.iter().map(|s| s.iter().copied().filter(|&v| !used[v]).collect()).collect()
    };
    let x_rest = rest(xs, &used);
    let y_rest = rest(ys, &used);
    let y_len = y_rest[0].len();
    if x_rest.iter().any(|s| s.len() != n_prime) || y_rest.iter().any(|s| s.len() != y_len) || y_len % (r - 1) != 0 {
        return None;
    }
    let mut route = PairRoute::Groups;
    for half in [&x_rest, &y_rest] {
        match match_groups(g, half) {
            Some(mut es) => cliques.append(&mut es),
            None => {
                route = PairRoute::ExactHalves;
                let ids: Vec<usize> = half.concat();
                let (sub, map) = g.induced(&ids);
                let rep = exact_balanced_clique_packing(&sub, 2, true, budget).ok()?;
                let found = rep.packing()?.mapped(&map);
                cliques.extend(found.cliques);
            }
        }
    }
    Some((CliquePacking::new(cliques), route, pairs))
}

/// Least unused a ∈ A with an unused neighbour in B, joined to the least
/// such neighbour.
fn take_edge(g: &MultipartiteGraph, a: &[usize], b: &[usize], used: &mut [bool]) -> Option<Vec<usize>> {
    for &u in a.iter().filter(|&&u| !used[u]) {
        if let Some(&w) = b.iter().find(|&&w| !used[w] && g.has_edge(u, w)) {
            used[u] = true;
            used[w] = true;
            return Some(vec![u.min(w), u.max(w)]);
        }
    }
    None
}

/// Split each class's part into r − 1 equal chunks, one per index {i, j}
/// containing it, and match the two chunks of every index.
fn match_groups(g: &MultipartiteGraph, parts: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
    let r = parts.len();
    let size = parts[0].len() / (r - 1);
    let chunk = |c: usize, other: usize| -> &[usize] {
        let t = if other < c { other } else { other - 1 };
        &parts[c][t * size..(t + 1) * size]
    };
    let mut out = Vec::new();
    for (i, j) in (0..r).tuple_combinations() {
        let (left, right) = (chunk(i, j), chunk(j, i));
        let mut b = BipartiteGraph::new(size, size);
        for (a, &u) in left.iter().enumerate() {
            for (c, &w) in right.iter().enumerate() {
                if g.has_edge(u, w) {
                    b.add_edge(a, c);
                }
            }
        }
        for (a, partner) in maximum_matching(&b).into_iter().enumerate() {
            let c = partner?;
            out.push(vec![left[a], right[c]]);
        }
    }
    Some(out)
}
