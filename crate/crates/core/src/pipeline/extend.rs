use fixedbitset::FixedBitSet;
use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::assignment::{bad_blocks, BlockAssignment};
use crate::graph::{is_clique, MultipartiteGraph};
use crate::matching::{find_transversal, Rectangle};

/// How a deleted clique is distributed over the rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tag {
    /// p_i vertices in every row, even S-intersection in pair-complete rows.
    Proper,
    /// One extra vertex in row `plus`, one missing in row `minus`.
    Shifted { plus: usize, minus: usize },
    /// Like `Proper`, but row `row` may have odd S-intersection.
    ProperOutside(usize),
}

impl Tag {
    /// Re-verify the tag from the row and half counts of `clique`.
    pub fn holds(&self, a: &BlockAssignment, clique: &[usize]) -> bool {
        let rows = a.row_counts(clique);
        let halves = a.s_counts(clique);
        let (plus, minus, free) = match *self {
            Tag::Proper => (None, None, None),
            Tag::Shifted { plus, minus } => (Some(plus), Some(minus), None),
            Tag::ProperOutside(l) => (None, None, Some(l)),
        };
        if plus.is_some() && plus == minus {
            return false;
        }
        (0..a.s()).all(|i| {
            let want = if Some(i) == plus {
                a.weights[i] + 1
            } else if Some(i) == minus {
                match a.weights[i].checked_sub(1) {
                    Some(w) => w,
                    None => return false,
                }
            } else {
                a.weights[i]
            };
            let parity_free = Some(i) == plus || Some(i) == minus || Some(i) == free || !a.pair_complete[i];
            rows[i] == want && (parity_free || halves[i] % 2 == 0)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendFailure {
    /// Number of vertices chosen before the search got stuck (deepest point
    /// reached), or `None` when the request itself was rejected.
    pub step: Option<usize>,
    pub row: Option<usize>,
    pub class: Option<usize>,
    pub reason: String,
}

impl ExtendFailure {
    fn rejected(reason: impl Into<String>) -> Self {
        ExtendFailure { step: None, row: None, class: None, reason: reason.into() }
    }
}

/// Which of the conditions (a)–(e) lets row i be extended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RowCondition {
    AllSeeded,
    EmptySeed,
    GoodBlock(usize),
    HoldsFirst,
    Short,
}

fn row_condition(
    g: &MultipartiteGraph,
    a: &BlockAssignment,
    seed: &[usize],
    i: usize,
    cols: &[usize],
) -> Option<RowCondition> {
    let seeded = |j: usize| seed.iter().any(|&v| a.row_of[v] == i && g.class_of(v) == j);
    if cols.iter().all(|&j| seeded(j)) {
        return Some(RowCondition::AllSeeded);
    }
    let p = a.weights[i];
    if cols.len() < p {
        return Some(RowCondition::Short);
    }
    if cols.len() > p {
        return None;
    }
    let Some(&v1) = seed.first() else { return Some(RowCondition::EmptySeed) };
    if a.row_of[v1] == i {
        return Some(RowCondition::HoldsFirst);
    }
    cols.iter().copied().find(|&j| !seeded(j) && !a.is_bad_block(g, v1, i, j)).map(RowCondition::GoodBlock)
}

/// Extend the clique `seed` (all but its first vertex good) to a clique
/// meeting exactly the blocks W^i_j with j ∈ columns[i], choosing good unused
/// vertices column by column, least id first, with backtracking limited to
/// `budget` nodes. Pair-complete rows get the half constraints: two new
/// vertices in a row untouched by the seed agree on S-membership, and a
/// single new vertex in a block good for the first seed vertex is in S
/// exactly when `parity[i]` is true (if given).
pub fn extend_clique(
    g: &MultipartiteGraph,
    a: &BlockAssignment,
    seed: &[usize],
    columns: &[Vec<usize>],
    parity: &[Option<bool>],
    forbidden: &FixedBitSet,
    budget: u64,
) -> Result<Vec<usize>, ExtendFailure> {
    let s = a.s();
    if columns.len() != s || parity.len() != s {
        return Err(ExtendFailure::rejected("one column set and parity target per row expected"));
    }
    let mut owner = vec![None; a.r];
    for (i, cols) in columns.iter().enumerate() {
        for &j in cols {
            if j >= a.r || owner[j].replace(i).is_some() {
                return Err(ExtendFailure::rejected(format!("column {j} used twice or out of range")));
            }
        }
    }
    if !is_clique(g, seed) {
        return Err(ExtendFailure::rejected("seed is not a clique"));
    }
    for (q, &v) in seed.iter().enumerate() {
        if q > 0 && !a.good[v] {
            return Err(ExtendFailure::rejected(format!("seed vertex {v} is bad")));
        }
        if owner[g.class_of(v)] != Some(a.row_of[v]) {
            return Err(ExtendFailure::rejected(format!("seed vertex {v} lies outside the requested blocks")));
        }
        if forbidden.contains(v) {
            return Err(ExtendFailure::rejected(format!("seed vertex {v} is forbidden")));
        }
    }
    let mut late = vec![false; a.r];
    for i in 0..s {
        match row_condition(g, a, seed, i, &columns[i]) {
            None => return Err(ExtendFailure { row: Some(i), ..ExtendFailure::rejected("no extension condition holds") }),
            Some(RowCondition::GoodBlock(j)) => late[j] = true,
            Some(_) => {}
        }
    }
    let seeded_col = |j: usize| seed.iter().any(|&v| g.class_of(v) == j);
    // Designated good blocks are filled last within their row.
    let order: Vec<usize> = (0..a.r)
        .filter(|&j| owner[j].is_some() && !seeded_col(j))
        .sorted_by_key(|&j| (late[j], j))
        .collect();
    let v1 = seed.first().copied();
    let row_untouched: Vec<bool> = (0..s).map(|i| seed.iter().all(|&v| a.row_of[v] != i)).collect();
    let single_target: Vec<Option<bool>> = (0..s)
        .map(|i| {
            let [j] = columns[i][..] else { return None };
            let applies = a.pair_complete[i] && !seeded_col(j) && v1.map_or(true, |v| !a.is_bad_block(g, v, i, j));
            if applies {
                parity[i]
            } else {
                None
            }
        })
        .collect();

    let mut search = Sweep { g, a, order: &order, owner: &owner, forbidden, row_untouched: &row_untouched, single_target: &single_target, columns, nodes: 0, budget, deepest: 0 };
    let mut chosen = seed.to_vec();
    if search.descend(0, &mut chosen) {
        chosen.sort_unstable();
        debug_assert!(is_clique(g, &chosen));
        return Ok(chosen);
    }
    let stuck = search.deepest.min(order.len().saturating_sub(1));
    let j = order.get(stuck).copied();
    Err(ExtendFailure {
        step: Some(search.deepest),
        row: j.and_then(|j| owner[j]),
        class: j,
        reason: if search.nodes >= budget { "extension budget exhausted".into() } else { "no admissible vertex".into() },
    })
}

struct Sweep<'a> {
    g: &'a MultipartiteGraph,
    a: &'a BlockAssignment,
    order: &'a [usize],
    owner: &'a [Option<usize>],
    forbidden: &'a FixedBitSet,
    row_untouched: &'a [bool],
    single_target: &'a [Option<bool>],
    columns: &'a [Vec<usize>],
    nodes: u64,
    budget: u64,
    deepest: usize,
}

impl Sweep<'_> {
    fn descend(&mut self, t: usize, chosen: &mut Vec<usize>) -> bool {
        self.deepest = self.deepest.max(t);
        if t == self.order.len() {
            return true;
        }
        let j = self.order[t];
        let i = self.owner[j].expect("ordered columns are owned");
        let same_half = if self.a.pair_complete[i] && self.columns[i].len() == 2 && self.row_untouched[i] {
            chosen.iter().find(|&&w| self.a.row_of[w] == i).map(|&w| self.a.in_s[w])
        } else {
            None
        };
        let want_half = same_half.or(self.single_target[i]);
        for &v in &self.a.blocks[i][j] {
            if self.nodes >= self.budget {
                return false;
            }
            if !self.a.good[v] || self.forbidden.contains(v) || want_half.is_some_and(|h| self.a.in_s[v] != h) {
                continue;
            }
            if !chosen.iter().all(|&w| self.g.has_edge(v, w)) {
                continue;
            }
            self.nodes += 1;
            chosen.push(v);
            if self.descend(t + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
}

/// All families (A_1, …, A_s) of pairwise disjoint column sets with
/// |A_i| = sizes[i], in lexicographic order.
pub fn families(r: usize, sizes: &[usize]) -> Vec<Vec<Vec<usize>>> {
    fn rec(r: usize, sizes: &[usize], used: &mut Vec<bool>, acc: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        let Some(&p) = sizes.get(acc.len()) else {
            out.push(acc.clone());
            return;
        };
        let free: Vec<usize> = (0..r).filter(|&j| !used[j]).collect();
        for combo in free.into_iter().combinations(p) {
            for &j in &combo {
                used[j] = true;
            }
            acc.push(combo.clone());
            rec(r, sizes, used, acc, out);
            acc.pop();
            for &j in &combo {
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    if sizes.iter().sum::<usize>() <= r {
        rec(r, sizes, &mut vec![false; r], &mut Vec::new(), &mut out);
    }
    out
}

/// Families with prescribed sizes where `pinned[i]` ⊆ A_i.
fn families_with(r: usize, sizes: &[usize], pinned: &[Vec<usize>]) -> Vec<Vec<Vec<usize>>> {
    families(r, sizes).into_iter().filter(|f| f.iter().zip(pinned).all(|(a, pin)| pin.iter().all(|j| a.contains(j)))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BuildingKind {
    /// A properly-distributed clique meeting W^i exactly in columns family[i].
    Proper { family: Vec<Vec<usize>> },
    /// A properly-distributed clique with the given index (any family).
    ProperIndex { index: Vec<usize> },
    /// An (plus, minus)-distributed clique inside the good vertices, seeded by
    /// a K_{p+1} in row `plus`; `s_count` fixes its S-intersection there.
    Shifted { plus: usize, minus: usize, s_count: Option<usize> },
    /// A properly-distributed clique through v.
    ThroughVertex(usize),
    /// A (row of u, minus)-distributed clique through the edge uv inside a
    /// weight-1 row, u good; `parity` fixes the S-intersection in `minus`.
    ThroughEdge { u: usize, v: usize, minus: usize, parity: Option<bool> },
    /// A clique through the edge uv of a pair-complete row, u good,
    /// properly distributed outside that row.
    OutsideRow { u: usize, v: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Built {
    pub clique: Vec<usize>,
    pub tag: Tag,
}

/// Options shared by every building-block request.
#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub extend_budget: u64,
    /// How many seeds (K_{p+1}'s or partner vertices) to try.
    pub seed_attempts: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { extend_budget: 20_000, seed_attempts: 64 }
    }
}

/// Rectangle of blocks bad with respect to v, without the given rows and
/// columns, and the maps from its cells back to rows and columns.
fn reduced_rectangle(
    g: &MultipartiteGraph,
    a: &BlockAssignment,
    v: usize,
    drop_rows: &[usize],
    drop_cols: &[usize],
) -> Option<(Rectangle, Vec<usize>, Vec<usize>)> {
    let rows: Vec<usize> = (0..a.s()).filter(|i| !drop_rows.contains(i)).collect();
    let cols: Vec<usize> = (0..a.r).filter(|j| !drop_cols.contains(j)).collect();
    let colored = bad_blocks(g, a, v)
        .into_iter()
        .filter_map(|(i, j)| Some((rows.iter().position(|&x| x == i)?, cols.iter().position(|&y| y == j)?)));
    let rect = Rectangle::new(rows.len(), cols.len(), colored).ok()?;
    Some((rect, rows, cols))
}

/// Pins from a transversal of the reduced rectangle, if one exists.
fn transversal_pins(
    g: &MultipartiteGraph,
    a: &BlockAssignment,
    v: usize,
    drop_rows: &[usize],
    drop_cols: &[usize],
) -> Option<Vec<Vec<usize>>> {
    let (rect, rows, cols) = reduced_rectangle(g, a, v, drop_rows, drop_cols)?;
    let cells = find_transversal(&rect)?;
    let mut pins = vec![Vec::new(); a.s()];
    for (x, y) in cells {
        pins[rows[x]].push(cols[y]);
    }
    Some(pins)
}

fn try_families(
    g: &MultipartiteGraph,
    a: &BlockAssignment,
    seed: &[usize],
    candidates: impl IntoIterator<Item = Vec<Vec<usize>>>,
    parity: &[Option<bool>],
    forbidden: &FixedBitSet,
    opts: &BuildOptions,
) -> Result<Vec<usize>, ExtendFailure> {
    let mut last = ExtendFailure::rejected("no candidate family");
    for fam in candidates {
        match extend_clique(g, a, seed, &fam, parity, forbidden, opts.extend_budget) {
            Ok(c) => return Ok(c),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Cliques of `size` among `pool` (sorted ids), in lexicographic order,
/// passed to `f` until it returns true; at most `limit` are visited.
fn for_each_clique(g: &MultipartiteGraph, pool: &[usize], size: usize, limit: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(g: &MultipartiteGraph, pool: &[usize], size: usize, from: usize, acc: &mut Vec<usize>, left: &mut usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if acc.len() == size {
            if *left == 0 {
                return false;
            }
            *left -= 1;
            return f(acc);
        }
        for x in from..pool.len() {
            if *left == 0 {
                return false;
            }
            let v = pool[x];
            if acc.iter().all(|&w| g.class_of(w) != g.class_of(v) && g.has_edge(v, w)) {
                acc.push(v);
                if rec(g, pool, size, x + 1, acc, left, f) {
                    return true;
                }
                acc.pop();
            }
        }
        false
    }
    let mut left = limit;
    rec(g, pool, size, 0, &mut Vec::new(), &mut left, f)
}

/// Find a clique of the requested kind avoiding `forbidden`.
pub fn building_block(
    g: &MultipartiteGraph,
    a: &BlockAssignment,
    kind: &BuildingKind,
    forbidden: &FixedBitSet,
    opts: &BuildOptions,
) -> Result<Built, ExtendFailure> {
    let s = a.s();
    let none = vec![None; s];
    match kind {
        BuildingKind::Proper { family } => {
            let clique = extend_clique(g, a, &[], family, &none, forbidden, opts.extend_budget)?;
            Ok(Built { clique, tag: Tag::Proper })
        }
        BuildingKind::ProperIndex { index } => {
            let fams = families(a.r, &a.weights).into_iter().filter(|f| f.concat().iter().sorted().eq(index.iter()));
            let clique = try_families(g, a, &[], fams, &none, forbidden, opts)?;
            Ok(Built { clique, tag: Tag::Proper })
        }
        &BuildingKind::Shifted { plus, minus, s_count } => {
            if plus == minus || plus >= s || minus >= s || a.weights[plus] < 2 {
                return Err(ExtendFailure::rejected("shifted cliques need distinct rows and weight ≥ 2 in the plus row"));
            }
            let p = a.weights[plus];
            let pool: Vec<usize> = a.blocks[plus]
                .iter()
                .flatten()
                .copied()
                .filter(|&v| a.good[v] && !forbidden.contains(v))
                .filter(|&v| match s_count {
                    Some(0) => !a.in_s[v],
                    Some(c) if c == p + 1 => a.in_s[v],
                    _ => true,
                })
                .sorted()
                .collect();
            let mut sizes = a.weights.clone();
            sizes[plus] = 0;
            sizes[minus] -= 1;
            let mut found = None;
            let mut last = ExtendFailure::rejected(format!("no good K_{} in row {plus}", p + 1));
            for_each_clique(g, &pool, p + 1, opts.seed_attempts, &mut |seed| {
                if s_count.is_some_and(|c| seed.iter().filter(|&&v| a.in_s[v]).count() != c) {
                    return false;
                }
                let seed_cols: Vec<usize> = seed.iter().map(|&v| g.class_of(v)).collect();
                let fams = families(a.r, &sizes).into_iter().filter_map(|mut f| {
                    if f.iter().flatten().any(|j| seed_cols.contains(j)) {
                        return None;
                    }
                    f[plus] = seed_cols.clone();
                    Some(f)
                });
                match try_families(g, a, seed, fams, &none, forbidden, opts) {
                    Ok(c) => {
                        found = Some(c);
                        true
                    }
                    Err(e) => {
                        last = e;
                        false
                    }
                }
            });
            found.map(|clique| Built { clique, tag: Tag::Shifted { plus, minus } }).ok_or(last)
        }
        &BuildingKind::ThroughVertex(v) => {
            if forbidden.contains(v) {
                return Err(ExtendFailure::rejected(format!("vertex {v} is forbidden")));
            }
            let l = a.row_of[v];
            let jv = g.class_of(v);
            if a.pair_complete[l] {
                let mut last = ExtendFailure::rejected(format!("no partner for {v} in its pair-complete row"));
                let partners = a.blocks[l]
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != jv)
                    .flat_map(|(_, b)| b.iter().copied())
                    .filter(|&u| a.good[u] && !forbidden.contains(u) && g.has_edge(u, v) && a.in_s[u] == a.in_s[v])
                    .sorted()
                    .take(opts.seed_attempts);
                for u in partners {
                    match building_block(g, a, &BuildingKind::OutsideRow { u, v }, forbidden, opts) {
                        Ok(b) if Tag::Proper.holds(a, &b.clique) => return Ok(Built { clique: b.clique, tag: Tag::Proper }),
                        Ok(_) => {}
                        Err(e) => last = e,
                    }
                }
                return Err(last);
            }
            let mut pinned = vec![Vec::new(); s];
            pinned[l].push(jv);
            let mut cands = Vec::new();
            if let Some(mut pins) = transversal_pins(g, a, v, &[l], &[jv]) {
                pins[l].push(jv);
                cands.extend(families_with(a.r, &a.weights, &pins));
            }
            for f in families_with(a.r, &a.weights, &pinned) {
                if !cands.contains(&f) {
                    cands.push(f);
                }
            }
            let clique = try_families(g, a, &[v], cands, &none, forbidden, opts)?;
            Ok(Built { clique, tag: Tag::Proper })
        }
        &BuildingKind::ThroughEdge { u, v, minus, parity } => {
            let i = a.row_of[u];
            if a.row_of[v] != i || a.weights[i] != 1 || minus == i || minus >= s || !a.good[u] || !g.has_edge(u, v) {
                return Err(ExtendFailure::rejected("edge must be inside a weight-1 row with a good end"));
            }
            if forbidden.contains(u) || forbidden.contains(v) {
                return Err(ExtendFailure::rejected("edge end is forbidden"));
            }
            let (ju, jv) = (g.class_of(u), g.class_of(v));
            let mut sizes = a.weights.clone();
            sizes[i] = 0;
            sizes[minus] -= 1;
            let drop_rows: Vec<usize> = if a.weights[minus] == 1 { vec![i, minus] } else { vec![i] };
            let mut targets = none.clone();
            targets[minus] = parity;
            let with_edge = |f: Vec<Vec<usize>>| -> Option<Vec<Vec<usize>>> {
                if f.iter().flatten().any(|&j| j == ju || j == jv) {
                    return None;
                }
                let mut f = f;
                f[i] = vec![ju.min(jv), ju.max(jv)];
                Some(f)
            };
            let mut cands: Vec<Vec<Vec<usize>>> = Vec::new();
            if let Some(pins) = transversal_pins(g, a, v, &drop_rows, &[ju, jv]) {
                cands.extend(families_with(a.r, &sizes, &pins).into_iter().filter_map(with_edge));
            }
            for f in families(a.r, &sizes).into_iter().filter_map(with_edge) {
                if !cands.contains(&f) {
                    cands.push(f);
                }
            }
            let clique = try_families(g, a, &[v, u], cands, &targets, forbidden, opts)?;
            Ok(Built { clique, tag: Tag::Shifted { plus: i, minus } })
        }
        &BuildingKind::OutsideRow { u, v } => {
            let i = a.row_of[u];
            if a.row_of[v] != i || !a.pair_complete[i] || !a.good[u] || !g.has_edge(u, v) {
                return Err(ExtendFailure::rejected("edge must be inside a pair-complete row with a good end"));
            }
            if forbidden.contains(u) || forbidden.contains(v) {
                return Err(ExtendFailure::rejected("edge end is forbidden"));
            }
            let (ju, jv) = (g.class_of(u), g.class_of(v));
            let mut sizes = a.weights.clone();
            sizes[i] = 0;
            let with_edge = |f: Vec<Vec<usize>>| -> Option<Vec<Vec<usize>>> {
                if f.iter().flatten().any(|&j| j == ju || j == jv) {
                    return None;
                }
                let mut f = f;
                f[i] = vec![ju.min(jv), ju.max(jv)];
                Some(f)
            };
            let mut cands: Vec<Vec<Vec<usize>>> = Vec::new();
            if let Some(pins) = transversal_pins(g, a, v, &[i], &[ju, jv]) {
                cands.extend(families_with(a.r, &sizes, &pins).into_iter().filter_map(with_edge));
            }
            for f in families(a.r, &sizes).into_iter().filter_map(with_edge) {
                if !cands.contains(&f) {
                    cands.push(f);
                }
            }
            let clique = try_families(g, a, &[v, u], cands, &none, forbidden, opts)?;
            Ok(Built { clique, tag: Tag::ProperOutside(i) })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::assignment::classify_bad_vertices;
    use crate::pipeline::Params;
    use crate::structure::RowDecomposition;

    fn rows_dec(g: &MultipartiteGraph, weights: &[usize], unit: usize) -> RowDecomposition {
        let mut blocks = Vec::new();
        let mut start = 0;
        for &p in weights {
            blocks.push((0..g.r()).map(|c| g.class_range(c).skip(start).take(p * unit).collect()).collect());
            start += p * unit;
        }
        RowDecomposition { unit, weights: weights.to_vec(), blocks }
    }

    fn setup(weights: &[usize], unit: usize) -> (MultipartiteGraph, BlockAssignment) {
        let k: usize = weights.iter().sum();
        let g = MultipartiteGraph::complete(&[k * unit; 4]);
        let dec = rows_dec(&g, weights, unit);
        let a = classify_bad_vertices(&g, &dec, &vec![None; weights.len()], &Params::default()).unwrap();
        (g, a)
    }

    #[test]
    fn family_counts() {
        // r!/((r−k)!·Π p_i!)
        assert_eq!(families(4, &[1, 1, 1]).len(), 24);
        assert_eq!(families(4, &[2, 1]).len(), 12);
        assert_eq!(families(5, &[2, 2]).len(), 30);
        assert_eq!(families(3, &[2, 2]).len(), 0);
    }

    #[test]
    fn empty_seed_gives_proper_clique() {
        let (g, a) = setup(&[1, 1, 1], 2);
        let forbidden = FixedBitSet::with_capacity(g.vertex_count());
        for fam in families(4, &a.weights) {
            let c = extend_clique(&g, &a, &[], &fam, &[None; 3], &forbidden, 1000).unwrap();
            assert!(is_clique(&g, &c));
            assert!(Tag::Proper.holds(&a, &c));
            for (i, cols) in fam.iter().enumerate() {
                for &j in cols {
                    assert!(c.iter().any(|&v| a.row_of[v] == i && g.class_of(v) == j));
                }
            }
        }
    }

    #[test]
    fn exhausted_block_is_reported() {
        let (g, a) = setup(&[1, 1, 1], 2);
        // Every vertex of X^1_1 is already used.
        let mut forbidden = FixedBitSet::with_capacity(g.vertex_count());
        for &w in &a.blocks[1][1] {
            forbidden.insert(w);
        }
        let fam = vec![vec![0], vec![1], vec![2]];
        let err = extend_clique(&g, &a, &[0], &fam, &[None; 3], &forbidden, 1000).unwrap_err();
        assert_eq!((err.row, err.class), (Some(1), Some(1)), "{err:?}");
        assert!(err.step.is_some());
    }

    #[test]
    fn shifted_and_edge_blocks() {
        let (g, a) = setup(&[2, 1], 2);
        let forbidden = FixedBitSet::with_capacity(g.vertex_count());
        let b = building_block(&g, &a, &BuildingKind::Shifted { plus: 0, minus: 1, s_count: None }, &forbidden, &BuildOptions::default()).unwrap();
        assert!(b.tag.holds(&a, &b.clique) && is_clique(&g, &b.clique));
        assert_eq!(a.row_counts(&b.clique), vec![3, 0]);
        let (u, v) = (a.blocks[1][0][0], a.blocks[1][1][0]);
        let b = building_block(&g, &a, &BuildingKind::ThroughEdge { u, v, minus: 0, parity: None }, &forbidden, &BuildOptions::default()).unwrap();
        assert_eq!(a.row_counts(&b.clique), vec![1, 2]);
        assert!(b.clique.contains(&u) && b.clique.contains(&v));
        let b = building_block(&g, &a, &BuildingKind::ThroughVertex(5), &forbidden, &BuildOptions::default()).unwrap();
        assert!(b.clique.contains(&5) && Tag::Proper.holds(&a, &b.clique));
    }
}
