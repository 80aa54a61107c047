use std::collections::BTreeMap;

use itertools::Itertools;
use petgraph::graph::UnGraph;
use serde::{Deserialize, Serialize};

use super::assignment::BlockAssignment;
use super::extend::{Built, Tag};
use super::stages::DeletionLedger;
use super::{Params, PipelineError};
use crate::graph::{CliquePacking, MultipartiteGraph};
use crate::matching::{
    exact_balanced_clique_packing, maximum_matching, pair_complete_balanced_matching, regular_bipartite_perfect_matching,
    BipartiteGraph, ExactOutcome, MatchingError, PairBalancedOptions, PairRoute,
};
use crate::structure::RowDecomposition;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowMethod {
    /// Weight 1: every vertex on its own.
    Trivial,
    /// Exact search for a balanced perfect K_p-packing.
    Exact,
    /// Balanced matching of a pair-complete row, after an optional M_2 swap
    /// fixing the half parity.
    PairComplete { route: PairRoute, swapped: bool },
    /// Balanced matching found with fake edges; each fake edge used was
    /// substituted by swapping a vertex of an M_2 clique.
    FakeEdges { added: usize, used: usize },
    /// A surplus of D·r matching edges was extended to K_k's and deleted.
    Surplus { d: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowReport {
    pub row: usize,
    pub method: RowMethod,
    pub detail: String,
}

/// Balanced perfect packings of every row of the final blocks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RowPackings {
    /// Final blocks (changed by swaps and surplus deletions).
    pub blocks: RowDecomposition,
    pub packings: Vec<CliquePacking>,
    pub reports: Vec<RowReport>,
}

fn row_graph(g: &MultipartiteGraph, dec: &RowDecomposition, i: usize) -> (MultipartiteGraph, Vec<usize>) {
    g.induced(&dec.row_vertices(i))
}

fn exact_row(sub: &MultipartiteGraph, p: usize, budget: u64) -> Result<(Option<CliquePacking>, bool), PipelineError> {
    let rep = exact_balanced_clique_packing(sub, p, true, budget)?;
    Ok(match rep.outcome {
        ExactOutcome::Found(pk) => (Some(pk), true),
        ExactOutcome::Absent => (None, true),
        ExactOutcome::BudgetExhausted => (None, false),
    })
}

fn replace_in_block(dec: &mut RowDecomposition, row: usize, class: usize, out: usize, inn: usize) {
    let b = &mut dec.blocks[row][class];
    let pos = b.iter().position(|&v| v == out).expect("vertex lies in its block");
    b[pos] = inn;
    b.sort_unstable();
}

/// M_2 cliques that are (i', i)-distributed: one vertex short in row i.
fn short_cliques(a: &BlockAssignment, ledger: &DeletionLedger, i: usize) -> Vec<(usize, usize)> {
    ledger
        .cliques
        .iter()
        .enumerate()
        .filter(|(_, c)| c.stage == 2 && matches!(c.tag, Tag::Shifted { minus, .. } if minus == i))
        .filter_map(|(idx, c)| c.clique.iter().copied().find(|&v| a.row_of[v] == i).map(|x| (idx, x)))
        .collect()
}

/// Give every row of `dec` a balanced perfect K_{p_i}-packing, swapping
/// vertices with M_2 cliques where a row needs it and, with a single heavy
/// row that is not pair-complete and has no balanced matching, deleting a
/// small surplus packing first.
pub fn fix_row_parity_and_matchability(
    g: &MultipartiteGraph,
    a: &BlockAssignment,
    dec: &RowDecomposition,
    ledger: &mut DeletionLedger,
    params: &Params,
) -> Result<RowPackings, PipelineError> {
    let s = dec.rows();
    let mut dec = dec.clone();
    let mut packings: Vec<Option<CliquePacking>> = vec![None; s];
    let mut reports = Vec::new();
    let heavy = a.heavy_rows();

    // A single heavy row that is not pair-complete may need the surplus route,
    // which shrinks every block; settle it before the other rows.
    if let [l] = heavy[..] {
        if a.weights[l] == 2 && !a.pair_complete[l] {
            let (sub, map) = row_graph(g, &dec, l);
            let (found, proven) = exact_row(&sub, 2, params.budget)?;
            match found {
                Some(pk) => {
                    packings[l] = Some(pk.mapped(&map));
                    reports.push(RowReport { row: l, method: RowMethod::Exact, detail: "balanced matching found directly".into() });
                }
                None => {
                    let (pk, d) = surplus_route(g, a, &mut dec, ledger, l, params)?;
                    packings[l] = Some(pk);
                    reports.push(RowReport {
                        row: l,
                        method: RowMethod::Surplus { d },
                        detail: format!("direct search {}", if proven { "proved no balanced matching" } else { "ran out of budget" }),
                    });
                }
            }
        }
    }

    for i in 0..s {
        if packings[i].is_some() {
            continue;
        }
        let p = dec.weights[i];
        if p == 1 {
            packings[i] = Some(CliquePacking::new(dec.row_vertices(i).into_iter().sorted().map(|v| vec![v]).collect()));
            reports.push(RowReport { row: i, method: RowMethod::Trivial, detail: String::new() });
            continue;
        }
        if p == 2 && a.pair_complete[i] {
            let swapped = fix_half_parity(g, a, &mut dec, ledger, i)?;
            let (sub, map) = row_graph(g, &dec, i);
            let mut back = vec![usize::MAX; g.vertex_count()];
            for (x, &v) in map.iter().enumerate() {
                back[v] = x;
            }
            let halves: Vec<Vec<usize>> = (0..a.r).map(|j| dec.blocks[i][j].iter().filter(|&&v| a.in_s[v]).map(|&v| back[v]).collect()).collect();
            let opts = PairBalancedOptions { zeta: params.zeta, strict_window: false, budget: params.budget };
            // Deletions may leave the halves outside the ζ window; the
            // matching is then attempted without the window checks.
            let res = match pair_complete_balanced_matching(&sub, &halves, &opts) {
                Err(MatchingError::Precondition(_)) => {
                    pair_complete_balanced_matching(&sub, &halves, &PairBalancedOptions { zeta: Rational::from_integer(1), ..opts })
                }
                other => other,
            }
            .map_err(|e| PipelineError::Row { row: i, proven_absent: false, detail: format!("pair-complete matching: {e}") })?;
            packings[i] = Some(res.packing.mapped(&map));
            reports.push(RowReport {
                row: i,
                method: RowMethod::PairComplete { route: res.route, swapped },
                detail: format!("n′ for the matching {:?}", res.n_prime),
            });
            continue;
        }
        let (sub, map) = row_graph(g, &dec, i);
        let (found, proven) = exact_row(&sub, p, params.budget)?;
        if let Some(pk) = found {
            packings[i] = Some(pk.mapped(&map));
            reports.push(RowReport { row: i, method: RowMethod::Exact, detail: String::new() });
            continue;
        }
        if p == 2 && heavy.len() >= 2 {
            let (pk, added, used) = fake_edge_route(g, a, &mut dec, ledger, i, params)?;
            packings[i] = Some(pk);
            reports.push(RowReport { row: i, method: RowMethod::FakeEdges { added, used }, detail: String::new() });
            continue;
        }
        return Err(PipelineError::Row {
            row: i,
            proven_absent: proven,
            detail: format!("no balanced perfect K_{p}-packing ({})", if proven { "search complete" } else { "budget exhausted" }),
        });
    }
    let packings: Vec<CliquePacking> = packings.into_iter().map(|p| p.expect("every row handled")).collect();
    Ok(RowPackings { blocks: dec, packings, reports })
}

/// Make |S ∩ X′^i| even by trading the row-i vertex x of an M_2 clique for a
/// vertex y of the same block on the other side of the halves.
fn fix_half_parity(
    g: &MultipartiteGraph,
    a: &BlockAssignment,
    dec: &mut RowDecomposition,
    ledger: &mut DeletionLedger,
    i: usize,
) -> Result<bool, PipelineError> {
    let count = dec.row_vertices(i).iter().filter(|&&v| a.in_s[v]).count();
    if count % 2 == 0 {
        return Ok(false);
    }
    for (idx, x) in short_cliques(a, ledger, i) {
        let j = g.class_of(x);
        let rest: Vec<usize> = ledger.cliques[idx].clique.iter().copied().filter(|&v| v != x).collect();
        let y = dec.blocks[i][j].iter().copied().find(|&y| a.in_s[y] != a.in_s[x] && rest.iter().all(|&w| g.has_edge(y, w)));
        if let Some(y) = y {
            ledger.swap(idx, i, x, y);
            replace_in_block(dec, i, j, y, x);
            return Ok(true);
        }
    }
    Err(PipelineError::Row { row: i, proven_absent: false, detail: format!("|S′| = {count} is odd and no M_2 clique can be swapped") })
}

/// Add fake edges y(x)–x₁ for every M_2 clique short in row i (x its row-i
/// vertex, y(x) a vertex of the same block completing the clique, x₁ a
/// neighbour of x in the row), search a balanced matching of the row with
/// them, then substitute every fake edge used by swapping x and y.
fn fake_edge_route(
    g: &MultipartiteGraph,
    a: &BlockAssignment,
    dec: &mut RowDecomposition,
    ledger: &mut DeletionLedger,
    i: usize,
    params: &Params,
) -> Result<(CliquePacking, usize, usize), PipelineError> {
    let (mut star, map) = row_graph(g, dec, i);
    let mut back = vec![usize::MAX; g.vertex_count()];
    for (x, &v) in map.iter().enumerate() {
        back[v] = x;
    }
    // Side table: (y, x1) in row ids -> (ledger clique, x).
    let mut fake: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    let mut taken = vec![false; g.vertex_count()];
    for (idx, x) in short_cliques(a, ledger, i) {
        let q = g.class_of(x);
        let rest: Vec<usize> = ledger.cliques[idx].clique.iter().copied().filter(|&v| v != x).collect();
        let Some(y) = dec.blocks[i][q].iter().copied().find(|&y| !taken[y] && rest.iter().all(|&w| g.has_edge(y, w))) else { continue };
        taken[y] = true;
        for x1 in dec.row_vertices(i).into_iter().filter(|&x1| g.class_of(x1) != q && g.has_edge(x, x1) && !g.has_edge(y, x1)) {
            let (ys, x1s) = (back[y], back[x1]);
            star.add_edge(ys, x1s)?;
            fake.insert((ys.min(x1s), ys.max(x1s)), (idx, x));
        }
    }
    let added = fake.len();
    let (found, proven) = exact_row(&star, 2, params.budget)?;
    let Some(pk) = found else {
        return Err(PipelineError::Row {
            row: i,
            proven_absent: false,
            detail: format!("no balanced matching even with {added} fake edges ({})", if proven { "search complete" } else { "budget exhausted" }),
        });
    };
    let mut used = 0;
    let mut cliques = Vec::new();
    for e in &pk.cliques {
        let (u, v) = (e[0].min(e[1]), e[0].max(e[1]));
        match fake.get(&(u, v)) {
            Some(&(idx, x)) => {
                // Which end is y?
                let q = g.class_of(x);
                let (y, x1) = if g.class_of(map[u]) == q { (map[u], map[v]) } else { (map[v], map[u]) };
                ledger.swap(idx, i, x, y);
                replace_in_block(dec, i, q, y, x);
                cliques.push(vec![x.min(x1), x.max(x1)]);
                used += 1;
            }
            None => cliques.push(vec![map[u], map[v]]),
        }
    }
    Ok((CliquePacking::new(cliques), added, used))
}

/// Split any perfect matching of the heavy row into a balanced part M_0 with
/// u·r | |M_0| and a surplus of D·r edges, extend the surplus to K_k's through
/// the weight-1 rows and delete them. Returns the balanced part and D.
fn surplus_route(
    g: &MultipartiteGraph,
    a: &BlockAssignment,
    dec: &mut RowDecomposition,
    ledger: &mut DeletionLedger,
    l: usize,
    params: &Params,
) -> Result<(CliquePacking, usize), PipelineError> {
    let r = a.r;
    let n = dec.unit;
    let unit = params.unit(r, a.k);
    let verts: Vec<usize> = dec.row_vertices(l).into_iter().sorted().collect();
    let mut h: UnGraph<usize, ()> = UnGraph::default();
    let nodes: Vec<_> = verts.iter().map(|&v| h.add_node(v)).collect();
    for (x, y) in (0..verts.len()).tuple_combinations() {
        if g.has_edge(verts[x], verts[y]) {
            h.add_edge(nodes[x], nodes[y], ());
        }
    }
    let m = petgraph::algo::maximum_matching(&h);
    if !m.is_perfect() {
        return Err(PipelineError::Row { row: l, proven_absent: true, detail: "row has no perfect matching".into() });
    }
    let mut by_index: BTreeMap<(usize, usize), Vec<Vec<usize>>> = BTreeMap::new();
    for (x, y) in m.edges() {
        let (u, v) = (h[x].min(h[y]), h[x].max(h[y]));
        by_index.entry((g.class_of(u), g.class_of(v))).or_default().push(vec![u, v]);
    }
    let pairs = r * (r - 1) / 2;
    let least = (0..r).tuple_combinations().map(|p| by_index.get(&p).map_or(0, Vec::len)).min().unwrap_or(0);
    // t edges per index with u·r | t·C(r, 2).
    let t = (0..=least).rev().find(|&t| (t * pairs) % (r * unit) == 0).unwrap_or(0);
    let mut balanced = Vec::new();
    let mut surplus = Vec::new();
    for (_, mut es) in by_index {
        es.sort();
        let rest = es.split_off(t.min(es.len()));
        balanced.extend(es);
        surplus.extend(rest);
    }
    let d = n - balanced.len() / r;
    if surplus.len() != d * r {
        return Err(PipelineError::Row { row: l, proven_absent: false, detail: format!("surplus of {} edges is not D·r = {}", surplus.len(), d * r) });
    }
    let cliques = extend_surplus_matching(g, dec, l, &surplus, d)
        .map_err(|detail| PipelineError::Row { row: l, proven_absent: false, detail })?;
    for c in cliques {
        for &v in &c {
            let (i, j) = (a_row(dec, v), g.class_of(v));
            dec.blocks[i][j].retain(|&w| w != v);
        }
        ledger.push(Built { clique: c, tag: Tag::Proper }, 6);
    }
    dec.unit = n - d;
    Ok((CliquePacking::new(balanced), d))
}

fn a_row(dec: &RowDecomposition, v: usize) -> usize {
    dec.blocks.iter().position(|row| row.iter().any(|b| b.contains(&v))).expect("vertex lies in a block")
}

/// Extend D·r disjoint edges of heavy row l, covering 2D vertices of each
/// class, to K_k's by adding one vertex from each weight-1 row in turn: a
/// regular bipartite graph between the current cliques and the slots
/// (class j, 1..D) assigns each clique a class it misses, then a matching
/// inside each class picks distinct common neighbours.
pub fn extend_surplus_matching(
    g: &MultipartiteGraph,
    dec: &RowDecomposition,
    l: usize,
    surplus: &[Vec<usize>],
    d: usize,
) -> Result<Vec<Vec<usize>>, String> {
    let r = g.r();
    let mut cliques: Vec<Vec<usize>> = surplus.to_vec();
    for i in (0..dec.rows()).filter(|&i| i != l) {
        if dec.weights[i] != 1 {
            return Err(format!("row {i} has weight {}", dec.weights[i]));
        }
        let mut b = BipartiteGraph::new(cliques.len(), r * d);
        for (c, clique) in cliques.iter().enumerate() {
            for j in (0..r).filter(|&j| clique.iter().all(|&v| g.class_of(v) != j)) {
                for q in 0..d {
                    b.add_edge(c, j * d + q);
                }
            }
        }
        let rep = regular_bipartite_perfect_matching(&b);
        let partner = rep.partner.ok_or_else(|| format!("slot assignment for row {i} failed ({:?})", rep.regularity))?;
        for j in 0..r {
            let group: Vec<usize> = (0..cliques.len()).filter(|&c| partner[c] / d.max(1) == j).collect();
            let block = &dec.blocks[i][j];
            let mut bb = BipartiteGraph::new(group.len(), block.len());
            for (x, &c) in group.iter().enumerate() {
                for (y, &w) in block.iter().enumerate() {
                    if cliques[c].iter().all(|&v| g.has_edge(v, w)) {
                        bb.add_edge(x, y);
                    }
                }
            }
            let mm = maximum_matching(&bb);
            for (x, &c) in group.iter().enumerate() {
                let y = mm[x].ok_or_else(|| format!("no common neighbour in row {i}, class {j} for surplus clique {c}"))?;
                cliques[c].push(block[y]);
            }
        }
    }
    for c in &mut cliques {
        c.sort_unstable();
    }
    Ok(cliques)
}
