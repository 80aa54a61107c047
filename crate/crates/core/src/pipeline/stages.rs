use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use num_integer::{binomial, Integer};
use petgraph::graph::UnGraph;
use serde::{Deserialize, Serialize};

use super::assignment::BlockAssignment;
use super::extend::{building_block, families, BuildOptions, Built, BuildingKind, ExtendFailure, Tag};
use super::{Params, PipelineError};
use crate::graph::{is_clique, MultipartiteGraph};
use crate::structure::RowDecomposition;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedClique {
    pub clique: Vec<usize>,
    pub tag: Tag,
    /// Stage 1..=5 that deleted it (6 for cliques added by row fixes).
    pub stage: usize,
}

/// A clique of M_2 had vertex `removed` replaced by `added` from the same block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapEvent {
    pub clique: usize,
    pub row: usize,
    pub removed: usize,
    pub added: usize,
}

/// Every clique deleted so far, with the vertices they cover.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct DeletionLedger {
    pub cliques: Vec<TaggedClique>,
    pub swaps: Vec<SwapEvent>,
    #[serde(skip)]
    used: FixedBitSet,
}

impl DeletionLedger {
    pub fn new(vertex_count: usize) -> Self {
        DeletionLedger { cliques: Vec::new(), swaps: Vec::new(), used: FixedBitSet::with_capacity(vertex_count) }
    }

    pub fn used(&self) -> &FixedBitSet {
        &self.used
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn stage_len(&self, stage: usize) -> usize {
        self.cliques.iter().filter(|c| c.stage == stage).count()
    }

    pub fn push(&mut self, built: Built, stage: usize) {
        for &v in &built.clique {
            assert!(!self.used.contains(v), "vertex {v} deleted twice");
            self.used.insert(v);
        }
        self.cliques.push(TaggedClique { clique: built.clique, tag: built.tag, stage });
    }

    /// Replace `removed` by `added` in clique `idx`.
    pub fn swap(&mut self, idx: usize, row: usize, removed: usize, added: usize) {
        let c = &mut self.cliques[idx].clique;
        let pos = c.iter().position(|&v| v == removed).expect("swapped vertex lies in the clique");
        assert!(!self.used.contains(added), "vertex {added} already deleted");
        c[pos] = added;
        c.sort_unstable();
        self.used.set(removed, false);
        self.used.insert(added);
        self.swaps.push(SwapEvent { clique: idx, row, removed, added });
    }

    /// Vertices deleted in each class.
    pub fn class_counts(&self, g: &MultipartiteGraph) -> Vec<usize> {
        let mut c = vec![0; g.r()];
        for v in self.used.ones() {
            c[g.class_of(v)] += 1;
        }
        c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Check {
    Disjoint,
    Cliques,
    Tags,
    RowProportional,
    ExtremalParity,
    BadCovered,
    Divisibility,
    ColumnEquality,
    MultipleOfUnit,
    BlockProportional,
    DiagonalDegree,
}

impl Check {
    /// Failing an audit is logged but does not abort.
    pub fn is_fatal(self) -> bool {
        self != Check::DiagonalDegree
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecount {
    pub check: Check,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub deleted: usize,
    pub recounts: Vec<StageRecount>,
    pub notes: Vec<String>,
}

impl StageRecord {
    fn new(name: &str) -> Self {
        StageRecord { name: name.into(), deleted: 0, recounts: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, check: Check, passed: bool, detail: String) {
        self.recounts.push(StageRecount { check, passed, detail });
    }

    /// The first failing fatal recount as an error.
    fn verdict(self) -> Result<Self, PipelineError> {
        match self.recounts.iter().find(|c| !c.passed && c.check.is_fatal()) {
            Some(c) => Err(PipelineError::Recount { stage: self.name.clone(), check: format!("{:?}: {}", c.check, c.detail) }),
            None => Ok(self),
        }
    }
}

/// Which case of the row balancing applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowCase {
    /// Not extremal (or already balanced and not extremal).
    Ordinary,
    /// Extremal, excess present, extra row is the last shift's plus row.
    ExtremalPlus,
    /// Extremal, excess present, extra row is the last shift's minus row.
    ExtremalMinus,
    /// Extremal, excess present, extra row uninvolved: two cliques at the end.
    ExtremalDetour,
    /// Extremal, balanced, halves already even.
    ExtremalEven,
    /// Extremal, balanced: an edge in a weight-1 row fixes the parity.
    ExtremalRowEdge,
    /// Extremal, balanced: an edge across the halves fixes the parity.
    ExtremalMixedEdge,
}

fn opts(params: &Params) -> BuildOptions {
    BuildOptions { extend_budget: params.extend_budget, ..BuildOptions::default() }
}

fn supply(stage: &str, what: &str, e: ExtendFailure) -> PipelineError {
    PipelineError::Supply {
        stage: stage.into(),
        detail: format!(
            "{what}: {} (step {:?}, row {:?}, class {:?})",
            e.reason, e.step, e.row, e.class
        ),
    }
}

/// Recounts shared by every stage.
fn ledger_checks(g: &MultipartiteGraph, a: &BlockAssignment, ledger: &DeletionLedger, k: usize, rec: &mut StageRecord) {
    let mut seen = FixedBitSet::with_capacity(g.vertex_count());
    let mut disjoint = true;
    for c in &ledger.cliques {
        for &v in &c.clique {
            disjoint &= !seen.put(v);
        }
    }
    disjoint &= seen == *ledger.used();
    rec.check(Check::Disjoint, disjoint, format!("{} cliques", ledger.len()));
    let bad_clique = ledger.cliques.iter().position(|c| c.clique.len() != k || !is_clique(g, &c.clique));
    rec.check(Check::Cliques, bad_clique.is_none(), format!("first failure {bad_clique:?}"));
    let bad_tag = ledger.cliques.iter().position(|c| !c.tag.holds(a, &c.clique));
    rec.check(Check::Tags, bad_tag.is_none(), format!("first failure {bad_tag:?}"));
}

fn remaining_rows(a: &BlockAssignment, used: &FixedBitSet) -> Vec<usize> {
    a.remaining_sizes(used).iter().map(|row| row.iter().sum()).collect()
}

fn s_remaining(a: &BlockAssignment, row: usize, used: &FixedBitSet) -> usize {
    a.blocks[row].iter().flatten().filter(|&&v| a.in_s[v] && !used.contains(v)).count()
}

/// Number of K_k's a perfect packing needs: r·n⁺/k.
fn total_cliques(a: &BlockAssignment) -> usize {
    a.r * a.n_plus / a.k
}

fn row_checks(a: &BlockAssignment, ledger: &DeletionLedger, extremal: Option<usize>, rec: &mut StageRecord) {
    let t = total_cliques(a) as i64 - ledger.len() as i64;
    let rows = remaining_rows(a, ledger.used());
    let ok = rows.iter().zip(&a.weights).all(|(&w, &p)| w as i64 == p as i64 * t);
    rec.check(Check::RowProportional, ok, format!("rows {rows:?}, weights {:?}, multiplier {t}", a.weights));
    if let Some(i) = extremal {
        let sr = s_remaining(a, i, ledger.used());
        rec.check(Check::ExtremalParity, sr % 2 == 0, format!("|S ∖ V(M)| = {sr} in row {i}"));
    }
}

/// Maximum matching of edges inside row i with a good end (weight-1 rows).
fn good_edge_matching(g: &MultipartiteGraph, a: &BlockAssignment, i: usize) -> Vec<(usize, usize)> {
    let verts: Vec<usize> = a.blocks[i].iter().flatten().copied().sorted().collect();
    let mut h: UnGraph<usize, ()> = UnGraph::default();
    let nodes: Vec<_> = verts.iter().map(|&v| h.add_node(v)).collect();
    for (x, y) in (0..verts.len()).tuple_combinations() {
        let (u, v) = (verts[x], verts[y]);
        if g.has_edge(u, v) && (a.good[u] || a.good[v]) {
            h.add_edge(nodes[x], nodes[y], ());
        }
    }
    let m = petgraph::algo::maximum_matching(&h);
    m.edges()
        .map(|(x, y)| {
            let (u, v) = (h[x], h[y]);
            // Good end first.
            if a.good[u] { (u, v) } else { (v, u) }
        })
        .sorted()
        .collect()
}

/// M_1: make every row size proportional to its weight and, with the
/// extremal row structure, leave an even number of S-vertices in the heavy
/// pair-complete row.
pub fn balance_rows(
    g: &MultipartiteGraph,
    a: &BlockAssignment,
    ledger: &mut DeletionLedger,
    params: &Params,
) -> Result<(StageRecord, RowCase), PipelineError> {
    const STAGE: &str = "M1";
    let mut rec = StageRecord::new("balance_rows");
    let o = opts(params);
    let extremal = a.extremal_row();
    let t = total_cliques(a) as i64;
    let rows = remaining_rows(a, ledger.used());
    let excess: Vec<i64> = (0..a.s()).map(|i| rows[i] as i64 - a.weights[i] as i64 * t).collect();
    rec.notes.push(format!("row excesses {excess:?}"));
    let plus_seq: Vec<usize> = (0..a.s()).flat_map(|i| std::iter::repeat(i).take(excess[i].max(0) as usize)).collect();
    let minus_seq: Vec<usize> = (0..a.s()).flat_map(|i| std::iter::repeat(i).take((-excess[i]).max(0) as usize)).collect();
    let total = plus_seq.len();

    // E^i for weight-1 rows with positive excess.
    let mut edges: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for i in (0..a.s()).filter(|&i| excess[i] > 0 && a.weights[i] == 1) {
        let m: Vec<(usize, usize)> = good_edge_matching(g, a, i)
            .into_iter()
            .filter(|&(u, v)| !ledger.used().contains(u) && !ledger.used().contains(v))
            .collect();
        if (m.len() as i64) < excess[i] {
            return Err(PipelineError::Supply {
                stage: STAGE.into(),
                detail: format!("row {i} has excess {} but only {} disjoint edges with a good end", excess[i], m.len()),
            });
        }
        edges.insert(i, m.into_iter().take(excess[i] as usize).collect());
    }
    let mut reserved = FixedBitSet::with_capacity(g.vertex_count());
    for &(u, v) in edges.values().flatten() {
        reserved.insert(u);
        reserved.insert(v);
    }
    let mut next_edge: BTreeMap<usize, usize> = BTreeMap::new();

    let mut shift = |ledger: &mut DeletionLedger, plus: usize, minus: usize, parity: Option<bool>, s_count: Option<usize>| -> Result<(), PipelineError> {
        let mut forbidden = ledger.used().clone();
        forbidden.union_with(&reserved);
        let built = if a.weights[plus] == 1 {
            let idx = next_edge.entry(plus).or_insert(0);
            let (u, v) = edges[&plus][*idx];
            *idx += 1;
            forbidden.set(u, false);
            forbidden.set(v, false);
            building_block(g, a, &BuildingKind::ThroughEdge { u, v, minus, parity }, &forbidden, &o)
                .map_err(|e| supply(STAGE, &format!("extend edge {u}{v} from row {plus} to row {minus}"), e))?
        } else {
            building_block(g, a, &BuildingKind::Shifted { plus, minus, s_count }, &forbidden, &o)
                .map_err(|e| supply(STAGE, &format!("shift from row {plus} to row {minus}"), e))?
        };
        ledger.push(built, 1);
        Ok(())
    };

    let case = match extremal {
        None => {
            for l in 0..total {
                shift(ledger, plus_seq[l], minus_seq[l], None, None)?;
            }
            RowCase::Ordinary
        }
        Some(star) if total > 0 => {
            for l in 0..total - 1 {
                shift(ledger, plus_seq[l], minus_seq[l], None, None)?;
            }
            let (plus, minus) = (plus_seq[total - 1], minus_seq[total - 1]);
            let odd = |ledger: &DeletionLedger| s_remaining(a, star, ledger.used()) % 2 == 1;
            if plus == star {
                let c = if odd(ledger) { 3 } else { 0 };
                shift(ledger, plus, minus, None, Some(c))?;
                RowCase::ExtremalPlus
            } else if minus == star {
                let p = odd(ledger);
                shift(ledger, plus, minus, Some(p), None)?;
                RowCase::ExtremalMinus
            } else {
                shift(ledger, plus, star, None, None)?;
                let c = if odd(ledger) { 3 } else { 0 };
                let mut forbidden = ledger.used().clone();
                forbidden.union_with(&reserved);
                let built = building_block(g, a, &BuildingKind::Shifted { plus: star, minus, s_count: Some(c) }, &forbidden, &o)
                    .map_err(|e| supply(STAGE, "parity detour", e))?;
                ledger.push(built, 1);
                RowCase::ExtremalDetour
            }
        }
        Some(star) => {
            if s_remaining(a, star, ledger.used()) % 2 == 0 {
                RowCase::ExtremalEven
            } else {
                let found = parity_fix(g, a, ledger, star, &o).or_else(|| {
                    // Every vertex passes the neighbourhood bounds that good
                    // vertices are used for once no such edge is found.
                    let mut all = a.clone();
                    all.good = vec![true; all.good.len()];
                    rec.notes.push("retrying the parity fix with every vertex treated as good".into());
                    parity_fix(g, &all, ledger, star, &o)
                });
                match found {
                    Some((case, built)) => {
                        for b in built {
                            ledger.push(b, 1);
                        }
                        case
                    }
                    None => return Err(PipelineError::CandidateExtremal),
                }
            }
        }
    };
    rec.deleted = ledger.stage_len(1);
    rec.notes.push(format!("case {case:?}"));
    ledger_checks(g, a, ledger, a.k, &mut rec);
    row_checks(a, ledger, extremal, &mut rec);
    Ok((rec.verdict()?, case))
}

/// Balanced rows with odd S: an edge with a good end inside a weight-1 row
/// (two cliques) or across the halves of the heavy row (one clique).
fn parity_fix(
    g: &MultipartiteGraph,
    a: &BlockAssignment,
    ledger: &DeletionLedger,
    star: usize,
    o: &BuildOptions,
) -> Option<(RowCase, Vec<Built>)> {
    let used = ledger.used();
    let live = |v: usize| !used.contains(v);
    for i in (0..a.s()).filter(|&i| i != star) {
        let verts: Vec<usize> = a.blocks[i].iter().flatten().copied().filter(|&v| live(v)).sorted().collect();
        for (&u, &v) in verts.iter().tuple_combinations() {
            if !g.has_edge(u, v) || !(a.good[u] || a.good[v]) {
                continue;
            }
            let (u, v) = if a.good[u] { (u, v) } else { (v, u) };
            let Ok(first) = building_block(g, a, &BuildingKind::ThroughEdge { u, v, minus: star, parity: None }, used, o) else { continue };
            let mut forbidden = used.clone();
            forbidden.extend(first.clique.iter().copied());
            let left = s_remaining(a, star, &forbidden);
            let c = if left % 2 == 1 { 3 } else { 0 };
            if let Ok(second) = building_block(g, a, &BuildingKind::Shifted { plus: star, minus: i, s_count: Some(c) }, &forbidden, o) {
                return Some((RowCase::ExtremalRowEdge, vec![first, second]));
            }
        }
    }
    let verts: Vec<usize> = a.blocks[star].iter().flatten().copied().filter(|&v| live(v)).sorted().collect();
    for (&u, &v) in verts.iter().tuple_combinations() {
        if !g.has_edge(u, v) || a.in_s[u] == a.in_s[v] || !(a.good[u] || a.good[v]) {
            continue;
        }
        let (u, v) = if a.good[u] { (u, v) } else { (v, u) };
        if let Ok(b) = building_block(g, a, &BuildingKind::OutsideRow { u, v }, used, o) {
            return Some((RowCase::ExtremalMixedEdge, vec![b]));
        }
    }
    None
}

/// M_2: `eta_count` shifted cliques of good vertices per ordered pair of
/// rows of weight at least 2.
pub fn prepare_multirow(
    g: &MultipartiteGraph,
    a: &BlockAssignment,
    ledger: &mut DeletionLedger,
    params: &Params,
) -> Result<StageRecord, PipelineError> {
    let mut rec = StageRecord::new("prepare_multirow");
    let heavy = a.heavy_rows();
    if heavy.len() >= 2 {
        let o = opts(params);
        for (&i, &j) in heavy.iter().cartesian_product(&heavy) {
            if i == j {
                continue;
            }
            for q in 0..params.eta_count {
                let built = building_block(g, a, &BuildingKind::Shifted { plus: i, minus: j, s_count: None }, ledger.used(), &o)
                    .map_err(|e| supply("M2", &format!("shifted clique {q} for rows ({i},{j})"), e))?;
                ledger.push(built, 2);
            }
        }
    }
    rec.deleted = ledger.stage_len(2);
    ledger_checks(g, a, ledger, a.k, &mut rec);
    let supplied = ledger.cliques.iter().filter(|c| c.stage == 2).all(|c| c.clique.iter().all(|&v| a.good[v]));
    rec.check(Check::Tags, supplied, "M2 uses good vertices only".into());
    row_checks(a, ledger, None, &mut rec);
    rec.verdict()
}

/// Score of a family: total remaining size of the blocks it would use.
fn family_score(sizes: &[Vec<usize>], fam: &[Vec<usize>]) -> usize {
    fam.iter().enumerate().map(|(i, cols)| cols.iter().map(|&j| sizes[i][j]).sum::<usize>()).sum()
}

/// A properly-distributed clique, trying `fams` in steering order (largest
/// remaining blocks first) or as given.
fn proper_from(
    g: &MultipartiteGraph,
    a: &BlockAssignment,
    ledger: &DeletionLedger,
    fams: &[Vec<Vec<usize>>],
    steer: bool,
    o: &BuildOptions,
) -> Result<Built, ExtendFailure> {
    let mut order: Vec<&Vec<Vec<usize>>> = fams.iter().collect();
    if steer {
        let sizes = a.remaining_sizes(ledger.used());
        order.sort_by_key(|f| std::cmp::Reverse(family_score(&sizes, f)));
    }
    let mut last = ExtendFailure { step: None, row: None, class: None, reason: "no family".into() };
    for fam in order {
        match building_block(g, a, &BuildingKind::Proper { family: fam.clone() }, ledger.used(), o) {
            Ok(b) => return Ok(b),
            Err(e) => last = e,
        }
    }
    Err(last)
}

fn modulus(a: &BlockAssignment, params: &Params) -> usize {
    a.r * params.unit(a.r, a.k)
}

fn multiple_step(a: &BlockAssignment, params: &Params) -> usize {
    let m = modulus(a, params);
    if params.strict_multiples {
        m * a.k
    } else {
        m
    }
}

/// M_3: cover every bad vertex left by a properly-distributed clique, then
/// add fillers until the number of cliques still to find is divisible by r·u.
pub fn cover_and_divisibility(
    g: &MultipartiteGraph,
    a: &BlockAssignment,
    ledger: &mut DeletionLedger,
    params: &Params,
) -> Result<StageRecord, PipelineError> {
    const STAGE: &str = "M3";
    let mut rec = StageRecord::new("cover_and_divisibility");
    let o = opts(params);
    let left_bad: Vec<usize> = a.bad_set().into_iter().filter(|&v| !ledger.used().contains(v)).collect();
    rec.notes.push(format!("{} bad vertices to cover", left_bad.len()));
    for v in left_bad {
        if ledger.used().contains(v) {
            continue;
        }
        let built = building_block(g, a, &BuildingKind::ThroughVertex(v), ledger.used(), &o)
            .map_err(|e| supply(STAGE, &format!("cover bad vertex {v}"), e))?;
        ledger.push(built, 3);
    }
    let covering = ledger.stage_len(3);
    let m = modulus(a, params);
    let need = total_cliques(a) - (ledger.len() - covering);
    // Least C ≥ covering with C ≡ need (mod m).
    let c = covering + ((need % m + m - covering % m) % m);
    rec.notes.push(format!("C = {c} cliques (covering {covering}, modulus {m})"));
    if c > need {
        return Err(PipelineError::Divisibility { stage: STAGE.into(), detail: format!("C = {c} exceeds the {need} cliques left") });
    }
    let fams = families(a.r, &a.weights);
    while ledger.stage_len(3) < c {
        let built = proper_from(g, a, ledger, &fams, params.steer_filler, &o).map_err(|e| supply(STAGE, "filler clique", e))?;
        ledger.push(built, 3);
    }
    rec.deleted = ledger.stage_len(3);
    ledger_checks(g, a, ledger, a.k, &mut rec);
    row_checks(a, ledger, a.extremal_row(), &mut rec);
    let uncovered: Vec<usize> = a.bad_set().into_iter().filter(|&v| !ledger.used().contains(v)).collect();
    rec.check(Check::BadCovered, uncovered.is_empty(), format!("uncovered {uncovered:?}"));
    let rest = total_cliques(a) - ledger.len();
    rec.check(Check::Divisibility, rest % m == 0, format!("{rest} cliques left, modulus {m}"));
    rec.verdict()
}

/// M_4: equalize the deleted counts over the classes with C′ + N′_A − N_A
/// cliques of each index A.
pub fn balance_columns(
    g: &MultipartiteGraph,
    a: &BlockAssignment,
    ledger: &mut DeletionLedger,
    params: &Params,
) -> Result<StageRecord, PipelineError> {
    const STAGE: &str = "M4";
    let mut rec = StageRecord::new("balance_columns");
    let o = opts(params);
    let (r, k) = (a.r, a.k);
    let counts = ledger.class_counts(g);
    let deleted = k * ledger.len();
    if deleted % r != 0 {
        return Err(PipelineError::Divisibility { stage: STAGE.into(), detail: format!("{deleted} deleted vertices not divisible by r") });
    }
    let dev: Vec<i64> = counts.iter().map(|&c| c as i64 - (deleted / r) as i64).collect();
    rec.notes.push(format!("column deviations {dev:?}"));
    let over: Vec<usize> = (0..r).flat_map(|j| std::iter::repeat(j).take(dev[j].max(0) as usize)).collect();
    let under: Vec<usize> = (0..r).flat_map(|j| std::iter::repeat(j).take((-dev[j]).max(0) as usize)).collect();
    let mut net: BTreeMap<Vec<usize>, i64> = (0..r).combinations(k).map(|c| (c, 0)).collect();
    for (&jq, &jq2) in over.iter().zip(&under) {
        let aq = (0..r).combinations(k).find(|c| c.contains(&jq) && !c.contains(&jq2)).expect("k < r when columns differ");
        let aq2: Vec<usize> = aq.iter().map(|&j| if j == jq { jq2 } else { j }).sorted().collect();
        *net.get_mut(&aq).expect("index") -= 1;
        *net.get_mut(&aq2).expect("index") += 1;
    }
    // C′ multiple of step / gcd(step, C(r, k)).
    let step = multiple_step(a, params);
    let per = step / step.gcd(&binomial(r, k));
    let floor = net.values().map(|&x| -x).max().unwrap_or(0).max(0) as usize;
    let c1 = floor.div_ceil(per) * per;
    rec.notes.push(format!("C′ = {c1}"));
    let fams = families(r, &a.weights);
    for (index, &x) in &net {
        let want = (c1 as i64 + x) as usize;
        let fams_a: Vec<Vec<Vec<usize>>> = fams.iter().filter(|f| f.concat().into_iter().sorted().eq(index.iter().copied())).cloned().collect();
        for _ in 0..want {
            let built = proper_from(g, a, ledger, &fams_a, params.steer_filler, &o)
                .map_err(|e| supply(STAGE, &format!("clique of index {index:?}"), e))?;
            ledger.push(built, 4);
        }
    }
    rec.deleted = ledger.stage_len(4);
    ledger_checks(g, a, ledger, k, &mut rec);
    row_checks(a, ledger, a.extremal_row(), &mut rec);
    let counts = ledger.class_counts(g);
    rec.check(Check::ColumnEquality, counts.iter().all_equal(), format!("deleted per class {counts:?}"));
    rec.check(Check::MultipleOfUnit, rec.deleted % step == 0, format!("|M4| = {}, step {step}", rec.deleted));
    let m = modulus(a, params);
    let rest = total_cliques(a) - ledger.len();
    rec.check(Check::Divisibility, rest % m == 0, format!("{rest} cliques left, modulus {m}"));
    rec.verdict()
}

/// Write Q as a sum of matrices Q^{abcd} (+1 at (a,b), (c,d); −1 at (a,d),
/// (c,b)), always eliminating the first positive entry against the first
/// negative entries in its row and column.
pub fn decompose_deviation(q: &[Vec<i64>]) -> Result<Vec<(usize, usize, usize, usize)>, PipelineError> {
    let mut q: Vec<Vec<i64>> = q.to_vec();
    let mut out = Vec::new();
    loop {
        let Some((a, b)) = q.iter().enumerate().find_map(|(i, row)| row.iter().position(|&x| x > 0).map(|j| (i, j))) else {
            if q.iter().flatten().any(|&x| x != 0) {
                return Err(PipelineError::Stuck(q));
            }
            return Ok(out);
        };
        let d = q[a].iter().position(|&x| x < 0);
        let c = q.iter().position(|row| row[b] < 0);
        let (Some(c), Some(d)) = (c, d) else { return Err(PipelineError::Stuck(q)) };
        q[a][b] -= 1;
        q[c][d] -= 1;
        q[a][d] += 1;
        q[c][b] += 1;
        out.push((a, b, c, d));
    }
}

/// M_5: make every remaining block exactly p_i·n′; returns the final blocks
/// as a row decomposition with unit n′.
pub fn balance_blocks(
    g: &MultipartiteGraph,
    a: &BlockAssignment,
    ledger: &mut DeletionLedger,
    params: &Params,
) -> Result<(StageRecord, RowDecomposition), PipelineError> {
    const STAGE: &str = "M5";
    let mut rec = StageRecord::new("balance_blocks");
    let o = opts(params);
    let (r, s) = (a.r, a.s());
    let sizes = a.remaining_sizes(ledger.used());
    let d = total_cliques(a) - ledger.len();
    if d % r != 0 {
        return Err(PipelineError::Divisibility { stage: STAGE.into(), detail: format!("D = {d} not divisible by r") });
    }
    let q: Vec<Vec<i64>> = (0..s).map(|i| (0..r).map(|j| sizes[i][j] as i64 - (a.weights[i] * d / r) as i64).collect()).collect();
    rec.notes.push(format!("deviation matrix {q:?}"));
    let moves = decompose_deviation(&q)?;
    let fams = families(r, &a.weights);
    let index_of: BTreeMap<&Vec<Vec<usize>>, usize> = fams.iter().enumerate().map(|(x, f)| (f, x)).collect();
    let mut net = vec![0i64; fams.len()];
    for &(qa, qb, qc, qd) in &moves {
        let f = fams.iter().find(|f| f[qa].contains(&qb) && f[qc].contains(&qd)).expect("a family places b in row a and d in row c");
        let mut f2 = f.clone();
        f2[qa] = f[qa].iter().map(|&j| if j == qb { qd } else { j }).sorted().collect();
        f2[qc] = f[qc].iter().map(|&j| if j == qd { qb } else { j }).sorted().collect();
        net[index_of[f]] += 1;
        net[index_of[&f2]] -= 1;
    }
    let step = multiple_step(a, params);
    let per = step / step.gcd(&fams.len());
    let floor = net.iter().map(|&x| -x).max().unwrap_or(0).max(0) as usize;
    let c2 = floor.div_ceil(per) * per;
    rec.notes.push(format!("{} elementary moves, C″ = {c2}", moves.len()));
    for (x, fam) in fams.iter().enumerate() {
        let want = (c2 as i64 + net[x]) as usize;
        for _ in 0..want {
            let built = building_block(g, a, &BuildingKind::Proper { family: fam.clone() }, ledger.used(), &o)
                .map_err(|e| supply(STAGE, &format!("clique of family {fam:?}"), e))?;
            ledger.push(built, 5);
        }
    }
    rec.deleted = ledger.stage_len(5);
    ledger_checks(g, a, ledger, a.k, &mut rec);
    row_checks(a, ledger, a.extremal_row(), &mut rec);
    rec.check(Check::MultipleOfUnit, rec.deleted % step == 0, format!("|M5| = {}, step {step}", rec.deleted));
    let blocks: Vec<Vec<Vec<usize>>> = a
        .blocks
        .iter()
        .map(|row| row.iter().map(|b| b.iter().copied().filter(|&v| !ledger.used().contains(v)).collect()).collect())
        .collect();
    let rest = total_cliques(a) - ledger.len();
    let n_prime = rest / r;
    let unit = params.unit(r, a.k);
    let proportional = rest % r == 0 && blocks.iter().zip(&a.weights).all(|(row, &p)| row.iter().all(|b| b.len() == p * n_prime));
    rec.check(Check::BlockProportional, proportional, format!("n′ = {n_prime}"));
    rec.check(Check::Divisibility, n_prime % unit == 0, format!("n′ = {n_prime}, unit {unit}"));
    let covered = a.bad_set().into_iter().all(|v| ledger.used().contains(v));
    rec.check(Check::BadCovered, covered, "every bad vertex deleted".into());
    let dec = RowDecomposition { unit: n_prime, weights: a.weights.clone(), blocks };
    let (ok, worst) = diagonal_audit(g, &dec, params);
    rec.check(Check::DiagonalDegree, ok, format!("largest diagonal deficit {worst} (allowed α·n′)"));
    Ok((rec.verdict()?, dec))
}

/// Every vertex of X′^i_j has at least p_{i'}n′ − αn′ neighbours in each
/// X′^{i'}_{j'} with i' ≠ i, j' ≠ j. Returns the result and the largest
/// deficit p_{i'}n′ − |N(v) ∩ X′^{i'}_{j'}| seen.
pub(crate) fn diagonal_audit(g: &MultipartiteGraph, dec: &RowDecomposition, params: &Params) -> (bool, usize) {
    let n = dec.unit;
    let mut worst = 0;
    for (i, row) in dec.blocks.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            for &v in b {
                for (i2, row2) in dec.blocks.iter().enumerate().filter(|&(i2, _)| i2 != i) {
                    for (_, b2) in row2.iter().enumerate().filter(|&(j2, _)| j2 != j) {
                        let deficit = dec.weights[i2] * n - g.degree_into_slice(v, b2);
                        worst = worst.max(deficit);
                    }
                }
            }
        }
    }
    let (num, den) = (*params.alpha.numer(), *params.alpha.denom());
    ((worst as i64) * den <= num * n as i64, worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deviation_decomposes_exactly() {
        let q = vec![vec![1, -1, 0, 0], vec![-1, 2, 0, -1], vec![0, -1, 0, 1]];
        let moves = decompose_deviation(&q).unwrap();
        let mut sum = vec![vec![0i64; 4]; 3];
        for (a, b, c, d) in &moves {
            sum[*a][*b] += 1;
            sum[*c][*d] += 1;
            sum[*a][*d] -= 1;
            sum[*c][*b] -= 1;
        }
        assert_eq!(sum, q);
        assert_eq!(moves.len(), 2);
    }

    #[test]
    fn nonzero_margins_are_stuck() {
        assert!(matches!(decompose_deviation(&[vec![1, 0], vec![0, 0]]), Err(PipelineError::Stuck(_))));
    }
}
