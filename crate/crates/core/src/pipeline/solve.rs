use itertools::Itertools;
use petgraph::graph::UnGraph;
use serde::{Deserialize, Serialize};

use super::assignment::{classify_bad_vertices, BlockAssignment};
use super::glue::{glue_rows, GlueReport};
use super::rows::{fix_row_parity_and_matchability, RowPackings};
use super::stages::{
    balance_blocks, balance_columns, balance_rows, cover_and_divisibility, prepare_multirow, DeletionLedger, RowCase,
    StageRecord,
};
use super::{Params, PipelineError};
use crate::graph::{build_gamma, degree_threshold, partite_min_degree, CliquePacking, MultipartiteGraph};
use crate::matching::{exact_balanced_clique_packing, ExactOutcome};
use crate::oracle::{brute_force_packing, is_isomorphic_to_gamma, OracleVerdict, ORACLE_MAX_VERTICES};
use crate::structure::{is_pair_complete, iterate_decomposition, Detection, DetectOptions, RowDecomposition};

/// A row decomposition of the kept vertices (vertices outside it count as
/// bad) and, for every pair-complete row of weight 2, one half per class.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineInput {
    pub k: usize,
    pub decomposition: RowDecomposition,
    pub halves: Vec<Option<Vec<Vec<usize>>>>,
}

/// Everything one pipeline run produced, up to the first failure.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineRun {
    pub stages: Vec<StageRecord>,
    pub row_case: Option<RowCase>,
    pub assignment: Option<BlockAssignment>,
    pub ledger: Option<DeletionLedger>,
    pub rows: Option<RowPackings>,
    pub glue: Option<GlueReport>,
    pub packing: Option<CliquePacking>,
    #[serde(skip)]
    pub error: Option<PipelineError>,
}

impl PipelineRun {
    fn failed(mut self, e: PipelineError) -> Self {
        self.error = Some(e);
        self
    }
}

/// Classify, delete M_1..M_5, pack the rows, glue them and check the result.
pub fn run_pipeline(g: &MultipartiteGraph, input: &PipelineInput, params: &Params) -> PipelineRun {
    let mut run = PipelineRun {
        stages: Vec::new(),
        row_case: None,
        assignment: None,
        ledger: None,
        rows: None,
        glue: None,
        packing: None,
        error: None,
    };
    let a = match classify_bad_vertices(g, &input.decomposition, &input.halves, params) {
        Ok(a) => a,
        Err(e) => return run.failed(e),
    };
    run.assignment = Some(a.clone());
    let mut ledger = DeletionLedger::new(g.vertex_count());

    macro_rules! stage {
        ($e:expr) => {
            match $e {
                Ok(x) => x,
                Err(e) => {
                    run.ledger = Some(ledger);
                    return run.failed(e);
                }
            }
        };
    }

    let (rec, case) = stage!(balance_rows(g, &a, &mut ledger, params));
    run.stages.push(rec);
    run.row_case = Some(case);
    let rec = stage!(prepare_multirow(g, &a, &mut ledger, params));
    run.stages.push(rec);
    let rec = stage!(cover_and_divisibility(g, &a, &mut ledger, params));
    run.stages.push(rec);
    let rec = stage!(balance_columns(g, &a, &mut ledger, params));
    run.stages.push(rec);
    let (rec, dec) = stage!(balance_blocks(g, &a, &mut ledger, params));
    run.stages.push(rec);
    let rows = stage!(fix_row_parity_and_matchability(g, &a, &dec, &mut ledger, params));
    let glue = stage!(glue_rows(g, &rows.blocks, &rows.packings, params.budget));
    let mut packing = CliquePacking::new(ledger.cliques.iter().map(|c| c.clique.clone()).collect());
    packing.extend(glue.packing.clone());
    let packing = packing.normalized();
    run.rows = Some(rows);
    run.glue = Some(glue);
    run.ledger = Some(ledger);
    if !packing.is_perfect_packing(g, input.k) {
        let v = packing.violations(g, input.k, true);
        return run.failed(PipelineError::Graph(format!("assembled packing fails verification: {v:?}")));
    }
    run.packing = Some(packing);
    run
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// A verified perfect packing.
    Packed,
    /// Isomorphic to the extremal graph, with no perfect packing.
    Extremal,
    /// Neither; see the diagnosis.
    Diagnosis,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Packed => 0,
            Status::Extremal => 2,
            Status::Diagnosis => 3,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub status: Status,
    pub packing: Option<CliquePacking>,
    pub stages: Vec<StageRecord>,
    pub diagnosis: Option<String>,
    /// Which solver produced the verdict.
    pub route: String,
    /// A search completed and found no perfect packing.
    pub proven_absent: bool,
}

impl SolveOutcome {
    /// Some(true) for a packing, Some(false) when absence is proven.
    pub fn exists(&self) -> Option<bool> {
        match self.status {
            Status::Packed => Some(true),
            Status::Extremal => Some(false),
            Status::Diagnosis if self.proven_absent => Some(false),
            Status::Diagnosis => None,
        }
    }

    fn packed(packing: CliquePacking, route: &str, stages: Vec<StageRecord>) -> Self {
        SolveOutcome { status: Status::Packed, packing: Some(packing), stages, diagnosis: None, route: route.into(), proven_absent: false }
    }
}

/// Verdict for a graph with no perfect packing: extremal when it is the
/// extremal graph with an odd number rn/k of cliques to place.
fn absent(g: &MultipartiteGraph, k: usize, route: &str, stages: Vec<StageRecord>, proven: bool, detail: String) -> SolveOutcome {
    let n = g.uniform_class_size().unwrap_or(0);
    let odd = build_gamma(n, g.r(), k).map(|x| x.no_perfect_packing).unwrap_or(false);
    // The parity argument rules out a packing of the extremal graph itself.
    if odd && is_isomorphic_to_gamma(g, k) {
        return SolveOutcome {
            status: Status::Extremal,
            packing: None,
            stages,
            diagnosis: Some(format!("isomorphic to the extremal graph with rn/k = {} odd", g.r() * n / k)),
            route: route.into(),
            proven_absent: true,
        };
    }
    SolveOutcome { status: Status::Diagnosis, packing: None, stages, diagnosis: Some(detail), route: route.into(), proven_absent: proven }
}

fn check_preconditions(g: &MultipartiteGraph, k: usize) -> Result<usize, PipelineError> {
    let r = g.r();
    let n = g.uniform_class_size().ok_or_else(|| PipelineError::Precondition("classes differ in size".into()))?;
    if k < 2 || k > r {
        return Err(PipelineError::Precondition(format!("need 2 ≤ k ≤ r, got k = {k}, r = {r}")));
    }
    if n == 0 || (r * n) % k != 0 {
        return Err(PipelineError::Precondition(format!("k = {k} does not divide r·n = {}", r * n)));
    }
    let (have, need) = (partite_min_degree(g), degree_threshold(n, k));
    if have < need {
        return Err(PipelineError::Precondition(format!("partite minimum degree {have} below ⌈(k−1)n/k⌉ = {need}")));
    }
    Ok(n)
}

/// Perfect matching of the whole graph via a general maximum matching.
fn solve_matching(g: &MultipartiteGraph) -> SolveOutcome {
    let mut h: UnGraph<(), ()> = UnGraph::default();
    let nodes: Vec<_> = (0..g.vertex_count()).map(|_| h.add_node(())).collect();
    for (u, v) in g.edges() {
        h.add_edge(nodes[u], nodes[v], ());
    }
    let m = petgraph::algo::maximum_matching(&h);
    if m.is_perfect() {
        let edges = m.edges().map(|(x, y)| vec![x.index().min(y.index()), x.index().max(y.index())]).collect();
        return SolveOutcome::packed(CliquePacking::new(edges).normalized(), "matching", Vec::new());
    }
    let size = m.edges().count();
    absent(g, 2, "matching", Vec::new(), true, format!("maximum matching has {size} of {} edges", g.vertex_count() / 2))
}

enum Search {
    Found(CliquePacking),
    Absent,
    Unknown,
}

fn exact_search(g: &MultipartiteGraph, k: usize, budget: u64) -> Result<Search, PipelineError> {
    Ok(match exact_balanced_clique_packing(g, k, false, budget)?.outcome {
        ExactOutcome::Found(p) => Search::Found(p.normalized()),
        ExactOutcome::Absent => Search::Absent,
        ExactOutcome::BudgetExhausted => Search::Unknown,
    })
}

fn oracle_search(g: &MultipartiteGraph, k: usize, budget: u64) -> Search {
    if g.vertex_count() > ORACLE_MAX_VERTICES {
        return Search::Unknown;
    }
    match brute_force_packing(g, k, budget).verdict {
        OracleVerdict::Found(p) => Search::Found(p.normalized()),
        OracleVerdict::Absent => Search::Absent,
        OracleVerdict::BudgetExhausted => Search::Unknown,
    }
}

/// Build the pipeline input: keep the first k·⌊n⁺/k⌋ vertices of every
/// class, decompose them into rows and find halves of pair-complete rows.
pub(crate) fn prepare_input(g: &MultipartiteGraph, k: usize, params: &Params) -> Result<PipelineInput, PipelineError> {
    let n_plus = g.uniform_class_size().ok_or_else(|| PipelineError::Precondition("classes differ in size".into()))?;
    let kept: Vec<usize> = (0..g.r()).flat_map(|c| g.class_range(c).take(k * (n_plus / k))).collect();
    let (sub, map) = g.induced(&kept);
    let opts = DetectOptions { seed: params.seed, ..params.detect };
    let rep = iterate_decomposition(&sub, k, &params.split_thresholds, &opts)?;
    let mut dec = rep.decomposition;
    for row in &mut dec.blocks {
        for b in row.iter_mut() {
            for v in b.iter_mut() {
                *v = map[*v];
            }
        }
    }
    let mut halves = vec![None; dec.rows()];
    for i in (0..dec.rows()).filter(|&i| dec.weights[i] == 2) {
        let (row, rmap) = g.induced(&dec.row_vertices(i));
        if let Detection::Found(w) = is_pair_complete(&row, params.d, &opts)? {
            halves[i] = Some(w.halves.iter().map(|h| h.iter().map(|&v| rmap[v]).sorted().collect()).collect());
        }
    }
    Ok(PipelineInput { k, decomposition: dec, halves })
}

/// Find a perfect K_k-packing, certify the extremal exception, or explain
/// why neither was reached. Returned packings are always verified.
pub fn solve(g: &MultipartiteGraph, k: usize, params: &Params) -> Result<SolveOutcome, PipelineError> {
    check_preconditions(g, k)?;
    let mut out = if k == 2 {
        solve_matching(g)
    } else if g.vertex_count() <= params.exact_vertices || (g.r() == 3 && k == 3) {
        match exact_search(g, k, params.budget)? {
            Search::Found(p) => SolveOutcome::packed(p, "exact", Vec::new()),
            Search::Absent => absent(g, k, "exact", Vec::new(), true, "exact search found no perfect packing".into()),
            Search::Unknown => fallback(g, k, params, Vec::new(), "exact search ran out of budget".into())?,
        }
    } else {
        let (stages, why) = match prepare_input(g, k, params) {
            Ok(input) => {
                let run = run_pipeline(g, &input, params);
                match (run.packing, run.error) {
                    (Some(p), _) => return Ok(SolveOutcome::packed(p, "pipeline", run.stages)),
                    (None, e) => (run.stages, e.map_or_else(|| "pipeline stopped".to_string(), |e| e.to_string())),
                }
            }
            Err(e) => (Vec::new(), e.to_string()),
        };
        fallback(g, k, params, stages, format!("pipeline: {why}"))?
    };
    if let Some(p) = &out.packing {
        if !p.is_perfect_packing(g, k) {
            out = SolveOutcome {
                status: Status::Diagnosis,
                packing: None,
                stages: out.stages,
                diagnosis: Some(format!("{} returned a packing that fails verification", out.route)),
                route: out.route,
                proven_absent: false,
            };
        }
    }
    Ok(out)
}

/// Exact search, then the brute-force oracle, then give up with `why`.
fn fallback(g: &MultipartiteGraph, k: usize, params: &Params, stages: Vec<StageRecord>, why: String) -> Result<SolveOutcome, PipelineError> {
    match exact_search(g, k, params.budget)? {
        Search::Found(p) => return Ok(SolveOutcome::packed(p, "exact fallback", stages)),
        Search::Absent => return Ok(absent(g, k, "exact fallback", stages, true, format!("{why}; exact search found no perfect packing"))),
        Search::Unknown => {}
    }
    Ok(match oracle_search(g, k, params.budget) {
        Search::Found(p) => SolveOutcome::packed(p, "oracle fallback", stages),
        Search::Absent => absent(g, k, "oracle fallback", stages, true, format!("{why}; oracle found no perfect packing")),
        Search::Unknown => absent(g, k, "none", stages, false, format!("{why}; exact searches ran out of budget")),
    })
}
