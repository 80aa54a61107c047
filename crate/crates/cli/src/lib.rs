//! Commands behind the `cliquetile` binary. Each returns the text to write
//! and the process exit code.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cliquetile::graph::io::{graph_from_json, graph_to_json, PackingDoc};
use cliquetile::graph::{build_gamma, degree_threshold, MultipartiteGraph, PackingViolation, PartitionLabeling};
use cliquetile::oracle::generate::{divisibility_barrier, planted_rows, random_dense, space_barrier};
use cliquetile::oracle::{verify_theorem_boundary, BoundaryMode};
use cliquetile::pipeline::{solve, Params, Status};
use cliquetile::structure::{diagnose_barriers, iterate_decomposition, BarrierThresholds, DetectMode, DetectOptions};
use cliquetile::{parse_rational, Rational};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Input(String),
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("expected a rational \"num/den\", got {s:?}"))
}

#[derive(Parser, Debug)]
#[command(name = "cliquetile", about = "Perfect K_k-packings of dense r-partite graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an instance as graph JSON.
    Gen(GenArgs),
    /// Run the structure detectors on a graph.
    Detect(DetectArgs),
    /// Find a perfect K_k-packing (exit 0), certify the extremal graph (2) or
    /// report a diagnosis (3).
    Solve(SolveArgs),
    /// Check a packing file against a graph.
    Verify(VerifyArgs),
    /// Compare the oracle with the degree threshold over many graphs.
    Harness(HarnessArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Gamma,
    Random,
    Blowup,
    Barrier,
    Planted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BarrierKind {
    Space,
    Divisibility,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Heuristic,
    Auto,
}

impl From<Mode> for DetectMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => DetectMode::Exact,
            Mode::Heuristic => DetectMode::Heuristic,
            Mode::Auto => DetectMode::Auto,
        }
    }
}

#[derive(Args, Debug)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 3)]
    pub r: usize,
    /// Class size (gamma, random), block unit (barrier, planted).
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Random: partite degree floor; defaults to ⌈(k−1)n/k⌉.
    #[arg(long)]
    pub min_degree: Option<usize>,
    #[arg(long, value_enum, default_value_t = BarrierKind::Space)]
    pub barrier: BarrierKind,
    /// Space barrier: S meets every class in j of p parts (p = --k).
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    /// Divisibility barrier: move one vertex across the halves.
    #[arg(long)]
    pub odd: bool,
    /// Blowup: graph to blow up.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub factor: usize,
    /// Planted: row weights, e.g. "2,1".
    #[arg(long, value_delimiter = ',', default_value = "1,1,1")]
    pub weights: Vec<usize>,
    /// Planted: edge probability as "num/den".
    #[arg(long, value_parser = rational, default_value = "19/20")]
    pub density: Rational,
    /// Planted: rows (weight 2) whose halves have no edges between them.
    #[arg(long, value_delimiter = ',')]
    pub pair_complete: Vec<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct Thresholds {
    #[arg(long = "threshold-d", value_parser = rational, default_value = "1/100")]
    pub d: Rational,
    #[arg(long = "threshold-beta", value_parser = rational, default_value = "1/50")]
    pub beta: Rational,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    pub mode: Mode,
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub thresholds: Thresholds,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Node budget of every exact search.
    #[arg(long, default_value_t = 2_000_000)]
    pub budget: u64,
    #[command(flatten)]
    pub thresholds: Thresholds,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Graph JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// Packing JSON, or a solve result holding one.
    #[arg(long)]
    pub packing: PathBuf,
    /// Clique size; taken from the first clique when omitted.
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct HarnessArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
    /// Random graphs to test; 0 enumerates every graph.
    #[arg(long, default_value_t = 0)]
    pub sample: usize,
    #[arg(long, default_value_t = 2_000_000)]
    pub budget: u64,
    #[command(flatten)]
    pub common: Common,
}

pub struct Outcome {
    pub text: String,
    pub code: i32,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load_graph(path: &Path) -> Result<(MultipartiteGraph, Option<PartitionLabeling>), CliError> {
    graph_from_json(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let tmp = dir.join(format!(".{}.tmp", path.file_name().and_then(|s| s.to_str()).unwrap_or("out")));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(text.as_bytes()).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

pub fn run(cli: Cli) -> Result<(Outcome, Option<PathBuf>), CliError> {
    match cli.command {
        Command::Gen(a) => {
            let out = a.common.output.clone();
            Ok((cmd_gen(&a)?, out))
        }
        Command::Detect(a) => {
            let out = a.common.output.clone();
            Ok((cmd_detect(&a)?, out))
        }
        Command::Solve(a) => {
            let out = a.common.output.clone();
            Ok((cmd_solve(&a)?, out))
        }
        Command::Verify(a) => {
            let out = a.common.output.clone();
            Ok((cmd_verify(&a)?, out))
        }
        Command::Harness(a) => {
            let out = a.common.output.clone();
            Ok((cmd_harness(&a)?, out))
        }
    }
}

fn input_error(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

pub fn cmd_gen(a: &GenArgs) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
    let (g, labels) = match a.kind {
        GenKind::Gamma => {
            let inst = build_gamma(a.n, a.r, a.k).map_err(input_error)?;
            (inst.graph, Some(inst.labeling))
        }
        GenKind::Random => {
            if a.k == 0 {
                return Err(CliError::Usage("--k must be positive".into()));
            }
            let floor = a.min_degree.unwrap_or_else(|| degree_threshold(a.n, a.k));
            (random_dense(a.r, a.n, floor, &mut rng), None)
        }
        GenKind::Blowup => {
            let path = a.input.as_ref().ok_or_else(|| CliError::Usage("blowup needs --input".into()))?;
            let (g, labels) = load_graph(path)?;
            let big = g.blow_up(a.factor).map_err(input_error)?;
            let labels = match labels {
                Some(l) => {
                    let parts = (0..big.vertex_count())
                        .map(|v| {
                            let x = big.vertex(v);
                            let orig = g.id(cliquetile::graph::Vertex::new(x.class, x.offset / a.factor)).expect("blow-up vertex");
                            l.part_of(orig)
                        })
                        .collect();
                    Some(PartitionLabeling::new(l.d(), parts).map_err(input_error)?)
                }
                None => None,
            };
            (big, labels)
        }
        GenKind::Barrier => match a.barrier {
            BarrierKind::Space => (space_barrier(a.r, a.k, a.j, a.n).map_err(input_error)?.0, None),
            BarrierKind::Divisibility => {
                let (g, l) = divisibility_barrier(a.r, a.n, a.odd).map_err(input_error)?;
                (g, Some(l))
            }
        },
        GenKind::Planted => {
            let (g, _, _) = planted_rows(a.r, &a.weights, a.n, a.density, &a.pair_complete, &mut rng).map_err(input_error)?;
            (g, None)
        }
    };
    Ok(Outcome { text: graph_to_json(&g, labels.as_ref()), code: EXIT_OK })
}

fn detect_options(t: &Thresholds, seed: u64) -> DetectOptions {
    DetectOptions { mode: t.mode.into(), seed, ..DetectOptions::default() }
}

#[derive(Serialize)]
struct DetectOutput {
    barriers: cliquetile::structure::BarrierReport,
    decomposition: Option<cliquetile::structure::DecompositionReport>,
}

pub fn cmd_detect(a: &DetectArgs) -> Result<Outcome, CliError> {
    let (g, _) = load_graph(&a.input)?;
    let opts = detect_options(&a.thresholds, a.common.seed);
    let m = g.uniform_class_size().ok_or_else(|| CliError::Input("classes differ in size".into()))?;
    let floor = (m / a.k.max(1)).max(1);
    let th = BarrierThresholds::new(a.thresholds.d, a.thresholds.beta, floor);
    let barriers = diagnose_barriers(&g, a.k, &th, &opts).map_err(input_error)?;
    let decomposition = iterate_decomposition(&g, a.k, &Params::default().split_thresholds, &opts).ok();
    Ok(Outcome { text: json(&DetectOutput { barriers, decomposition }), code: EXIT_OK })
}

#[derive(Serialize)]
struct SolveOutput {
    status: Status,
    packing: Option<PackingDoc>,
    stages: Vec<cliquetile::pipeline::StageRecord>,
    diagnosis: Option<String>,
    route: String,
}

pub fn cmd_solve(a: &SolveArgs) -> Result<Outcome, CliError> {
    let (g, _) = load_graph(&a.input)?;
    let params = Params {
        d: a.thresholds.d,
        beta: a.thresholds.beta,
        budget: a.budget,
        seed: a.common.seed,
        detect: detect_options(&a.thresholds, a.common.seed),
        ..Params::default()
    };
    let out = solve(&g, a.k, &params).map_err(input_error)?;
    let code = out.status.exit_code();
    let doc = SolveOutput {
        status: out.status,
        packing: out.packing.as_ref().map(|p| PackingDoc::from_packing(&g, p)),
        stages: out.stages,
        diagnosis: out.diagnosis,
        route: out.route,
    };
    Ok(Outcome { text: json(&doc), code })
}

fn name(g: &MultipartiteGraph, v: usize) -> String {
    let x = g.vertex(v);
    format!("{}:{}", x.class, x.offset)
}

/// One line per violation, vertices written class:offset.
pub fn describe(g: &MultipartiteGraph, v: &PackingViolation) -> String {
    match *v {
        PackingViolation::WrongSize { clique, size } => format!("clique {clique} has {size} vertices"),
        PackingViolation::RepeatedClass { clique, class } => format!("clique {clique} uses class {class} twice"),
        PackingViolation::MissingEdge { clique, u, v } => format!("clique {clique} misses the edge {}–{}", name(g, u), name(g, v)),
        PackingViolation::UnknownVertex { clique, vertex } => format!("clique {clique} names unknown vertex {vertex}"),
        PackingViolation::Overlap { vertex } => format!("vertex {} lies in two cliques", name(g, vertex)),
        PackingViolation::Uncovered { vertex } => format!("vertex {} is not covered", name(g, vertex)),
    }
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let (g, _) = load_graph(&a.input)?;
    let raw: serde_json::Value = serde_json::from_str(&read(&a.packing)?).map_err(input_error)?;
    // A solve result wraps the packing.
    let body = match raw.get("packing") {
        Some(serde_json::Value::Null) => return Err(CliError::Input("solve result holds no packing".into())),
        Some(p) => p.clone(),
        None => raw,
    };
    let doc: PackingDoc = serde_json::from_value(body).map_err(input_error)?;
    let mut lines = Vec::new();
    let mut cliques = Vec::with_capacity(doc.cliques.len());
    for (i, c) in doc.cliques.iter().enumerate() {
        let mut ids = Vec::with_capacity(c.len());
        for &[class, offset] in c {
            match g.id(cliquetile::graph::Vertex::new(class, offset)) {
                Ok(v) => ids.push(v),
                Err(_) => lines.push(format!("clique {i} names unknown vertex {class}:{offset}")),
            }
        }
        cliques.push(ids);
    }
    let packing = cliquetile::graph::CliquePacking::new(cliques);
    let k = a.k.or_else(|| doc.cliques.first().map(Vec::len)).unwrap_or(0);
    lines.extend(packing.violations(&g, k, true).iter().map(|v| describe(&g, v)));
    if lines.is_empty() {
        Ok(Outcome { text: format!("ok: {} cliques of size {k} cover all {} vertices", packing.len(), g.vertex_count()), code: EXIT_OK })
    } else {
        Ok(Outcome { text: lines.join("\n"), code: EXIT_ERROR })
    }
}

pub fn cmd_harness(a: &HarnessArgs) -> Result<Outcome, CliError> {
    let mode = if a.sample == 0 { BoundaryMode::Exhaustive } else { BoundaryMode::Sample { count: a.sample, seed: a.common.seed } };
    let rep = verify_theorem_boundary(a.r, a.k, a.n, mode, a.budget).map_err(input_error)?;
    Ok(Outcome { text: json(&rep), code: EXIT_OK })
}
