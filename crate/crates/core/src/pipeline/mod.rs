//! Staged construction of a perfect K_k-packing: classify bad vertices,
//! delete balancing packings M_1..M_5, pack each row, then glue the rows.

mod assignment;
mod extend;
mod glue;
mod rows;
mod solve;
mod stages;

use num_integer::{binomial, Integer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GraphError;
use crate::matching::MatchingError;
use crate::structure::{DetectError, DetectOptions};
use crate::Rational;

pub use assignment::{bad_blocks, classify_bad_vertices, BadReason, BadVertex, BlockAssignment, VertexMove};
pub use extend::{building_block, extend_clique, families, BuildOptions, Built, BuildingKind, ExtendFailure, Tag};
pub use glue::{glue_rows, sigma_partition, GlueReport, SigmaLog};
pub use rows::{extend_surplus_matching, fix_row_parity_and_matchability, RowMethod, RowPackings, RowReport};
pub use solve::{run_pipeline, solve, PipelineInput, PipelineRun, SolveOutcome, Status};
pub use stages::{
    balance_blocks, balance_columns, balance_rows, cover_and_divisibility, decompose_deviation, prepare_multirow,
    Check, DeletionLedger, RowCase, StageRecord, StageRecount, SwapEvent, TaggedClique,
};

/// Thresholds and knobs of the pipeline, set for desk-scale instances.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Params {
    /// Minimum diagonal density tolerance of the row decomposition; also the
    /// pair-completeness threshold for rows of weight 2.
    #[serde(with = "crate::rational_serde")]
    pub d: Rational,
    /// Fraction standing in for √d in the bad-vertex rule: v is bad when it
    /// has at most (1 − bad_fraction)·p·n neighbours in a diagonal block.
    #[serde(with = "crate::rational_serde")]
    pub bad_fraction: Rational,
    #[serde(with = "crate::rational_serde")]
    pub beta: Rational,
    /// Diagonal degree tolerance audited on the final blocks.
    #[serde(with = "crate::rational_serde")]
    pub alpha: Rational,
    /// Tolerance handed to the pair-complete matching.
    #[serde(with = "crate::rational_serde")]
    pub zeta: Rational,
    /// Ascending split thresholds d_1, d_2, ... for the row decomposition.
    #[serde(with = "rational_list")]
    pub split_thresholds: Vec<Rational>,
    /// n′ must be a multiple of this; `None` picks the smallest value that
    /// keeps every row balance and the gluing split integral.
    pub unit_modulus: Option<usize>,
    /// Make |M_4| and |M_5| multiples of r·k·u rather than of r·u, which is
    /// all that divisibility of the remainder needs.
    pub strict_multiples: bool,
    /// Steer filler cliques towards the blocks that are furthest over.
    pub steer_filler: bool,
    /// ij-distributed cliques set aside per ordered pair of heavy rows.
    pub eta_count: usize,
    /// Node budget for every exact search.
    pub budget: u64,
    /// Node budget for one clique extension.
    pub extend_budget: u64,
    /// Instances with at most this many vertices go straight to exact search.
    pub exact_vertices: usize,
    /// Detector settings for the row decomposition and pair-completeness.
    pub detect: DetectOptions,
    pub seed: u64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            d: Rational::new(1, 100),
            bad_fraction: Rational::new(1, 4),
            beta: Rational::new(1, 50),
            alpha: Rational::new(1, 10),
            zeta: Rational::new(1, 4),
            split_thresholds: default_split_thresholds(8),
            unit_modulus: None,
            strict_multiples: false,
            steer_filler: true,
            eta_count: 1,
            budget: 2_000_000,
            extend_budget: 20_000,
            exact_vertices: 36,
            detect: DetectOptions::default(),
            seed: 0,
        }
    }
}

impl Params {
    pub fn unit(&self, r: usize, k: usize) -> usize {
        self.unit_modulus.unwrap_or_else(|| desk_unit_modulus(r, k))
    }

    /// Asymptotic settings: u = r! and the stronger multiples for M_4, M_5.
    pub fn literal(r: usize) -> Self {
        Params { unit_modulus: Some(factorial(r)), strict_multiples: true, ..Params::default() }
    }
}

/// 1/100, 1/10, 1/4, then (s − 1)/(2s) for s ≥ 4.
pub fn default_split_thresholds(count: usize) -> Vec<Rational> {
    (1..=count)
        .map(|s| match s {
            1 => Rational::new(1, 100),
            2 => Rational::new(1, 10),
            3 => Rational::new(1, 4),
            _ => Rational::new(s as i64 - 1, 2 * s as i64),
        })
        .collect()
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Least u such that n′ = u makes the gluing split N = r·n′·(r−k)!/r! and
/// every balanced row count r·n′/C(r, p) (p ≤ k) integral.
pub fn desk_unit_modulus(r: usize, k: usize) -> usize {
    let glue = factorial(r - 1) / factorial(r - k);
    (1..=k).fold(glue, |acc, p| {
        let c = binomial(r, p);
        acc.lcm(&(c / c.gcd(&r)))
    })
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("stage {stage}: {detail}")]
    Supply { stage: String, detail: String },
    #[error("stage {stage}: recount {check} failed")]
    Recount { stage: String, check: String },
    #[error("stage {stage}: {detail}")]
    Divisibility { stage: String, detail: String },
    #[error("deviation matrix cannot be decomposed: {0:?}")]
    Stuck(Vec<Vec<i64>>),
    #[error("no edge can fix the half parity; the graph is a candidate for the extremal structure")]
    CandidateExtremal,
    #[error("row {row}: {detail}")]
    Row { row: usize, proven_absent: bool, detail: String },
    #[error("gluing failed for σ = {sigma:?} (min degree {min_degree} of {possible}): {detail}")]
    Glue { sigma: Vec<usize>, min_degree: u64, possible: u64, detail: String },
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error("detection: {0}")]
    Detect(String),
    #[error("{0}")]
    Graph(String),
}

impl From<DetectError> for PipelineError {
    fn from(e: DetectError) -> Self {
        PipelineError::Detect(e.to_string())
    }
}

impl From<GraphError> for PipelineError {
    fn from(e: GraphError) -> Self {
        PipelineError::Graph(e.to_string())
    }
}

mod rational_list {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::Rational;

    pub fn serialize<S: Serializer>(qs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(qs.iter().map(|&q| crate::format_rational(q)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| crate::parse_rational(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}"))))
            .collect()
    }
}
