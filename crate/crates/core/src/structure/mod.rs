//! Extremal-structure detection: splittable and pair-complete witnesses,
//! iterated row decompositions, robust lattices and barrier diagnosis.

mod barrier;
mod decomposition;
mod detect;
mod lattice;
mod search;

pub use barrier::{diagnose_barriers, BarrierReport, BarrierThresholds, DivisibilityCandidate, SpaceCandidate};
pub use decomposition::{iterate_decomposition, min_diagonal_density, DecompositionReport, RowDecomposition, SplitEvent};
pub use detect::{
    is_pair_complete, is_splittable, pair_complete_densities, split_min_density, verify_pair_complete, verify_split,
    DetectMode, DetectOptions, Detection, PairCompleteWitness, SplitWitness,
};
pub use lattice::{incomplete_pairs, is_complete_wrt, merge_to_minimal, robust_edge_lattice, IntegerLattice, RobustLattice};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DetectError {
    #[error("classes have different sizes")]
    UnequalClasses,
    #[error("class size {class_size} is not divisible by {p}")]
    Indivisible { class_size: usize, p: usize },
    #[error("exact search is capped at class size {cap}, got {class_size}")]
    ExceedsCap { class_size: usize, cap: usize },
    #[error("need {needed} thresholds, got {got}")]
    MissingThresholds { needed: usize, got: usize },
}
