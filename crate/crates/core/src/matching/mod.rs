//! Constructive matching subroutines: multigraph realization, rectangle
//! transversals, bipartite matchings, even paths, pair-complete balanced
//! matchings, configuration flips and exact balanced packing search.

mod bipartite;
mod even_path;
mod exact;
mod flip;
mod hakimi;
mod pair_balanced;
mod transversal;

pub use bipartite::{maximum_matching, regular_bipartite_perfect_matching, BipartiteGraph, PerfectMatchingReport, Regularity};
pub use even_path::{even_path_between_copartners, is_even_copartner_path};
pub use exact::{exact_balanced_clique_packing, ExactOutcome, ExactReport};
pub use flip::{
    balance_order, discover_configurations, flip_balance, terminal_family, Configuration, FlipOutcome,
};
pub use hakimi::{is_multigraphic, realize_multigraph, DegreeSequence};
pub use pair_balanced::{pair_complete_balanced_matching, PairBalanced, PairBalancedOptions, PairRoute};
pub use transversal::{find_transversal, is_transversal, Rectangle};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("degree sequence {0:?} is not multigraphic")]
    NotMultigraphic(Vec<usize>),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("parity obstruction: |X| = {x_size} is odd and X cannot be matched internally")]
    ParityObstruction { x_size: usize },
    #[error("divisibility failure: {0}")]
    Divisibility(String),
    #[error("no admissible n' for class size {class_size} and zeta {zeta}")]
    Sizing { class_size: usize, zeta: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("need {needed} more configurations for index {index:?}, found {found}")]
    InsufficientConfigurations { index: Vec<usize>, patterns: Vec<(Vec<usize>, [usize; 4])>, needed: usize, found: usize },
    #[error("search failed ({}): {detail}", if *proven_absent { "proven absent" } else { "budget exhausted" })]
    SearchFailed { proven_absent: bool, detail: String },
    #[error("packing is not balanced: {0}")]
    Unbalanced(String),
}
