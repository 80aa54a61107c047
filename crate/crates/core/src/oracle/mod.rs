//! Exact reference checks: brute-force packing search, canonical forms and
//! the theorem-boundary harness.

mod boundary;
mod brute;
mod canon;
pub mod generate;

pub use boundary::{verify_theorem_boundary, BoundaryMode, BoundaryReport, InstanceVerdict, EXHAUSTIVE_MAX_PAIRS};
pub use brute::{brute_force_multigraphic, brute_force_packing, OracleReport, OracleVerdict, ORACLE_MAX_VERTICES};
pub use canon::{are_isomorphic, canonical_form, is_isomorphic_to_gamma, CanonicalForm};
