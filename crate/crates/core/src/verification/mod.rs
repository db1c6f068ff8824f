//! Independent oracles for every structural fact the pipeline relies on.
//!
//! Checks return [`Checked`]: the outer `Result` rejects malformed input,
//! the inner one carries the verdict. A [`Violation`] names the offending
//! indices so the failure can be replayed.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Result;

pub mod census;
pub mod counting;
pub mod decomposition;
pub mod entropy;
pub mod linalg;
pub mod suites;
pub mod sumfree;

pub use census::{special_pair_census, Census};
pub use counting::{
    bounded_tuple_count, bounded_tuple_count_brute, lucas_identity_check, lucas_identity_check_m, sequence_count_checks,
    Classifier, LucasStats, SequenceCountReport, TupleCount,
};
pub use decomposition::{alpha_property_check, cone_membership, evaluate_atoms};
pub use entropy::{
    perturbation_entropy_check, subspace_entropy_check, subspace_entropy_check_symmetric, SubspaceEntropy, SubspaceSpec,
};
pub use linalg::{
    permutation_span_check, permutation_span_rank, prime_is_large, rank_identity_check, rank_mod_p, rational_rank,
    rational_rank_q, RankReport,
};
pub use suites::{run_suite, SuiteReport, SUITES};
pub use sumfree::{naive_scan, verify_progression_free, verify_sumfree, SumFreeReport};

/// Absolute slack on every real-valued inequality.
pub const CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    /// A diagonal tuple does not sum to zero.
    Diagonal,
    /// A mixed-index selection sums to zero.
    OffDiagonal,
    /// An entry lies outside `{0, ..., m-1}`.
    Range,
    ProgressionSolution,
    CountAboveBound,
    Lucas,
    Rank,
    SubspaceEntropy,
    AnchoredEntropy,
    SequenceCount,
    Perturbation,
    Span,
    Cone,
    Alpha,
    Rounding,
    /// Two implementations of the same quantity disagree.
    CrossCheck,
}

impl ViolationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ViolationKind::Diagonal => "diagonal",
            ViolationKind::OffDiagonal => "off_diagonal",
            ViolationKind::Range => "range",
            ViolationKind::ProgressionSolution => "progression_solution",
            ViolationKind::CountAboveBound => "count_above_bound",
            ViolationKind::Lucas => "lucas",
            ViolationKind::Rank => "rank",
            ViolationKind::SubspaceEntropy => "subspace_entropy",
            ViolationKind::AnchoredEntropy => "anchored_entropy",
            ViolationKind::SequenceCount => "sequence_count",
            ViolationKind::Perturbation => "perturbation",
            ViolationKind::Span => "span",
            ViolationKind::Cone => "cone",
            ViolationKind::Alpha => "alpha",
            ViolationKind::Rounding => "rounding",
            ViolationKind::CrossCheck => "cross_check",
        }
    }
}

impl core::fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub indices: Vec<usize>,
    pub detail: String,
}

impl Violation {
    pub fn new(kind: ViolationKind, indices: Vec<usize>, detail: String) -> Self {
        Violation { kind, indices, detail }
    }
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{} at {:?}: {}", self.kind, self.indices, self.detail)
    }
}

pub type Checked<T> = Result<core::result::Result<T, Violation>>;
