use alloc::string::String;
use thiserror::Error;

/// Which of the four tameness conditions failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TameCondition {
    Mean,
    Monotone,
    Boundary,
    Convexity,
}

impl core::fmt::Display for TameCondition {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            TameCondition::Mean => "(i) mean",
            TameCondition::Monotone => "(ii) monotone tail",
            TameCondition::Boundary => "(iii) boundary",
            TameCondition::Convexity => "(iv) convexity",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("negative weight {value} at index {index}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("arity must be at least 2, got {0}")]
    ArityTooSmall(usize),
    #[error("tensor is not symmetric")]
    NotSymmetric,
    #[error("fitting did not converge after {iterations} sweeps, l1 residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("not {n}-tame at recursion level {level}: condition {condition} fails")]
    NotTame {
        level: usize,
        n: usize,
        condition: TameCondition,
    },
    #[error("alpha(n={n}, k={k}, j={j}) out of range: {bound}")]
    AlphaRange {
        n: usize,
        k: usize,
        j: usize,
        bound: &'static str,
    },
    #[error("strictness margin {margin:e} below required {required:e}; use a finer rationalization")]
    InsufficientMargin { margin: f64, required: f64 },
    #[error("{n} is not divisible by {k}")]
    NotDivisible { n: usize, k: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime target {0:e} exceeds 2^62; use a smaller n")]
    PrimeTooLarge(f64),
    #[error("enumeration of {size} items exceeds cap {cap}; use a smaller n")]
    EnumerationCap { size: u128, cap: u128 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("internal invariant failed: {0}")]
    Invariant(String),
}

impl Error {
    /// True for errors caused by a size or iteration cap rather than bad input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::EnumerationCap { .. } | Error::NoConvergence { .. } | Error::PrimeTooLarge(_))
    }
}

pub type Result<T> = core::result::Result<T, Error>;
