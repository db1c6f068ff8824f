//! Capacity constants, symmetric marginals and randomized construction of
//! k-colored sum-free sets in `Z_m^n`, plus the oracles that check them.
//!
//! Everything here is `no_std` with `alloc`. File formats and the command
//! line live in the `sumfree` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod compositions;
pub mod construction;
pub mod distributions;
pub mod error;
pub mod marginal_decomposition;
pub mod rng;
pub mod rounding;
pub mod scalar;
pub mod verification;

pub use error::{Error, Result};
pub use scalar::{Rational, Weight};
