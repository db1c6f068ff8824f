//! Capacity constants, the geometric distribution `nu` and entropy/mean
//! utilities on finite scaled distributions.

use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{round_to_denominator, Rational, Weight};

pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub tol: f64,
}

impl Params {
    pub fn new(m: usize, k: usize) -> Result<Self> {
        Self::with(m, k, 0, DEFAULT_TOL)
    }

    pub fn with(m: usize, k: usize, n: usize, tol: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParams(format!("m must be at least 2, got {m}")));
        }
        if k < 3 {
            return Err(Error::InvalidParams(format!("k must be at least 3, got {k}")));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidParams(format!("tol must be positive, got {tol}")));
        }
        Ok(Params { m, k, n, tol })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityResult {
    pub gamma: f64,
    pub capacity: f64,
    pub entropy_nu: f64,
}

/// Nonnegative weights on `{0, ..., n}`, not necessarily normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledDistribution<T = f64> {
    weights: Vec<T>,
}

impl<T: Weight> ScaledDistribution<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParams("distribution needs at least one weight".into()));
        }
        for (index, w) in weights.iter().enumerate() {
            if w.is_negative() {
                return Err(Error::NegativeWeight { index, value: w.to_f64() });
            }
        }
        Ok(ScaledDistribution { weights })
    }

    pub fn zeros(support_max: usize) -> Self {
        ScaledDistribution { weights: alloc::vec![T::zero(); support_max + 1] }
    }

    /// Skips validation; callers guarantee nonnegativity.
    pub(crate) fn from_raw(weights: Vec<T>) -> Self {
        ScaledDistribution { weights }
    }

    pub fn support_max(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<T> {
        self.weights
    }

    /// Weight at `i`, zero beyond the support.
    pub fn at(&self, i: usize) -> T {
        self.weights.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn total(&self) -> T {
        self.weights.iter().fold(T::zero(), |acc, w| acc + w.clone())
    }

    pub fn first_moment(&self) -> T {
        self.weights
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, w)| acc + T::from_ratio(i as i64, 1) * w.clone())
    }

    /// `k * sum(i w(i)) - n * sum(w(i))`; zero exactly when the mean is `n/k`.
    pub fn mean_defect(&self, k: usize) -> T {
        let n = T::from_ratio(self.support_max() as i64, 1);
        T::from_ratio(k as i64, 1) * self.first_moment() - n * self.total()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|w| w.is_zero())
    }

    /// Largest index carrying positive weight.
    pub fn max_support(&self) -> Option<usize> {
        self.weights.iter().rposition(|w| w.is_positive())
    }

    pub fn mean(&self) -> f64 {
        self.first_moment().to_f64() / self.total().to_f64()
    }

    /// Entropy in nats of the normalized distribution.
    pub fn entropy(&self) -> f64 {
        let total = self.total().to_f64();
        self.weights
            .iter()
            .map(|w| plogp(w.to_f64() / total))
            .sum::<f64>()
    }

    pub fn to_f64(&self) -> ScaledDistribution<f64> {
        ScaledDistribution { weights: self.weights.iter().map(Weight::to_f64).collect() }
    }

    pub fn normalized(&self) -> Self {
        let total = self.total();
        ScaledDistribution { weights: self.weights.iter().map(|w| w.clone() / total.clone()).collect() }
    }
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * libm::log(p)
    } else {
        0.0
    }
}

/// Entropy in nats of a list of probabilities; `0 log 0 = 0`.
pub fn entropy(probs: &[f64]) -> Result<f64> {
    for (index, &p) in probs.iter().enumerate() {
        if p < 0.0 {
            return Err(Error::NegativeWeight { index, value: p });
        }
    }
    Ok(probs.iter().map(|&p| plogp(p)).sum())
}

pub fn mean(probs: &[f64]) -> Result<f64> {
    for (index, &p) in probs.iter().enumerate() {
        if p < 0.0 {
            return Err(Error::NegativeWeight { index, value: p });
        }
    }
    Ok(probs.iter().enumerate().map(|(i, &p)| i as f64 * p).sum())
}

fn gamma_poly(p: &Params, x: f64) -> f64 {
    let shift = (p.m - 1) as f64;
    (0..p.m).rev().fold(0.0, |acc, i| acc * x + ((p.k * i) as f64 - shift))
}

/// Root in (0, 1) of `sum_i (k i - (m-1)) x^i`.
///
/// The coefficients change sign once, so the root is unique and bisection
/// keeps a valid bracket. We bisect to machine precision, which is well
/// inside `p.tol`.
pub fn gamma_root(p: &Params) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    debug_assert!(gamma_poly(p, lo) < 0.0 && gamma_poly(p, hi) > 0.0);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = gamma_poly(p, mid);
        if v == 0.0 {
            return mid;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if -gamma_poly(p, lo) <= gamma_poly(p, hi) {
        lo
    } else {
        hi
    }
}

pub fn capacity(p: &Params) -> CapacityResult {
    let gamma = gamma_root(p);
    let sum: f64 = (0..p.m).map(|i| libm::pow(gamma, i as f64)).sum();
    let capacity = sum / libm::pow(gamma, (p.m - 1) as f64 / p.k as f64);
    let entropy_nu = nu(p).entropy();
    debug_assert!(libm::fabs(entropy_nu - libm::log(capacity)) <= 10.0 * p.tol.max(1e-13));
    CapacityResult { gamma, capacity, entropy_nu }
}

pub fn nu(p: &Params) -> ScaledDistribution<f64> {
    let gamma = gamma_root(p);
    let powers: Vec<f64> = (0..p.m).map(|i| libm::pow(gamma, i as f64)).collect();
    let sum: f64 = powers.iter().sum();
    ScaledDistribution::from_raw(powers.into_iter().map(|w| w / sum).collect())
}

/// `nu` as exact rationals with denominator `ceil(1/precision)` on indices
/// two and up; indices 0 and 1 absorb the rounding so that total mass is 1
/// and the mean is `(m-1)/k` exactly.
pub fn nu_rational(p: &Params, precision: f64) -> Result<ScaledDistribution<Rational>> {
    if !(precision > 0.0 && precision < 1.0) {
        return Err(Error::InvalidParams(format!("precision must lie in (0,1), got {precision}")));
    }
    let den = libm::ceil(1.0 / precision) as u64;
    let real = nu(p);
    let mut w: Vec<Rational> = alloc::vec![Rational::zero(); p.m];
    let mut tail_mass = Rational::zero();
    let mut tail_moment = Rational::zero();
    for i in 2..p.m {
        let r = round_to_denominator(real.weights()[i], den);
        tail_mass += r.clone();
        tail_moment += r.clone() * Rational::from_ratio(i as i64, 1);
        w[i] = r;
    }
    w[1] = Rational::from_ratio((p.m - 1) as i64, p.k as i64) - tail_moment;
    w[0] = Rational::one() - w[1].clone() - tail_mass;
    ScaledDistribution::new(w)
}
