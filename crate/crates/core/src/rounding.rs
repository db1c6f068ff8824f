//! Rounding a symmetric tensor to denominator `n` while keeping its
//! marginal consistent, and the empirical entropy gap of the result.

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::compositions::{canonical, maxent_with_marginals, SymmetricTensor};
use crate::distributions::ScaledDistribution;
use crate::error::{Error, Result};
use crate::scalar::{floor_to_multiple, int, Rational, Weight};

#[derive(Debug, Clone, PartialEq)]
pub struct RoundedPair {
    pub n: usize,
    pub tau_tilde: SymmetricTensor<Rational>,
    pub nu_n: ScaledDistribution<Rational>,
    /// `max_t |tau_tilde(t) - tau(t)|`.
    pub linf_gap: f64,
    /// Number of orbits of `tau_tilde` with weight zero.
    pub zero_orbits: usize,
}

/// Rounds every element that is not a permutation of `(r, 0, ..., 0)` down
/// to a multiple of `k/n` and spreads the leftover mass evenly over those
/// `k` permutations.
pub fn round_tau(tau: &SymmetricTensor<Rational>, n: usize) -> Result<RoundedPair> {
    let k = tau.arity();
    let r = tau.r();
    if n == 0 || n % k != 0 {
        return Err(Error::NotDivisible { n, k });
    }
    if !tau.total_mass().is_one() {
        return Err(Error::InvalidParams("tensor must be normalized".into()));
    }
    let step = Rational::new(k.into(), n.into());
    let corner = canonical(&{
        let mut t = alloc::vec![0u32; k];
        t[0] = r as u32;
        t
    });
    let mut rounded: Vec<(Vec<u32>, Rational)> = Vec::new();
    let mut used = Rational::zero();
    for (rep, w, size) in tau.orbits() {
        if *rep == corner {
            continue;
        }
        let v = floor_to_multiple(w, &step);
        used += v.clone() * int(size as i64);
        rounded.push((rep.clone(), v));
    }
    // r = 0 leaves a single constant element, so the corner orbit has size 1
    let corner_size = if r == 0 { 1 } else { k };
    let corner_weight = (Rational::one() - used) / int(corner_size as i64);
    if corner_weight.is_negative() {
        return Err(Error::Invariant("rounded mass exceeds one".into()));
    }
    rounded.push((corner, corner_weight));

    let tau_tilde = SymmetricTensor::from_orbits(r, k, rounded)?;
    let linf_gap = tau
        .orbits()
        .map(|(rep, w, _)| (tau_tilde.weight(rep) - w.clone()).abs().to_f64())
        .fold(0.0, f64::max);
    let zero_orbits = tau_tilde.orbits().filter(|(_, w, _)| w.is_zero()).count();
    let nu_n = tau_tilde.marginal();
    Ok(RoundedPair { n, tau_tilde, nu_n, linf_gap, zero_orbits })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyGapReport {
    pub entropy_rounded: f64,
    pub entropy_maxent: f64,
    /// `H(tau_0) - H(tau_tilde)`.
    pub gap: f64,
    /// `gap * n / ln n`.
    pub scaled_gap: f64,
}

/// Compares `tau_tilde` with the max-entropy tensor of the same marginal.
pub fn entropy_gap_report(pair: &RoundedPair, tol: f64) -> Result<EntropyGapReport> {
    let tau = &pair.tau_tilde;
    let maxent = maxent_with_marginals(&pair.nu_n.to_f64(), tau.r(), tau.arity(), tol)?;
    let entropy_rounded = tau.entropy();
    let entropy_maxent = maxent.entropy();
    let gap = entropy_maxent - entropy_rounded;
    let n = pair.n as f64;
    let scaled_gap = if n > 1.0 { gap * n / libm::log(n) } else { f64::NAN };
    Ok(EntropyGapReport { entropy_rounded, entropy_maxent, gap, scaled_gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{is_multiple_of, rat};
    use alloc::vec;

    #[test]
    fn uniform_is_unchanged() {
        let tau: SymmetricTensor<Rational> = SymmetricTensor::uniform(1, 3).unwrap();
        let pair = round_tau(&tau, 12).unwrap();
        assert_eq!(pair.tau_tilde, tau);
        assert_eq!(pair.linf_gap, 0.0);
        let report = entropy_gap_report(&pair, 1e-12).unwrap();
        assert!(report.gap.abs() < 1e-12);
    }

    #[test]
    fn rounds_down_to_step() {
        // (1,1,1) carries 0.35; the two other inner orbits share the rest
        let tau = SymmetricTensor::from_orbits(
            3,
            3,
            vec![(vec![1, 1, 1], rat(7, 20)), (vec![2, 1, 0], rat(13, 120)), (vec![3, 0, 0], rat(0, 1))],
        )
        .unwrap();
        assert!(tau.total_mass().is_one());
        let pair = round_tau(&tau, 12).unwrap();
        assert_eq!(pair.tau_tilde.weight(&[1, 1, 1]), rat(1, 4));
        assert_eq!(pair.tau_tilde.weight(&[2, 1, 0]), rat(0, 1));
        assert!(pair.tau_tilde.total_mass().is_one());
        for (_, w, _) in pair.tau_tilde.orbits() {
            assert!(is_multiple_of(w, &rat(1, 12)));
        }
        assert!(pair.nu_n.mean_defect(3).is_zero());
        assert!(round_tau(&tau, 10).is_err());
    }
}
