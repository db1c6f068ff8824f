//! Exact counts checked against their entropy and capacity bounds.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::{Checked, Violation, ViolationKind, CHECK_TOL};
use crate::construction::primes::{is_prime, prime_power};
use crate::distributions::{capacity, Params, ScaledDistribution};
use crate::error::{Error, Result};
use crate::scalar::Rational;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TupleCount {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// `|{a in {0..m-1}^n : sum(a) <= n(m-1)/k}|`.
    pub exact: u128,
    /// `capacity^n`.
    pub bound: f64,
}

impl TupleCount {
    pub fn check(&self) -> core::result::Result<(), Violation> {
        if self.exact as f64 <= self.bound * (1.0 + CHECK_TOL) {
            Ok(())
        } else {
            Err(Violation::new(
                ViolationKind::CountAboveBound,
                vec![self.n, self.m, self.k],
                format!("{} tuples exceed capacity^n = {}", self.exact, self.bound),
            ))
        }
    }
}

fn threshold(n: usize, m: usize, k: usize) -> usize {
    n * (m - 1) / k
}

/// Dynamic program over (coordinates placed, running sum).
pub fn bounded_tuple_count(n: usize, m: usize, k: usize) -> Result<TupleCount> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    let params = Params::new(m, k)?;
    let cap = threshold(n, m, k);
    let mut row = vec![0u128; cap + 1];
    row[0] = 1;
    for _ in 0..n {
        let mut next = vec![0u128; cap + 1];
        for (s, &c) in row.iter().enumerate().filter(|(_, c)| **c > 0) {
            for a in 0..m.min(cap + 1 - s) {
                next[s + a] = next[s + a]
                    .checked_add(c)
                    .ok_or_else(|| Error::InvalidParams(format!("count overflows u128 at n={n}, m={m}")))?;
            }
        }
        row = next;
    }
    let exact = row.iter().sum();
    let bound = libm::pow(capacity(&params).capacity, n as f64);
    Ok(TupleCount { n, m, k, exact, bound })
}

/// Enumerates all of `{0..m-1}^n`; for cross-checking small cases.
pub fn bounded_tuple_count_brute(n: usize, m: usize, k: usize) -> Result<u128> {
    let size = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > 1 << 24 {
        return Err(Error::EnumerationCap { size, cap: 1 << 24 });
    }
    let cap = threshold(n, m, k);
    let mut a = vec![0usize; n];
    let mut count = 0u128;
    loop {
        if a.iter().sum::<usize>() <= cap {
            count += 1;
        }
        let Some(d) = (0..n).rev().find(|&d| a[d] + 1 < m) else {
            return Ok(count);
        };
        a[d] += 1;
        a[d + 1..].iter_mut().for_each(|v| *v = 0);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LucasStats {
    pub m: u64,
    pub p: u64,
    pub k: usize,
    pub points: u64,
    pub terms: usize,
}

/// Exhaustive check over `Z_m^k`, `m = p^l <= 16`, of the binomial
/// expansion of the zero-sum indicator modulo `p`.
pub fn lucas_identity_check(p: u64, l: u32, k: usize) -> Checked<LucasStats> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let m = p.checked_pow(l).filter(|&m| m <= 16 && l >= 1).ok_or_else(|| {
        Error::InvalidParams(format!("{p}^{l} is outside the exhaustive range 2..=16"))
    })?;
    lucas_for_modulus(m, k)
}

/// Same as [`lucas_identity_check`] but takes `m` and factors it.
pub fn lucas_identity_check_m(m: u64, k: usize) -> Checked<LucasStats> {
    if prime_power(m).is_none() {
        return Err(Error::NotPrimePower(m));
    }
    if m > 16 {
        return Err(Error::InvalidParams(format!("{m} is outside the exhaustive range 2..=16")));
    }
    lucas_for_modulus(m, k)
}

fn lucas_for_modulus(m: u64, k: usize) -> Checked<LucasStats> {
    let (p, _) = prime_power(m).ok_or(Error::NotPrimePower(m))?;
    if !(1..=6).contains(&k) {
        return Err(Error::InvalidParams(format!("k must lie in 1..=6, got {k}")));
    }
    let mu = m as usize;
    // binom[z][a] mod p for 0 <= z, a < m
    let mut binom = vec![vec![0u64; mu]; mu];
    for z in 0..mu {
        binom[z][0] = 1;
        for a in 1..=z {
            binom[z][a] = (binom[z - 1][a - 1] + if a < z { binom[z - 1][a] } else { 0 }) % p;
        }
    }
    let exps = small_sum_vectors(k, mu - 1);
    let mut z = vec![0usize; k];
    let mut points = 0u64;
    loop {
        points += 1;
        let mut value = 0u64;
        for a in &exps {
            let mut term = 1u64;
            for (zi, ai) in z.iter().zip(a) {
                term = term * binom[*zi][*ai] % p;
                if term == 0 {
                    break;
                }
            }
            let odd = a.iter().sum::<usize>() % 2 == 1;
            value = if odd { (value + p - term) % p } else { (value + term) % p };
        }
        let indicator = (z.iter().sum::<usize>() % mu == 0) as u64;
        if value != indicator {
            return Ok(Err(Violation::new(
                ViolationKind::Lucas,
                z.clone(),
                format!("expansion is {value} mod {p} but indicator is {indicator} (m={m})"),
            )));
        }
        let Some(d) = (0..k).rev().find(|&d| z[d] + 1 < mu) else {
            break;
        };
        z[d] += 1;
        z[d + 1..].iter_mut().for_each(|v| *v = 0);
    }
    Ok(Ok(LucasStats { m, p, k, points, terms: exps.len() }))
}

/// All `a in N^k` with `sum(a) <= bound`.
fn small_sum_vectors(k: usize, bound: usize) -> Vec<Vec<usize>> {
    fn go(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for a in 0..=left {
            cur.push(a);
            go(k, left - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(k, bound, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Groups elements by class and fixes how many positions each class
/// occupies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classifier {
    pub class_of: Vec<usize>,
    /// Positions per class among the fixed targets `s'_1, ..., s'_n`.
    pub target_counts: BTreeMap<usize, u64>,
}

impl Classifier {
    /// Targets that agree with `omega`, so the constrained count is positive.
    pub fn matching(class_of: Vec<usize>, counts: &[u64]) -> Self {
        let mut target_counts = BTreeMap::new();
        for (s, &c) in counts.iter().enumerate() {
            *target_counts.entry(class_of[s]).or_insert(0) += c;
        }
        target_counts.retain(|_, c| *c > 0);
        Classifier { class_of, target_counts }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceCountReport {
    pub n: usize,
    pub support: usize,
    pub entropy: f64,
    pub ln_count: f64,
    pub ln_lower: f64,
    pub ln_upper: f64,
    /// `(ln M, H(z) - H(f(z)) times n)` for the constrained count.
    pub constrained: Option<(f64, f64)>,
}

fn multinomial(parts: &[u64]) -> BigUint {
    let mut acc = BigUint::one();
    let mut placed = 0u64;
    for &c in parts {
        for i in 1..=c {
            placed += 1;
            acc = acc * BigUint::from(placed) / BigUint::from(i);
        }
    }
    acc
}

/// Natural log of a positive big integer from its top 64 bits.
fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return libm::log(x.to_u64().unwrap_or(u64::MAX) as f64);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    libm::log(top as f64) + shift as f64 * core::f64::consts::LN_2
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * libm::log(p)
    } else {
        0.0
    }
}

/// Multinomial count of sequences with composition `omega` against
/// `e^{Hn} / (e n)^{|S|} <= M <= e^{Hn}`, plus the constrained count
/// against `e^{(H(z) - H(f(z))) n}` when a classifier is given.
pub fn sequence_count_checks(
    omega: &ScaledDistribution<Rational>,
    n: usize,
    classifier: Option<&Classifier>,
) -> Checked<SequenceCountReport> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    if !omega.total().is_one() {
        return Err(Error::InvalidParams("omega must sum to 1".into()));
    }
    let nr = Rational::from_integer(n.into());
    let mut counts = Vec::with_capacity(omega.weights().len());
    for (s, w) in omega.weights().iter().enumerate() {
        let c = w * &nr;
        if !c.is_integer() {
            return Err(Error::InvalidParams(format!("omega({s}) * {n} is not an integer")));
        }
        counts.push(c.to_integer().to_u64().unwrap_or(u64::MAX));
    }
    let support = counts.iter().filter(|&&c| c > 0).count();
    let entropy: f64 = counts.iter().map(|&c| plogp(c as f64 / n as f64)).sum();
    let count = multinomial(&counts);
    let nf = n as f64;
    let ln_count = ln_big(&count);
    let ln_upper = entropy * nf;
    let ln_lower = ln_upper - support as f64 * (1.0 + libm::log(nf));
    let mut report = SequenceCountReport { n, support, entropy, ln_count, ln_lower, ln_upper, constrained: None };
    let fail = |detail| Ok(Err(Violation::new(ViolationKind::SequenceCount, vec![n], detail)));
    if ln_count > ln_upper + CHECK_TOL || ln_count < ln_lower - CHECK_TOL {
        return fail(format!("ln M = {ln_count} outside [{ln_lower}, {ln_upper}]"));
    }
    if let Some(f) = classifier {
        if f.class_of.len() != counts.len() {
            return Err(Error::InvalidParams(format!(
                "classifier covers {} elements, omega has {}",
                f.class_of.len(),
                counts.len()
            )));
        }
        let mut by_class: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
        for (s, &c) in counts.iter().enumerate() {
            if c > 0 {
                by_class.entry(f.class_of[s]).or_default().push(c);
            }
        }
        let consistent = by_class.len() == f.target_counts.len()
            && by_class.iter().all(|(cls, cs)| f.target_counts.get(cls) == Some(&cs.iter().sum::<u64>()));
        let constrained = if consistent {
            by_class.values().fold(BigUint::one(), |acc, cs| acc * multinomial(cs))
        } else {
            BigUint::zero()
        };
        let class_entropy: f64 = by_class.values().map(|cs| plogp(cs.iter().sum::<u64>() as f64 / nf)).sum();
        let bound = (entropy - class_entropy) * nf;
        let ln_c = if constrained.is_zero() { f64::NEG_INFINITY } else { ln_big(&constrained) };
        report.constrained = Some((ln_c, bound));
        if ln_c > bound + CHECK_TOL {
            return fail(format!("constrained ln M = {ln_c} exceeds {bound}"));
        }
    }
    Ok(Ok(report))
}
