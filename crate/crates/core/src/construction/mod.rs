//! The randomized pipeline: field setup, composition classes, lifting,
//! hashing through a random linear map, candidate search, isolation and
//! projection to `Z_m^n`.

pub mod primes;
pub mod progression;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use num_traits::ToPrimitive;

use crate::distributions::{nu_rational, Params, ScaledDistribution};
use crate::error::{Error, Result};
use crate::marginal_decomposition::symmetric_marginal_tensor;
use crate::rng;
use crate::rounding::round_tau;
use crate::scalar::Rational;

pub use primes::{choose_prime, is_prime, next_prime};
pub use progression::{colored_line, progression_free_set, FieldSetup, Method};

pub const DEFAULT_ENUMERATION_CAP: u128 = 2_000_000;
pub const DEFAULT_CANDIDATE_CAP: u64 = 50_000_000;

/// Random linear map `F_P^dim -> F_P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMap {
    pub modulus: u64,
    pub coefficients: Vec<u64>,
    pub seed: u64,
}

impl LinearMap {
    pub fn sample(seed: u64, modulus: u64, dim: usize) -> Self {
        let mut r = rng::keyed(seed, rng::STREAM_LINEAR_MAP);
        let coefficients = (0..dim).map(|_| rng::below(&mut r, modulus)).collect();
        LinearMap { modulus, coefficients, seed }
    }

    pub fn apply(&self, v: &[i64]) -> u64 {
        let p = self.modulus as i128;
        let s = self
            .coefficients
            .iter()
            .zip(v)
            .fold(0i128, |acc, (&c, &x)| (acc + c as i128 * x as i128) % p);
        s.rem_euclid(p) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    IntegerVectors,
    Zm,
}

/// `L` tuples of `k` vectors each, over the integers or `Z_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumFreeCollection {
    pub mode: Mode,
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    pub prime: u64,
    pub tuples: Vec<Vec<Vec<u32>>>,
}

impl SumFreeCollection {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Reduces an integer-vector collection to `Z_m`, shifting the last
    /// member by `-(m-1)` first.
    pub fn project_to_zm(&self) -> SumFreeCollection {
        if self.mode == Mode::Zm {
            return self.clone();
        }
        let m = self.m as u32;
        let tuples = self
            .tuples
            .iter()
            .map(|t| {
                let mut t = t.clone();
                if let Some(last) = t.last_mut() {
                    for v in last.iter_mut() {
                        *v = (*v + 1) % m;
                    }
                }
                t.iter_mut().for_each(|x| x.iter_mut().for_each(|v| *v %= m));
                t
            })
            .collect();
        SumFreeCollection { mode: Mode::Zm, tuples, ..self.clone() }
    }
}

/// All vectors in `{0..m-1}^n` with exactly `nu(i) n` coordinates equal to `i`,
/// in lexicographic order.
pub fn enumerate_x0(nu_n: &ScaledDistribution<Rational>, m: usize, n: usize, cap: u128) -> Result<Vec<Vec<u32>>> {
    if m < 2 {
        return Err(Error::InvalidParams(format!("m must be at least 2, got {m}")));
    }
    if nu_n.support_max() >= m && (m..=nu_n.support_max()).any(|i| !num_traits::Zero::is_zero(&nu_n.at(i))) {
        return Err(Error::InvalidParams(format!("distribution has mass beyond {}", m - 1)));
    }
    let mut counts = Vec::with_capacity(m);
    let nr = Rational::from_integer(n.into());
    for i in 0..m {
        let c = nu_n.at(i) * nr.clone();
        if !c.is_integer() {
            return Err(Error::InvalidParams(format!("nu({i}) * {n} is not an integer")));
        }
        counts.push(c.to_integer().to_usize().unwrap_or(usize::MAX));
    }
    if counts.iter().sum::<usize>() != n {
        return Err(Error::InvalidParams(format!("counts do not sum to {n}")));
    }
    let size = multinomial(n, &counts).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::EnumerationCap { size, cap });
    }
    let mut cur: Vec<u32> = Vec::with_capacity(n);
    for (i, &c) in counts.iter().enumerate() {
        cur.extend(core::iter::repeat_n(i as u32, c));
    }
    let mut out = Vec::with_capacity(size as usize);
    loop {
        out.push(cur.clone());
        if !next_permutation(&mut cur) {
            return Ok(out);
        }
    }
}

fn multinomial(n: usize, counts: &[usize]) -> Option<u128> {
    let mut acc: u128 = 1;
    let mut placed = 0u128;
    for &c in counts {
        for i in 1..=c as u128 {
            placed += 1;
            acc = acc.checked_mul(placed)? / i;
        }
    }
    debug_assert_eq!(placed, n as u128);
    Some(acc)
}

fn next_permutation(v: &mut [u32]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot has a successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `x` followed by `e_i` for `i < k`; `x - (m-1)` followed by `-1`s for `i = k`.
pub fn lift(x: &[u32], i: usize, m: usize, k: usize) -> Result<Vec<i64>> {
    if i < 1 || i > k {
        return Err(Error::InvalidParams(format!("lift index {i} outside 1..={k}")));
    }
    let mut out = Vec::with_capacity(x.len() + k - 1);
    if i < k {
        out.extend(x.iter().map(|&a| a as i64));
        out.extend((1..k).map(|c| (c == i) as i64));
    } else {
        out.extend(x.iter().map(|&a| a as i64 - (m as i64 - 1)));
        out.extend(core::iter::repeat_n(-1, k - 1));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructOptions {
    pub prime: Option<u64>,
    pub method: Method,
    pub enumeration_cap: u128,
    pub candidate_cap: u64,
    /// Denominator precision used to rationalize `nu`.
    pub precision: f64,
    pub tol: f64,
    /// Replaces the sampled map; for hand-checked runs.
    pub linear_map: Option<Vec<u64>>,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions {
            prime: None,
            method: Method::Greedy,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
            precision: 1e-12,
            tol: crate::distributions::DEFAULT_TOL,
            linear_map: None,
        }
    }
}

/// Everything measured along the way, for provenance and summary rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionReport {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    pub prime: u64,
    /// `exp((H(tau) - H(nu)) n / (k-2))`, before rounding up to a prime.
    pub prime_target: f64,
    /// Formula used for the prime; polynomial prefactors are dropped.
    pub prime_rule: &'static str,
    pub line_size: usize,
    pub x0_size: usize,
    pub class_sizes: Vec<usize>,
    pub candidates: usize,
    pub isolated: usize,
    pub entropy_tau: f64,
    pub entropy_nu: f64,
    pub zero_orbits: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    pub integer: SumFreeCollection,
    pub zm: SumFreeCollection,
    pub report: ConstructionReport,
}

/// The rounded pair and field size for `(m, k, n)`; shared by all seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub nu_n: ScaledDistribution<Rational>,
    pub entropy_tau: f64,
    pub entropy_nu: f64,
    pub zero_orbits: usize,
    pub field: FieldSetup,
    pub prime_target: f64,
    pub x0: Vec<Vec<u32>>,
}

pub fn prepare(m: usize, k: usize, n: usize, options: &ConstructOptions) -> Result<Prepared> {
    let params = Params::with(m, k, n, options.tol)?;
    if n == 0 || n % k != 0 {
        return Err(Error::NotDivisible { n, k });
    }
    let nu = nu_rational(&params, options.precision)?;
    let tau = symmetric_marginal_tensor(&nu, k, options.tol)?.tensor;
    let pair = round_tau(&tau, n)?;
    let entropy_tau = pair.tau_tilde.entropy();
    let entropy_nu = pair.nu_n.entropy();
    let prime_target = primes::prime_target(entropy_tau, entropy_nu, n, k);
    let mut prime = choose_prime(entropy_tau, entropy_nu, n, k, options.prime)?;
    if options.prime.is_none() && prime < k as u64 {
        prime = next_prime(k as u64);
    }
    let field = progression_free_set(prime, k, options.method)?;
    let x0 = enumerate_x0(&pair.nu_n, m, n, options.enumeration_cap)?;
    Ok(Prepared {
        nu_n: pair.nu_n,
        entropy_tau,
        entropy_nu,
        zero_orbits: pair.zero_orbits,
        field,
        prime_target,
        x0,
    })
}

pub fn construct(m: usize, k: usize, n: usize, seed: u64, options: &ConstructOptions) -> Result<Construction> {
    let prep = prepare(m, k, n, options)?;
    construct_prepared(&prep, m, k, n, seed, options)
}

/// Runs the seed-dependent part on a shared [`Prepared`].
pub fn construct_prepared(
    prep: &Prepared,
    m: usize,
    k: usize,
    n: usize,
    seed: u64,
    options: &ConstructOptions,
) -> Result<Construction> {
    let p = prep.field.prime;
    let f = match &options.linear_map {
        Some(c) if c.len() == n + k - 1 => LinearMap { modulus: p, coefficients: c.iter().map(|v| v % p).collect(), seed },
        Some(c) => {
            return Err(Error::InvalidParams(format!("linear map needs {} coefficients, got {}", n + k - 1, c.len())));
        }
        None => LinearMap::sample(seed, p, n + k - 1),
    };
    let line = colored_line(&prep.field);
    let x0 = &prep.x0;

    // X_i as indices into X0
    let mut classes: Vec<Vec<usize>> = Vec::with_capacity(k);
    for i in 1..=k {
        let column: BTreeSet<u64> = line.iter().map(|t| t[i - 1]).collect();
        let mut members = Vec::new();
        for (idx, x) in x0.iter().enumerate() {
            if column.contains(&f.apply(&lift(x, i, m, k)?)) {
                members.push(idx);
            }
        }
        classes.push(members);
    }
    let last: BTreeMap<&[u32], usize> = classes[k - 1].iter().map(|&i| (x0[i].as_slice(), i)).collect();

    let mut candidates: Vec<Vec<usize>> = Vec::new();
    let mut visited = 0u64;
    let mut sums = alloc::vec![0u32; n];
    let mut prefix = Vec::with_capacity(k);
    search(
        &mut SearchState {
            x0,
            classes: &classes,
            last: &last,
            top: (m - 1) as u32,
            cap: options.candidate_cap,
            visited: &mut visited,
            out: &mut candidates,
        },
        0,
        &mut sums,
        &mut prefix,
    )?;

    let mut counts: Vec<BTreeMap<usize, usize>> = alloc::vec![BTreeMap::new(); k];
    for c in &candidates {
        for (pos, &idx) in c.iter().enumerate() {
            *counts[pos].entry(idx).or_insert(0) += 1;
        }
    }
    let isolated: Vec<&Vec<usize>> = candidates
        .iter()
        .filter(|c| c.iter().enumerate().all(|(pos, idx)| counts[pos][idx] == 1))
        .collect();

    let integer = SumFreeCollection {
        mode: Mode::IntegerVectors,
        m,
        k,
        n,
        seed,
        prime: p,
        tuples: isolated.iter().map(|c| c.iter().map(|&i| x0[i].clone()).collect()).collect(),
    };
    let zm = integer.project_to_zm();
    let report = ConstructionReport {
        m,
        k,
        n,
        seed,
        prime: p,
        prime_target: prep.prime_target,
        prime_rule: "smallest prime >= exp((H(tau~) - H(nu_n)) * n / (k - 2)), at least k",
        line_size: prep.field.line_size(),
        x0_size: x0.len(),
        class_sizes: classes.iter().map(Vec::len).collect(),
        candidates: candidates.len(),
        isolated: isolated.len(),
        entropy_tau: prep.entropy_tau,
        entropy_nu: prep.entropy_nu,
        zero_orbits: prep.zero_orbits,
    };
    Ok(Construction { integer, zm, report })
}

struct SearchState<'a> {
    x0: &'a [Vec<u32>],
    classes: &'a [Vec<usize>],
    last: &'a BTreeMap<&'a [u32], usize>,
    top: u32,
    cap: u64,
    visited: &'a mut u64,
    out: &'a mut Vec<Vec<usize>>,
}

/// Depth-first over `X_1 x ... x X_{k-1}` keeping every running coordinate
/// sum at most `m-1`; the last member is then forced.
fn search(st: &mut SearchState<'_>, depth: usize, sums: &mut [u32], prefix: &mut Vec<usize>) -> Result<()> {
    let k = st.classes.len();
    if depth == k - 1 {
        let need: Vec<u32> = sums.iter().map(|&s| st.top - s).collect();
        if let Some(&idx) = st.last.get(need.as_slice()) {
            let mut c = prefix.clone();
            c.push(idx);
            st.out.push(c);
        }
        return Ok(());
    }
    for &idx in &st.classes[depth] {
        *st.visited += 1;
        if *st.visited > st.cap {
            return Err(Error::EnumerationCap { size: *st.visited as u128, cap: st.cap as u128 });
        }
        let x = &st.x0[idx];
        if sums.iter().zip(x).any(|(&s, &a)| s + a > st.top) {
            continue;
        }
        sums.iter_mut().zip(x).for_each(|(s, &a)| *s += a);
        prefix.push(idx);
        search(st, depth + 1, sums, prefix)?;
        prefix.pop();
        sums.iter_mut().zip(x).for_each(|(s, &a)| *s -= a);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use alloc::vec;

    #[test]
    fn x0_examples() {
        let nu = ScaledDistribution::new(vec![rat(2, 3), rat(1, 3)]).unwrap();
        assert_eq!(enumerate_x0(&nu, 2, 6, 100).unwrap().len(), 15);
        let half = ScaledDistribution::new(vec![rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(enumerate_x0(&half, 2, 2, 100).unwrap(), vec![vec![0, 1], vec![1, 0]]);
        assert!(matches!(enumerate_x0(&nu, 2, 6, 10), Err(Error::EnumerationCap { .. })));
        assert!(enumerate_x0(&nu, 2, 4, 100).is_err());
    }

    #[test]
    fn lift_examples() {
        assert_eq!(lift(&[1, 0], 1, 2, 3).unwrap(), vec![1, 0, 1, 0]);
        assert_eq!(lift(&[1, 0], 3, 2, 3).unwrap(), vec![0, -1, -1, -1]);
        assert!(lift(&[1, 0], 4, 2, 3).is_err());
        let xs = [[1u32, 0, 0], [0, 1, 0], [0, 0, 1]];
        let total: Vec<i64> = (0..5)
            .map(|c| (1..=3).map(|i| lift(&xs[i - 1], i, 2, 3).unwrap()[c]).sum())
            .collect();
        assert_eq!(total, vec![0; 5]);
    }

    #[test]
    fn linear_map_is_seeded() {
        let a = LinearMap::sample(3, 101, 8);
        assert_eq!(a, LinearMap::sample(3, 101, 8));
        assert_ne!(a.coefficients, LinearMap::sample(4, 101, 8).coefficients);
        assert!(a.coefficients.iter().all(|&c| c < 101));
        assert_eq!(a.apply(&[0; 8]), 0);
    }

    #[test]
    fn all_classes_full_gives_no_isolated() {
        // coefficients pick y = 1 on both tag coordinates, so every lift hits the line
        let options = ConstructOptions { prime: Some(7), linear_map: Some(vec![0, 0, 0, 1, 1]), ..Default::default() };
        let out = construct(2, 3, 3, 0, &options).unwrap();
        assert_eq!(out.report.class_sizes, vec![3, 3, 3]);
        assert_eq!(out.report.candidates, 6);
        assert_eq!(out.report.isolated, 0);
    }

    #[test]
    fn single_candidate_is_isolated() {
        // f(x, t) = x_1 + 2 x_2 + t_1 + t_2 over F_7 with Y = {1, 2}
        let options = ConstructOptions { prime: Some(7), linear_map: Some(vec![0, 1, 6, 1, 1]), ..Default::default() };
        let out = construct(2, 3, 3, 0, &options).unwrap();
        assert!(out.report.candidates >= out.report.isolated);
        for t in &out.integer.tuples {
            let s: Vec<u32> = (0..3).map(|c| t.iter().map(|x| x[c]).sum()).collect();
            assert_eq!(s, vec![1, 1, 1]);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let o = ConstructOptions::default();
        assert_eq!(construct(2, 3, 6, 5, &o).unwrap(), construct(2, 3, 6, 5, &o).unwrap());
    }
}
