//! Named randomized and exhaustive suites, each driven by one seed.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};
use rand_chacha::ChaCha20Rng;

use super::census::special_pair_census;
use super::counting::{bounded_tuple_count, bounded_tuple_count_brute, lucas_identity_check_m, sequence_count_checks, Classifier};
use super::decomposition::{alpha_property_check, cone_membership, evaluate_atoms};
use super::entropy::{perturbation_entropy_check, subspace_entropy_check_symmetric, SubspaceSpec};
use super::linalg::{permutation_span_check, prime_is_large, rank_identity_check};
use super::sumfree::{naive_scan, verify_progression_free, verify_sumfree};
use super::{Violation, ViolationKind};
use crate::compositions::{orbit_representatives, SymmetricTensor};
use crate::construction::primes::{is_prime, next_prime};
use crate::construction::{construct, progression_free_set, ConstructOptions, Method, Mode, SumFreeCollection};
use crate::distributions::{nu_rational, Params, ScaledDistribution};
use crate::error::{Error, Result};
use crate::marginal_decomposition::{is_tame, symmetric_marginal_tensor, tame_decompose};
use crate::rng::{below, between, keyed, STREAM_SUITE};
use crate::rounding::round_tau;
use crate::scalar::{int, rat, Rational};

pub const SUITES: &[&str] = &[
    "lucas",
    "rank",
    "subspace-entropy",
    "sequence-count",
    "perturbation",
    "alpha",
    "decompose",
    "rounding",
    "progression-free",
    "bounds",
    "sumfree-cross",
    "perm-span",
    "census",
];

/// Failures kept per report; the count in `stats` is exact.
const MAX_REPORTED: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: u64,
    pub failures: Vec<Violation>,
    pub stats: BTreeMap<String, f64>,
}

struct Acc {
    report: SuiteReport,
    failed: u64,
}

impl Acc {
    fn new(suite: &str, seed: u64) -> Self {
        Acc {
            report: SuiteReport { suite: suite.to_string(), seed, cases: 0, failures: Vec::new(), stats: BTreeMap::new() },
            failed: 0,
        }
    }

    fn record(&mut self, verdict: core::result::Result<(), Violation>) {
        self.report.cases += 1;
        if let Err(v) = verdict {
            self.failed += 1;
            if self.report.failures.len() < MAX_REPORTED {
                self.report.failures.push(v);
            }
        }
    }

    fn stat(&mut self, key: &str, value: f64) {
        self.report.stats.insert(key.to_string(), value);
    }

    fn bump(&mut self, key: &str) {
        *self.report.stats.entry(key.to_string()).or_insert(0.0) += 1.0;
    }

    fn finish(mut self) -> SuiteReport {
        let failed = self.failed as f64;
        self.stat("failed", failed);
        self.report
    }
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    let mut rng = keyed(seed, STREAM_SUITE);
    let mut acc = Acc::new(name, seed);
    match name {
        "lucas" => lucas(&mut acc)?,
        "rank" => rank(&mut acc, &mut rng, 1000)?,
        "subspace-entropy" => subspace(&mut acc, &mut rng, 1000)?,
        "sequence-count" => sequences(&mut acc, &mut rng, 200)?,
        "perturbation" => perturbation(&mut acc, &mut rng, 10_000)?,
        "alpha" => alpha_props(&mut acc)?,
        "decompose" => decompose(&mut acc, &mut rng, 200)?,
        "rounding" => rounding(&mut acc)?,
        "progression-free" => progression(&mut acc)?,
        "bounds" => bounds(&mut acc)?,
        "sumfree-cross" => sumfree_cross(&mut acc, &mut rng, 300)?,
        "perm-span" => perm_span(&mut acc, &mut rng, 100)?,
        "census" => census(&mut acc, &mut rng)?,
        _ => {
            return Err(Error::InvalidParams(format!("unknown suite {name:?}; expected one of {}", SUITES.join(", "))));
        }
    }
    Ok(acc.finish())
}

fn lucas(acc: &mut Acc) -> Result<()> {
    for m in [2u64, 3, 4, 5, 8, 9] {
        for k in [3usize, 4] {
            let v = lucas_identity_check_m(m, k)?;
            acc.record(v.map(|_| ()));
        }
    }
    Ok(())
}

/// `parts` nonnegative integers summing to `total`.
fn random_composition(rng: &mut ChaCha20Rng, total: u64, parts: usize) -> Vec<u32> {
    let mut out = vec![0u32; parts];
    for _ in 0..total {
        out[below(rng, parts as u64) as usize] += 1;
    }
    out
}

/// `k` vectors in `{0..m-1}^n` summing to `(m-1) 1^n`, column by column.
fn random_zero_sum(rng: &mut ChaCha20Rng, m: usize, k: usize, n: usize) -> Vec<Vec<u32>> {
    let mut xs = vec![vec![0u32; n]; k];
    for c in 0..n {
        for (i, v) in random_composition(rng, m as u64 - 1, k).into_iter().enumerate() {
            xs[i][c] = v;
        }
    }
    xs
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn rank(acc: &mut Acc, rng: &mut ChaCha20Rng, cases: usize) -> Result<()> {
    for _ in 0..cases {
        let m = between(rng, 2, 3) as usize;
        let k = between(rng, 3, 4) as usize;
        let n = between(rng, 1, 5) as usize;
        let xs = random_zero_sum(rng, m, k, n);
        let mut xp = xs.clone();
        let fresh = random_zero_sum(rng, m, k, n);
        for c in 0..n {
            if below(rng, 2) == 1 {
                for i in 0..k {
                    xp[i][c] = fresh[i][c];
                }
            }
        }
        let p = next_prime(factorial(2 * k as u64) * (m as u64).pow(2 * k as u32) + 1);
        debug_assert!(prime_is_large(p, m, k));
        match rank_identity_check(&xs, &xp, m, p)? {
            Ok(r) => {
                acc.bump(&format!("d={}", r.d));
                acc.record(Ok(()));
            }
            Err(v) => acc.record(Err(v)),
        }
    }
    Ok(())
}

fn random_symmetric(rng: &mut ChaCha20Rng, r: usize, l: usize) -> Result<SymmetricTensor<Rational>> {
    let reps = orbit_representatives(r, l)?;
    loop {
        let w: Vec<(Vec<u32>, Rational)> = reps.iter().map(|rep| (rep.clone(), int(below(rng, 10) as i64))).collect();
        if w.iter().any(|(_, x)| !x.is_zero()) {
            return Ok(SymmetricTensor::from_orbits(r, l, w)?.normalized());
        }
    }
}

fn random_sum_zero(rng: &mut ChaCha20Rng, l: usize) -> Vec<Rational> {
    loop {
        let mut v: Vec<i64> = (0..l - 1).map(|_| between(rng, 0, 6) as i64 - 3).collect();
        let s: i64 = v.iter().sum();
        v.push(-s);
        if v.iter().any(|&x| x != 0) {
            return v.into_iter().map(int).collect();
        }
    }
}

/// Extends `basis` with random sum-zero vectors until it has `dim` members.
fn random_subspace(rng: &mut ChaCha20Rng, l: usize, mut basis: Vec<Vec<Rational>>, dim: usize) -> SubspaceSpec {
    while basis.len() < dim {
        let mut trial = basis.clone();
        trial.push(random_sum_zero(rng, l));
        if let Ok(spec) = SubspaceSpec::new(l, trial.clone()) {
            basis = spec.basis().to_vec();
        }
    }
    SubspaceSpec::new(l, basis).expect("independent by construction")
}

fn subspace(acc: &mut Acc, rng: &mut ChaCha20Rng, cases: usize) -> Result<()> {
    let mut min_slack = f64::INFINITY;
    let mut min_anchored = f64::INFINITY;
    for _ in 0..cases {
        let l = between(rng, 3, 4) as usize;
        let r = between(rng, 0, 4) as usize;
        let pi = random_symmetric(rng, r, l)?;
        let dim = between(rng, 1, l as u64 - 1) as usize;
        let plain = random_subspace(rng, l, Vec::new(), dim);
        let anchored = random_subspace(rng, l, vec![SubspaceSpec::anchor(l)], dim);
        let a = subspace_entropy_check_symmetric(&pi, &plain, false)?;
        let b = subspace_entropy_check_symmetric(&pi, &anchored, true)?;
        if let (Ok(a), Ok(b)) = (&a, &b) {
            min_slack = min_slack.min(a.image - a.plain_bound);
            min_anchored = min_anchored.min(b.image - b.anchored_bound.unwrap_or(f64::NAN));
        }
        acc.record(a.and(b).map(|_| ()));
    }
    acc.stat("min_plain_slack", min_slack);
    acc.stat("min_anchored_slack", min_anchored);
    Ok(())
}

fn sequences(acc: &mut Acc, rng: &mut ChaCha20Rng, cases: usize) -> Result<()> {
    for _ in 0..cases {
        let n = between(rng, 1, 60) as usize;
        let s = between(rng, 1, 6) as usize;
        let counts: Vec<u64> = random_composition(rng, n as u64, s).into_iter().map(u64::from).collect();
        let omega = ScaledDistribution::new(counts.iter().map(|&c| rat(c as i64, n as i64)).collect())?;
        let classes = between(rng, 1, 3);
        let class_of: Vec<usize> = (0..s).map(|_| below(rng, classes) as usize).collect();
        let f = Classifier::matching(class_of, &counts);
        let v = sequence_count_checks(&omega, n, Some(&f))?;
        acc.record(v.map(|_| ()));
    }
    Ok(())
}

fn random_positive(rng: &mut ChaCha20Rng, s: usize) -> ScaledDistribution<f64> {
    let raw: Vec<f64> = (0..s).map(|_| between(rng, 1, 100) as f64).collect();
    let total: f64 = raw.iter().sum();
    ScaledDistribution::new(raw.into_iter().map(|x| x / total).collect()).expect("positive weights")
}

fn perturbation(acc: &mut Acc, rng: &mut ChaCha20Rng, cases: usize) -> Result<()> {
    let mut max_ratio: f64 = 0.0;
    for _ in 0..cases {
        let s = between(rng, 2, 6) as usize;
        let a = random_positive(rng, s);
        let b = random_positive(rng, s);
        let c = a.weights().iter().chain(b.weights()).cloned().fold(f64::INFINITY, f64::min);
        let v = perturbation_entropy_check(&a, &b, c)?;
        if let Ok((lhs, rhs)) = v {
            if rhs > 0.0 {
                max_ratio = max_ratio.max(lhs / rhs);
            }
        }
        acc.record(v.map(|_| ()));
    }
    acc.stat("max_lhs_over_rhs", max_ratio);
    Ok(())
}

fn alpha_props(acc: &mut Acc) -> Result<()> {
    for k in 3..=5usize {
        for n in 1..=20usize {
            for j in 1..=n {
                if k * (j + 1) >= 2 * n {
                    acc.record(alpha_property_check(n, k, j)?);
                }
            }
        }
    }
    Ok(())
}

/// A random `n`-tame distribution for `k = 3`, by rejection.
pub fn random_tame(rng: &mut ChaCha20Rng, n: usize, k: usize) -> ScaledDistribution<Rational> {
    loop {
        let mut tail: Vec<i64> = (0..n).map(|_| below(rng, 9) as i64).collect();
        tail.sort_unstable_by(|a, b| b.cmp(a));
        let s: i64 = tail.iter().sum();
        let moment: i64 = tail.iter().enumerate().map(|(i, &v)| (i as i64 + 1) * v).sum();
        if s == 0 {
            continue;
        }
        let head = rat(k as i64 * moment, n as i64) - int(s);
        if head.is_negative() {
            continue;
        }
        let w: Vec<Rational> = core::iter::once(head).chain(tail.into_iter().map(int)).collect();
        let psi = ScaledDistribution::new(w).expect("nonnegative");
        if is_tame(&psi, k).is_tame() {
            return psi;
        }
    }
}

fn decompose(acc: &mut Acc, rng: &mut ChaCha20Rng, cases: usize) -> Result<()> {
    let k = 3;
    for _ in 0..cases {
        let n = between(rng, 1, 6) as usize;
        let psi = random_tame(rng, n, k);
        let fail = |detail: String| Violation::new(ViolationKind::Cone, vec![n, k], detail);
        let verdict = match (tame_decompose(&psi, k), cone_membership(&psi, k)?) {
            (Err(e), _) => Err(fail(format!("decomposition failed: {e}"))),
            (_, None) => Err(fail("LP oracle finds the input outside the atom cone".into())),
            (Ok(c), Some(lp)) => {
                let witness: BTreeMap<Vec<u32>, Rational> = c.coefficients().clone();
                if witness.values().any(Signed::is_negative) {
                    Err(fail("negative coefficient".into()))
                } else if evaluate_atoms(&witness, n) != psi.weights() {
                    Err(fail("witness does not reconstruct the input".into()))
                } else if evaluate_atoms(&lp, n) != psi.weights() {
                    Err(fail("LP solution does not reconstruct the input".into()))
                } else {
                    Ok(())
                }
            }
        };
        acc.record(verdict);
    }
    Ok(())
}

fn rounding(acc: &mut Acc) -> Result<()> {
    let k = 3;
    let mut max_gap_ratio: f64 = 0.0;
    for m in 2..=5usize {
        let nu = nu_rational(&Params::new(m, k)?, 1e-12)?;
        let tau = symmetric_marginal_tensor(&nu, k, crate::distributions::DEFAULT_TOL)?.tensor;
        for n in [9usize, 12, 30] {
            let pair = round_tau(&tau, n)?;
            let step = rat(1, n as i64);
            let dense = pair.tau_tilde.to_dense();
            let proj = ScaledDistribution::new(dense.projection(0))?;
            let fail = |detail: String| Violation::new(ViolationKind::Rounding, vec![m, k, n], detail);
            let bound = libm::pow(m as f64, k as f64) / n as f64;
            max_gap_ratio = max_gap_ratio.max(pair.linf_gap / bound);
            let verdict = if dense.weights().iter().any(|w| !(w / &step).is_integer()) {
                Err(fail("weight is not a multiple of 1/n".into()))
            } else if !dense.weights().iter().fold(Rational::zero(), |a, b| a + b).is_one() {
                Err(fail("total mass differs from 1".into()))
            } else if proj != pair.nu_n {
                Err(fail("projection differs from the rounded marginal".into()))
            } else if !pair.nu_n.mean_defect(k).is_zero() {
                Err(fail("mean differs from (m-1)/k".into()))
            } else if pair.linf_gap > bound {
                Err(fail(format!("gap {} exceeds {bound}", pair.linf_gap)))
            } else {
                Ok(())
            };
            acc.record(verdict);
        }
    }
    acc.stat("max_gap_over_bound", max_gap_ratio);
    Ok(())
}

fn progression(acc: &mut Acc) -> Result<()> {
    let mut y31 = 0.0;
    for p in (2..=2000u64).filter(|&p| is_prime(p)) {
        for k in [3usize, 4] {
            if p < k as u64 {
                continue;
            }
            for method in [Method::Greedy, Method::Behrend] {
                let fs = progression_free_set(p, k, method)?;
                if p == 31 && k == 3 && method == Method::Greedy {
                    y31 = fs.line_size() as f64;
                }
                acc.record(verify_progression_free(&fs)?);
            }
        }
    }
    acc.stat("greedy_size_p31_k3", y31);
    Ok(())
}

fn bounds(acc: &mut Acc) -> Result<()> {
    for k in 3..=5usize {
        for m in 2..=5usize {
            for n in 1..=40usize {
                let c = bounded_tuple_count(n, m, k)?;
                let mut verdict = c.check();
                if verdict.is_ok() && n <= 6 && m <= 4 {
                    let brute = bounded_tuple_count_brute(n, m, k)?;
                    if brute != c.exact {
                        verdict = Err(Violation::new(
                            ViolationKind::CrossCheck,
                            vec![n, m, k],
                            format!("dynamic program gives {}, enumeration {brute}", c.exact),
                        ));
                    }
                }
                acc.record(verdict);
            }
        }
    }
    Ok(())
}

fn random_zm_collection(rng: &mut ChaCha20Rng) -> SumFreeCollection {
    let m = between(rng, 2, 4) as usize;
    let k = 3;
    let n = between(rng, 1, 3) as usize;
    let l = if below(rng, 4) == 0 { between(rng, 1, 30) } else { between(rng, 1, 6) } as usize;
    let tuples = (0..l)
        .map(|_| {
            let mut t: Vec<Vec<u32>> = (0..k - 1).map(|_| (0..n).map(|_| below(rng, m as u64) as u32).collect()).collect();
            let last = (0..n)
                .map(|c| {
                    let s: u32 = t.iter().map(|x| x[c]).sum();
                    ((m as u32 - s % m as u32) % m as u32) as u32
                })
                .collect();
            t.push(last);
            t
        })
        .collect();
    SumFreeCollection { mode: Mode::Zm, m, k, n, seed: 0, prime: 2, tuples }
}

fn sumfree_cross(acc: &mut Acc, rng: &mut ChaCha20Rng, cases: usize) -> Result<()> {
    let mut violations = 0.0;
    let options = ConstructOptions::default();
    for case in 0..cases {
        let c = if case % 10 == 0 {
            let built = construct(2, 3, 6, below(rng, 1000), &options)?;
            if case % 20 == 0 { built.zm } else { built.integer }
        } else {
            random_zm_collection(rng)
        };
        let fast = verify_sumfree(&c)?;
        let slow = naive_scan(&c)?;
        if fast.is_err() {
            violations += 1.0;
        }
        let verdict = if fast.is_ok() == slow.is_ok() {
            Ok(())
        } else {
            Err(Violation::new(
                ViolationKind::CrossCheck,
                vec![case],
                format!("lookup says {}, full scan says {}", fast.is_ok(), slow.is_ok()),
            ))
        };
        acc.record(verdict);
    }
    acc.stat("collections_with_violation", violations);
    Ok(())
}

fn perm_span(acc: &mut Acc, rng: &mut ChaCha20Rng, cases: usize) -> Result<()> {
    for _ in 0..cases {
        let l = between(rng, 2, 5) as usize;
        let v = random_sum_zero(rng, l);
        acc.record(permutation_span_check(&v)?.map(|_| ()));
    }
    Ok(())
}

fn census(acc: &mut Acc, rng: &mut ChaCha20Rng) -> Result<()> {
    for n in [3usize, 6] {
        let nu = ScaledDistribution::new(vec![rat(2, 3), rat(1, 3)])?;
        let x0 = crate::construction::enumerate_x0(&nu, 2, n, 1 << 20)?;
        // a zero-sum triple: x_1, x_2 disjoint, x_3 the complement
        let xs = loop {
            let a = &x0[below(rng, x0.len() as u64) as usize];
            let b = &x0[below(rng, x0.len() as u64) as usize];
            let c: Vec<u32> = a.iter().zip(b).map(|(&u, &v)| 1u32.wrapping_sub(u + v)).collect();
            if c.iter().all(|&v| v <= 1) {
                break vec![a.clone(), b.clone(), c];
            }
        };
        let census = special_pair_census(&xs, &nu, 2, 0.0, 1 << 20)?;
        for (d, &count) in census.counts.iter().enumerate() {
            acc.stat(&format!("n={n} d={d}"), count as f64);
        }
        acc.record(Ok(()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", 0).is_err());
    }

    #[test]
    fn small_suites_pass() {
        for name in ["lucas", "perm-span", "census"] {
            let r = run_suite(name, 1).unwrap();
            assert!(r.failures.is_empty(), "{name}: {:?}", r.failures);
            assert!(r.cases > 0);
        }
    }

    #[test]
    fn suites_are_reproducible() {
        assert_eq!(run_suite("perm-span", 9).unwrap(), run_suite("perm-span", 9).unwrap());
    }
}
