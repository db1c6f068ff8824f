//! Writing a scaled distribution on `{0..n}` as a nonnegative combination
//! of atoms `1_{a_1} + ... + 1_{a_k}` with `a` in `T_{n,k}`, and turning a
//! strictly positive combination into a symmetric tensor with that marginal.
//!
//! All arithmetic is exact.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::compositions::{canonical, orbit_representatives, orbit_size, SymmetricTensor};
use crate::distributions::ScaledDistribution;
use crate::error::{Error, Result, TameCondition};
use crate::scalar::{int, Rational, Weight};

/// Nonnegative coefficients on atoms, keyed by the non-increasing tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleCombination<T = Rational> {
    n: usize,
    k: usize,
    coefficients: BTreeMap<Vec<u32>, T>,
}

impl<T: Weight> SimpleCombination<T> {
    pub fn new(n: usize, k: usize) -> Self {
        SimpleCombination { n, k, coefficients: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coefficients(&self) -> &BTreeMap<Vec<u32>, T> {
        &self.coefficients
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Adds `coeff` to the atom of `tuple` (any order). Zero is ignored.
    pub fn add(&mut self, tuple: &[u32], coeff: T) -> Result<()> {
        if tuple.len() != self.k || tuple.iter().map(|&a| a as usize).sum::<usize>() != self.n {
            return Err(Error::InvalidParams(format!("{tuple:?} is not in T_({},{})", self.n, self.k)));
        }
        if coeff.is_negative() {
            return Err(Error::NegativeWeight { index: 0, value: coeff.to_f64() });
        }
        if coeff.is_zero() {
            return Ok(());
        }
        let e = self.coefficients.entry(canonical(tuple)).or_insert_with(T::zero);
        *e = e.clone() + coeff;
        Ok(())
    }

    /// Adds `scale` times every atom of `other`.
    pub fn add_scaled(&mut self, other: &SimpleCombination<T>, scale: &T) -> Result<()> {
        for (t, c) in &other.coefficients {
            self.add(t, c.clone() * scale.clone())?;
        }
        Ok(())
    }

    pub fn evaluate(&self) -> ScaledDistribution<T> {
        let mut w = alloc::vec![T::zero(); self.n + 1];
        for (t, c) in &self.coefficients {
            for &a in t {
                w[a as usize] = w[a as usize].clone() + c.clone();
            }
        }
        ScaledDistribution::from_raw(w)
    }

    /// Adds one to every coordinate of every atom: `T_{n,k}` to `T_{n+k,k}`.
    pub fn lifted(&self) -> Self {
        SimpleCombination {
            n: self.n + self.k,
            k: self.k,
            coefficients: self
                .coefficients
                .iter()
                .map(|(t, c)| (t.iter().map(|a| a + 1).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn total(&self) -> T {
        self.coefficients.values().fold(T::zero(), |acc, c| acc + c.clone())
    }
}

/// Slack of one tameness condition; `None` where it does not apply.
#[derive(Debug, Clone, PartialEq)]
pub struct TameReport<T = Rational> {
    pub n: usize,
    pub k: usize,
    /// `k * sum(i psi(i)) - n * sum(psi(i))`, must be zero.
    pub mean: T,
    /// Smallest `psi(i) - psi(i+1)` over `1 <= i < n`.
    pub monotone: Option<T>,
    /// `psi(0) - sum_{i=0}^{k-2} (k-1-i) psi(n-i)`.
    pub boundary: Option<T>,
    /// `psi(f-1) + psi(c) - 2 psi(f)` with `f, c` the floor and ceiling of `n/k`.
    pub convexity: Option<T>,
}

impl<T: Weight> TameReport<T> {
    pub fn first_failure(&self) -> Option<TameCondition> {
        self.failures().into_iter().next()
    }

    /// Every violated condition, in definition order.
    pub fn failures(&self) -> Vec<TameCondition> {
        let bad = |s: &Option<T>| s.as_ref().is_some_and(|v| v.is_negative());
        let mut out = Vec::new();
        if !self.mean.is_zero() {
            out.push(TameCondition::Mean);
        }
        if bad(&self.monotone) {
            out.push(TameCondition::Monotone);
        }
        if bad(&self.boundary) {
            out.push(TameCondition::Boundary);
        }
        if bad(&self.convexity) {
            out.push(TameCondition::Convexity);
        }
        out
    }

    pub fn is_tame(&self) -> bool {
        self.first_failure().is_none()
    }
}

pub fn boundary_slack<T: Weight>(psi: &ScaledDistribution<T>, k: usize) -> T {
    let n = psi.support_max();
    let mut s = psi.at(0);
    for i in 0..=k - 2 {
        s = s - T::from_ratio((k - 1 - i) as i64, 1) * psi.at(n - i);
    }
    s
}

pub fn is_tame<T: Weight>(psi: &ScaledDistribution<T>, k: usize) -> TameReport<T> {
    let n = psi.support_max();
    let monotone = (n >= 1).then(|| {
        (1..n)
            .map(|i| psi.at(i) - psi.at(i + 1))
            .fold(None, |m: Option<T>, d| Some(match m {
                Some(m) if m < d => m,
                _ => d,
            }))
            .unwrap_or_else(T::zero)
    });
    let boundary = (n >= k).then(|| boundary_slack(psi, k));
    let convexity = (n >= 2 * k).then(|| {
        let (f, c) = (n / k, n.div_ceil(k));
        psi.at(f - 1) + psi.at(c) - T::from_ratio(2, 1) * psi.at(f)
    });
    TameReport { n, k, mean: psi.mean_defect(k), monotone, boundary, convexity }
}

fn atom(parts: &[(u32, usize)]) -> Vec<u32> {
    let mut t = Vec::new();
    for &(value, times) in parts {
        t.extend(core::iter::repeat_n(value, times));
    }
    t
}

/// The distribution `alpha_j` and the atoms it is built from.
///
/// Requires `1 <= j <= n` and `j + 1 >= 2n/k`.
pub fn alpha(n: usize, k: usize, j: usize) -> Result<(ScaledDistribution<Rational>, SimpleCombination<Rational>)> {
    let range = |bound| Err(Error::AlphaRange { n, k, j, bound });
    if k < 3 {
        return range("k must be at least 3");
    }
    if j < 1 {
        return range("j must be at least 1");
    }
    if j > n {
        return range("j must not exceed n");
    }
    if k * (j + 1) < 2 * n {
        return range("j + 1 must be at least 2n/k");
    }
    let (l, r) = (n / j, n % j);
    let (ju, ru) = (j as u32, r as u32);
    let mut comb = SimpleCombination::new(n, k);
    if l == k {
        comb.add(&atom(&[(ju, k)]), Rational::one())?;
        return Ok((comb.evaluate(), comb));
    }
    let ceil = n.div_ceil(k);
    if r != ceil || n < 2 * k {
        for i in r..=j {
            let i = i as u32;
            comb.add(&atom(&[(ju, l - 1), (i, 1), (ju + ru - i, 1), (0, k - l - 1)]), Rational::one())?;
        }
    } else if l + 2 <= k {
        for i in r + 1..j {
            let i = i as u32;
            comb.add(&atom(&[(ju, l - 1), (i, 1), (ju + ru - i, 1), (0, k - l - 1)]), Rational::one())?;
        }
        let w = Rational::new(2.into(), (r as i64 + 1).into());
        for i in 0..=r {
            let i = i as u32;
            comb.add(&atom(&[(ju, l), (i, 1), (ru - i, 1), (0, k - l - 2)]), w.clone())?;
        }
    } else {
        for i in r + 1..j {
            let i = i as u32;
            comb.add(&atom(&[(ju, k - 2), (i, 1), (ju + ru - i, 1)]), Rational::one())?;
        }
    }
    Ok((comb.evaluate(), comb))
}

/// Subtracts `x * rhs` from `lhs` in place.
fn sub_scaled(lhs: &mut [Rational], rhs: &[Rational], x: &Rational) {
    for (a, b) in lhs.iter_mut().zip(rhs) {
        *a -= b * x;
    }
}

fn min_opt(a: Option<Rational>, b: Rational) -> Rational {
    match a {
        Some(a) if a < b => a,
        _ => b,
    }
}

fn check_tame(psi: &ScaledDistribution<Rational>, k: usize, level: usize) -> Result<()> {
    match is_tame(psi, k).first_failure() {
        None => Ok(()),
        Some(condition) => Err(Error::NotTame { level, n: psi.support_max(), condition }),
    }
}

fn fetch_alpha(psi: &ScaledDistribution<Rational>, k: usize, level: usize) -> Result<(usize, ScaledDistribution<Rational>, SimpleCombination<Rational>)> {
    let n = psi.support_max();
    let j = psi
        .max_support()
        .ok_or_else(|| Error::Invariant("alpha requested for the zero distribution".into()))?;
    if k * (j + 1) < 2 * n {
        return Err(Error::Invariant(format!(
            "level {level}: largest support index {j} violates j + 1 >= 2n/k for n={n}, k={k}"
        )));
    }
    let (a, c) = alpha(n, k, j)?;
    Ok((j, a, c))
}

/// Removes multiples of `alpha_j` until the boundary inequality is tight.
/// Returns the reduced distribution and the removed combination.
pub fn slack_reduce(psi: &ScaledDistribution<Rational>, k: usize) -> Result<(ScaledDistribution<Rational>, SimpleCombination<Rational>)> {
    slack_reduce_at(psi, k, 0)
}

fn slack_reduce_at(
    psi: &ScaledDistribution<Rational>,
    k: usize,
    level: usize,
) -> Result<(ScaledDistribution<Rational>, SimpleCombination<Rational>)> {
    let n = psi.support_max();
    if n < k {
        return Err(Error::InvalidParams(format!("slack reduction needs n >= k, got n={n}, k={k}")));
    }
    check_tame(psi, k, level)?;
    let mut cur = psi.clone();
    let mut used = SimpleCombination::new(n, k);
    for _ in 0..=n {
        let slack = boundary_slack(&cur, k);
        if slack.is_zero() || cur.is_zero() {
            return Ok((cur, used));
        }
        let (j, a, comb) = fetch_alpha(&cur, k, level)?;
        let a_slack = boundary_slack(&a, k);
        let by_j = cur.at(j) / a.at(j);
        let by_slack = a_slack.is_positive().then(|| slack.clone() / a_slack.clone());
        let x = min_opt(by_slack, by_j);
        let mut w = cur.into_weights();
        sub_scaled(&mut w, a.weights(), &x);
        cur = ScaledDistribution::from_raw(w);
        used.add_scaled(&comb, &x)?;
    }
    Err(Error::Invariant(format!("level {level}: slack reduction did not terminate within n+1 steps")))
}

/// Decomposes an `n`-tame distribution into atoms.
pub fn tame_decompose(psi: &ScaledDistribution<Rational>, k: usize) -> Result<SimpleCombination<Rational>> {
    decompose_at(psi, k, 0)
}

fn decompose_at(psi: &ScaledDistribution<Rational>, k: usize, level: usize) -> Result<SimpleCombination<Rational>> {
    let n = psi.support_max();
    check_tame(psi, k, level)?;
    let mut out = SimpleCombination::new(n, k);
    if psi.is_zero() {
        return Ok(out);
    }
    if n == 0 {
        out.add(&atom(&[(0, k)]), psi.at(0) / int(k as i64))?;
        return Ok(out);
    }
    if n <= k {
        peel_small(psi, k, level, &mut out)?;
        return Ok(out);
    }

    let (phi, used) = slack_reduce_at(psi, k, level)?;
    out.add_scaled(&used, &Rational::one())?;
    if n >= 2 * k {
        let mut rhs = Rational::zero();
        for i in 1..=k - 2 {
            rhs += int(i as i64) * phi.at(n - i);
        }
        for i in 0..=k - 2 {
            rhs += int((k - 1 - i) as i64) * phi.at(n - k + 1 - i);
        }
        if phi.at(1) < rhs {
            return Err(Error::Invariant(format!("level {level}: tail inequality fails at n={n}")));
        }
    }
    let mut theta = phi.clone().into_weights();
    for i in 0..=k - 2 {
        let c = phi.at(n - i);
        if c.is_zero() {
            continue;
        }
        let t = atom(&[((n - i) as u32, 1), (1, i), (0, k - 1 - i)]);
        theta[n - i] -= c.clone();
        theta[1] -= int(i as i64) * c.clone();
        theta[0] -= int((k - 1 - i) as i64) * c.clone();
        out.add(&t, c)?;
    }
    if !theta[0].is_zero() || theta.iter().any(Signed::is_negative) || theta[n - k + 2..].iter().any(|v| !v.is_zero()) {
        return Err(Error::Invariant(format!("level {level}: boundary subtraction left an invalid remainder")));
    }
    let eta = ScaledDistribution::from_raw(theta[1..=n - k + 1].to_vec());
    let inner = decompose_at(&eta, k, level + 1)?;
    out.add_scaled(&inner.lifted(), &Rational::one())?;
    Ok(out)
}

/// Base case `1 <= n <= k`: peel `alpha_j` for the largest support index.
fn peel_small(psi: &ScaledDistribution<Rational>, k: usize, level: usize, out: &mut SimpleCombination<Rational>) -> Result<()> {
    let n = psi.support_max();
    let mut cur = psi.clone();
    for _ in 0..=2 * n + 2 {
        if cur.is_zero() {
            return Ok(());
        }
        if cur.at(0).is_zero() {
            // mean n/k <= 1 with nothing at zero: only n = k on {1} is possible
            if n != k || (2..=n).any(|i| !cur.at(i).is_zero()) {
                return Err(Error::Invariant(format!("level {level}: stranded mass with psi(0) = 0 at n={n}")));
            }
            out.add(&atom(&[(1, k)]), cur.at(1) / int(k as i64))?;
            return Ok(());
        }
        let (j, a, comb) = fetch_alpha(&cur, k, level)?;
        if j == 0 {
            return Err(Error::Invariant(format!("level {level}: mass only at zero but mean is positive")));
        }
        let by_zero = a.at(0).is_positive().then(|| cur.at(0) / a.at(0));
        let x = min_opt(by_zero, cur.at(j) / a.at(j));
        let mut w = cur.into_weights();
        sub_scaled(&mut w, a.weights(), &x);
        cur = ScaledDistribution::from_raw(w);
        out.add_scaled(&comb, &x)?;
    }
    Err(Error::Invariant(format!("level {level}: base-case peeling did not terminate")))
}

/// Result of building a strictly positive symmetric tensor with a given marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalTensor {
    pub tensor: SymmetricTensor<Rational>,
    /// Per-representative coefficients, all strictly positive.
    pub combination: SimpleCombination<Rational>,
    /// Amount added back on every ordered atom.
    pub shift: Rational,
}

/// Constraint rows for the shifted distribution: each entry is a linear
/// functional that must stay nonnegative.
fn shift_constraints(nu: &[Rational], k: usize) -> Vec<Vec<(usize, i64)>> {
    let n = nu.len() - 1;
    let mut rows: Vec<Vec<(usize, i64)>> = (0..n).map(|i| alloc::vec![(i, 1), (i + 1, -1)]).collect();
    rows.push(alloc::vec![(n, 1)]);
    if n >= k {
        let (f, c) = (n / k, n.div_ceil(k));
        rows.push(alloc::vec![(f - 1, 1), (c, 1), (f, -2)]);
    }
    rows
}

fn apply(row: &[(usize, i64)], v: &[Rational]) -> Rational {
    row.iter().fold(Rational::zero(), |acc, &(i, c)| acc + int(c) * v[i].clone())
}

/// Strictly positive symmetric tensor on `T_{n,k}` with marginal `nu`.
///
/// `nu` must be strictly decreasing, strictly positive, have mean `n/k`
/// and, when `n >= k`, satisfy `2 nu(f) < nu(f-1) + nu(c)`. Every strict
/// margin must be at least `100 * tol` relative to the total mass.
pub fn symmetric_marginal_tensor(nu: &ScaledDistribution<Rational>, k: usize, tol: f64) -> Result<MarginalTensor> {
    let n = nu.support_max();
    if k < 3 {
        return Err(Error::InvalidParams(format!("k must be at least 3, got {k}")));
    }
    if !nu.mean_defect(k).is_zero() {
        return Err(Error::Hypothesis(format!("mean is not {n}/{k}")));
    }
    let total = nu.total();
    if !total.is_positive() {
        return Err(Error::Hypothesis("zero distribution".into()));
    }
    let w = nu.weights();
    let rows = shift_constraints(w, k);
    let required = 100.0 * tol;
    for row in &rows {
        let margin = (apply(row, w) / total.clone()).to_f64();
        if margin <= 0.0 {
            return Err(Error::Hypothesis(format!("strict inequality {row:?} fails (margin {margin:e})")));
        }
        if margin < required {
            return Err(Error::InsufficientMargin { margin, required });
        }
    }

    // S = sum over ordered atoms of 1_{a_1} + ... + 1_{a_k}
    let reps = orbit_representatives(n, k)?;
    let mut s = alloc::vec![Rational::zero(); n + 1];
    for rep in &reps {
        let size = int(orbit_size(rep) as i64);
        for &a in rep {
            s[a as usize] += size.clone();
        }
    }
    let mut x_max: Option<Rational> = None;
    for row in &rows {
        let rate = apply(row, &s);
        if rate.is_positive() {
            x_max = Some(min_opt(x_max, apply(row, w) / rate));
        }
    }
    let x = x_max.ok_or_else(|| Error::Invariant("shift is unbounded".into()))? / int(2);
    let shifted: Vec<Rational> = w.iter().zip(&s).map(|(a, b)| a - b * &x).collect();
    let shifted = ScaledDistribution::new(shifted)?;

    let mut combination = tame_decompose(&shifted, k)?;
    for rep in &reps {
        combination.add(rep, x.clone() * int(orbit_size(rep) as i64))?;
    }
    if combination.evaluate().weights() != w {
        return Err(Error::Invariant("decomposition does not reproduce the target".into()));
    }
    let lambda = combination.total();
    let tensor = SymmetricTensor::from_orbits(
        n,
        k,
        combination
            .coefficients()
            .iter()
            .map(|(rep, c)| (rep.clone(), c / (int(orbit_size(rep) as i64) * &lambda))),
    )?;
    Ok(MarginalTensor { tensor, combination, shift: x })
}
