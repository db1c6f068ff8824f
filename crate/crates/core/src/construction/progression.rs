//! Sets `Y` in `{1, ..., floor(P/k)}` on which `y_1 + ... + y_{k-1} = (k-1) y_k`
//! has only constant solutions, and the colored line built from them.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::primes::is_prime;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Behrend,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSetup {
    pub prime: u64,
    pub k: usize,
    /// Sorted ascending.
    pub y: Vec<u64>,
    pub method: Method,
}

impl FieldSetup {
    pub fn line_size(&self) -> usize {
        self.y.len()
    }
}

pub fn progression_free_set(prime: u64, k: usize, method: Method) -> Result<FieldSetup> {
    if k < 3 {
        return Err(Error::InvalidParams(alloc::format!("k must be at least 3, got {k}")));
    }
    if !is_prime(prime) {
        return Err(Error::NotPrime(prime));
    }
    if prime < k as u64 {
        return Err(Error::InvalidParams(alloc::format!("need P >= k, got P={prime}, k={k}")));
    }
    let limit = prime / k as u64;
    let y = match method {
        Method::Greedy => greedy(limit, k),
        Method::Behrend => behrend(limit, k),
    };
    Ok(FieldSetup { prime, k, y, method })
}

/// Calls `f` on every non-decreasing `size`-multiset drawn from `pool`
/// with the running sum.
fn for_each_multiset(pool: &[u64], size: usize, start: usize, sum: u64, picked: &mut Vec<u64>, f: &mut impl FnMut(&[u64], u64) -> bool) -> bool {
    if size == 0 {
        return f(picked, sum);
    }
    for i in start..pool.len() {
        picked.push(pool[i]);
        let stop = for_each_multiset(pool, size - 1, i, sum + pool[i], picked, f);
        picked.pop();
        if stop {
            return true;
        }
    }
    false
}

/// Whether adding `c` to `set` (sorted, without `c`) creates a nontrivial solution.
fn creates_solution(set: &[u64], member: &[bool], c: u64, k: usize) -> bool {
    let mut pool = set.to_vec();
    pool.push(c);
    let in_set = |v: u64| v == c || member.get(v as usize).copied().unwrap_or(false);
    let w = (k - 1) as u64;
    let mut picked = Vec::with_capacity(k);
    for_each_multiset(&pool, k - 2, 0, 0, &mut picked, &mut |rest, s| {
        let all_c = rest.iter().all(|&v| v == c);
        // c in the last slot: the missing summand is forced
        if let Some(last) = (w * c).checked_sub(s) {
            if last >= 1 && in_set(last) && !(all_c && last == c) {
                return true;
            }
        }
        // c among the summands: the last slot is forced
        let total = c + s;
        if total % w == 0 {
            let yk = total / w;
            if in_set(yk) && !(all_c && yk == c) {
                return true;
            }
        }
        false
    })
}

fn greedy(limit: u64, k: usize) -> Vec<u64> {
    let mut set = Vec::new();
    let mut member = alloc::vec![false; limit as usize + 1];
    for c in 1..=limit {
        if !creates_solution(&set, &member, c, k) {
            set.push(c);
            member[c as usize] = true;
        }
    }
    set
}

/// Largest squared-norm shell of digit vectors in base `d` with digits below
/// `ceil(d/(k-1))`, maximized over `d`. Sums of `k-1` such numbers have no
/// carries, and a sphere is strictly convex, so only constant solutions exist.
fn behrend(limit: u64, k: usize) -> Vec<u64> {
    let mut best: Vec<u64> = alloc::vec![1];
    let root = (libm::sqrt(limit as f64) as u64) + 1;
    let top = (2 * root + k as u64).min(limit);
    for d in k as u64..=top {
        let digit_cap = d.div_ceil((k - 1) as u64);
        if digit_cap < 2 {
            continue;
        }
        let mut shells: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        let mut places = alloc::vec![1u64];
        while places.last().copied().unwrap_or(1) <= limit / d {
            let next = places.last().unwrap() * d;
            places.push(next);
        }
        let mut digits = alloc::vec![0u64; places.len()];
        loop {
            let mut pos = 0;
            loop {
                if pos == digits.len() {
                    break;
                }
                digits[pos] += 1;
                if digits[pos] < digit_cap {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
            if pos == digits.len() {
                break;
            }
            let value: u64 = digits.iter().zip(&places).map(|(a, p)| a * p).sum();
            if value > limit {
                continue;
            }
            let norm: u64 = digits.iter().map(|a| a * a).sum();
            shells.entry(norm).or_default().push(value);
        }
        for shell in shells.into_values() {
            if shell.len() > best.len() {
                best = shell;
            }
        }
    }
    best.sort_unstable();
    best
}

/// The tuples `(y, ..., y, -(k-1) y mod P)` for `y` in `Y`.
pub fn colored_line(fs: &FieldSetup) -> Vec<Vec<u64>> {
    let p = fs.prime;
    fs.y
        .iter()
        .map(|&y| {
            let mut t = alloc::vec![y % p; fs.k - 1];
            let s = ((fs.k as u128 - 1) * y as u128 % p as u128) as u64;
            t.push((p - s) % p);
            t
        })
        .collect()
}
