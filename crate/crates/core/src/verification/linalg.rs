//! Rank over the rationals (fraction-free elimination) and over `F_P`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::{Checked, Violation, ViolationKind};
use crate::construction::lift;
use crate::construction::primes::is_prime;
use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Rank of integer rows by Bareiss elimination.
pub fn rational_rank(rows: &[Vec<BigInt>]) -> usize {
    let Some(width) = rows.first().map(Vec::len) else {
        return 0;
    };
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for col in 0..width {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..a.len() {
            for c in col + 1..width {
                let v = &a[rank][col] * &a[r][c] - &a[r][col] * &a[rank][c];
                a[r][c] = v / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    rank
}

/// Rank of rational rows, cleared to integers row by row.
pub fn rational_rank_q(rows: &[Vec<Rational>]) -> usize {
    let ints: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let den = row.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect()
        })
        .collect();
    rational_rank(&ints)
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r, mut e, mut b) = (1u128, p - 2, a as u128 % p as u128);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u128;
        }
        b = b * b % p as u128;
        e >>= 1;
    }
    r as u64
}

/// Rank over `F_p` of integer rows (reduced mod `p` first).
pub fn rank_mod_p(rows: &[Vec<i64>], p: u64) -> Result<usize> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let Some(width) = rows.first().map(Vec::len) else {
        return Ok(0);
    };
    let pm = p as i128;
    let mut a: Vec<Vec<u64>> =
        rows.iter().map(|r| r.iter().map(|&v| (v as i128).rem_euclid(pm) as u64).collect()).collect();
    let mut rank = 0;
    for col in 0..width {
        let Some(piv) = (rank..a.len()).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = inv_mod(a[rank][col], p) as u128;
        for r in 0..a.len() {
            if r == rank || a[r][col] == 0 {
                continue;
            }
            let f = a[r][col] as u128 * inv % p as u128;
            for c in col..width {
                let sub = f * a[rank][c] as u128 % p as u128;
                a[r][c] = ((a[r][c] as u128 + p as u128 - sub) % p as u128) as u64;
            }
        }
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    Ok(rank)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankReport {
    /// Rank over `Q` of `x_i - x'_i`.
    pub d: usize,
    /// Rank over `F_P` of the `2k` lifts.
    pub rank_p: usize,
    /// `P > (2k)! m^(2k)`; the equality is only asserted when this holds.
    pub size_ok: bool,
}

/// `P` exceeds `(2k)! m^(2k)`, which bounds every minor of the lifts.
pub fn prime_is_large(p: u64, m: usize, k: usize) -> bool {
    let mut bound: u128 = 1;
    for i in 1..=2 * k as u128 {
        match bound.checked_mul(i) {
            Some(b) => bound = b,
            None => return false,
        }
    }
    for _ in 0..2 * k {
        match bound.checked_mul(m as u128) {
            Some(b) => bound = b,
            None => return false,
        }
    }
    (p as u128) > bound
}

fn check_tuple(xs: &[Vec<u32>], m: usize, n: usize, name: &str) -> Result<()> {
    if xs.iter().any(|x| x.len() != n) {
        return Err(Error::InvalidParams(format!("{name}: members must have length {n}")));
    }
    if xs.iter().flatten().any(|&v| v as usize >= m) {
        return Err(Error::InvalidParams(format!("{name}: entries must lie in 0..{m}")));
    }
    for c in 0..n {
        if xs.iter().map(|x| x[c] as usize).sum::<usize>() != m - 1 {
            return Err(Error::InvalidParams(format!("{name}: coordinate {c} does not sum to {}", m - 1)));
        }
    }
    Ok(())
}

/// `rank_P(lifts of xs and xs') = k - 1 + rank_Q(xs - xs')` when `P` is
/// large enough.
pub fn rank_identity_check(xs: &[Vec<u32>], xs_prime: &[Vec<u32>], m: usize, p: u64) -> Checked<RankReport> {
    let k = xs.len();
    if k < 3 || xs_prime.len() != k {
        return Err(Error::InvalidParams(format!("need two k-tuples with k >= 3, got {k} and {}", xs_prime.len())));
    }
    let n = xs[0].len();
    check_tuple(xs, m, n, "xs")?;
    check_tuple(xs_prime, m, n, "xs'")?;
    let diffs: Vec<Vec<BigInt>> = xs
        .iter()
        .zip(xs_prime)
        .map(|(a, b)| a.iter().zip(b).map(|(&u, &v)| BigInt::from(u as i64 - v as i64)).collect())
        .collect();
    let d = rational_rank(&diffs);
    let mut lifts = Vec::with_capacity(2 * k);
    for (i, x) in xs.iter().chain(xs_prime).enumerate() {
        lifts.push(lift(x, i % k + 1, m, k)?);
    }
    let rank_p = rank_mod_p(&lifts, p)?;
    let report = RankReport { d, rank_p, size_ok: prime_is_large(p, m, k) };
    if report.size_ok && rank_p != k - 1 + d {
        return Ok(Err(Violation::new(
            ViolationKind::Rank,
            vec![rank_p, d],
            format!("rank over F_{p} is {rank_p}, expected {} + {d}", k - 1),
        )));
    }
    Ok(Ok(report))
}

/// Rank of `{v^sigma : sigma in S_l}`.
pub fn permutation_span_rank(v: &[Rational]) -> Result<usize> {
    let l = v.len();
    if !(1..=6).contains(&l) {
        return Err(Error::InvalidParams(format!("arity must lie in 1..=6, got {l}")));
    }
    let mut perm: Vec<usize> = (0..l).collect();
    let mut rows = Vec::new();
    loop {
        rows.push(perm.iter().map(|&i| v[i].clone()).collect::<Vec<_>>());
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(rational_rank_q(&rows))
}

/// Checks that a nonzero `v` with coordinate sum zero has permuted copies
/// spanning the whole sum-zero space.
pub fn permutation_span_check(v: &[Rational]) -> Checked<usize> {
    let l = v.len();
    if v.iter().all(Zero::is_zero) || !v.iter().fold(Rational::zero(), |a, b| a + b).is_zero() {
        return Err(Error::InvalidParams("v must be nonzero with coordinate sum zero".into()));
    }
    let r = permutation_span_rank(v)?;
    if r != l - 1 {
        return Ok(Err(Violation::new(ViolationKind::Span, vec![r], format!("permuted copies span rank {r}, expected {}", l - 1))));
    }
    Ok(Ok(r))
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot has a successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
