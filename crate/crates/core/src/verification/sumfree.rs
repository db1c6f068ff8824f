//! Sum-free checking of collections and the progression-free property of `Y`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{Checked, Violation, ViolationKind};
use crate::construction::{FieldSetup, Mode, SumFreeCollection};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SumFreeReport {
    pub tuples: usize,
    /// Position-`k` members repeat, so the full `L^k` scan was used.
    pub fallback: bool,
}

fn validate(c: &SumFreeCollection) -> Result<()> {
    if c.m < 2 || c.k < 2 {
        return Err(Error::InvalidParams(format!("need m >= 2 and k >= 2, got m={}, k={}", c.m, c.k)));
    }
    for (j, t) in c.tuples.iter().enumerate() {
        if t.len() != c.k {
            return Err(Error::InvalidParams(format!("tuple {j} has {} members, expected {}", t.len(), c.k)));
        }
        if let Some(x) = t.iter().find(|x| x.len() != c.n) {
            return Err(Error::InvalidParams(format!("tuple {j} has a member of length {}, expected {}", x.len(), c.n)));
        }
    }
    Ok(())
}

fn range_violation(c: &SumFreeCollection) -> Option<Violation> {
    let top = c.m as u32 - 1;
    for (j, t) in c.tuples.iter().enumerate() {
        for (i, x) in t.iter().enumerate() {
            if let Some(pos) = x.iter().position(|&v| v > top) {
                return Some(Violation::new(
                    ViolationKind::Range,
                    vec![j, i],
                    format!("member {i} of tuple {j} has entry {} at coordinate {pos}", x[pos]),
                ));
            }
        }
    }
    None
}

/// Target of a zero-sum selection: `0` in `Z_m`, `(m-1) 1^n` over the integers.
fn is_zero_sum(c: &SumFreeCollection, pick: &[usize]) -> bool {
    (0..c.n).all(|coord| {
        let s: u64 = pick.iter().enumerate().map(|(i, &j)| c.tuples[j][i][coord] as u64).sum();
        match c.mode {
            Mode::Zm => s % c.m as u64 == 0,
            Mode::IntegerVectors => s == c.m as u64 - 1,
        }
    })
}

fn diagonal_violation(c: &SumFreeCollection) -> Option<Violation> {
    (0..c.tuples.len()).find_map(|j| {
        let pick = vec![j; c.k];
        (!is_zero_sum(c, &pick)).then(|| {
            Violation::new(ViolationKind::Diagonal, pick, format!("tuple {j} does not sum to zero"))
        })
    })
}

fn off_diagonal(pick: &[usize]) -> Violation {
    Violation::new(ViolationKind::OffDiagonal, pick.to_vec(), format!("mixed selection {pick:?} sums to zero"))
}

/// Advances `idx` through `[0, base)^len`; false after the last element.
fn odometer(idx: &mut [usize], base: usize) -> bool {
    for d in (0..idx.len()).rev() {
        idx[d] += 1;
        if idx[d] < base {
            return true;
        }
        idx[d] = 0;
    }
    false
}

/// Checks that a selection `(j_1, ..., j_k)` sums to zero exactly when all
/// indices agree. Off-diagonal selections are found by resolving the last
/// member through a lookup table.
pub fn verify_sumfree(c: &SumFreeCollection) -> Checked<SumFreeReport> {
    validate(c)?;
    let l = c.tuples.len();
    let mut report = SumFreeReport { tuples: l, fallback: false };
    if let Some(v) = range_violation(c).or_else(|| diagonal_violation(c)) {
        return Ok(Err(v));
    }
    if l == 0 {
        return Ok(Ok(report));
    }
    let k = c.k;
    let mut last: BTreeMap<&[u32], usize> = BTreeMap::new();
    for (j, t) in c.tuples.iter().enumerate() {
        if last.insert(t[k - 1].as_slice(), j).is_some() {
            report.fallback = true;
            return Ok(naive_scan(c)?.map(|_| report));
        }
    }
    let m = c.m as i64;
    let mut idx = vec![0usize; k - 1];
    let mut need = vec![0u32; c.n];
    loop {
        let mut feasible = true;
        for (coord, slot) in need.iter_mut().enumerate() {
            let s: i64 = idx.iter().enumerate().map(|(i, &j)| c.tuples[j][i][coord] as i64).sum();
            let v = match c.mode {
                Mode::Zm => (-s).rem_euclid(m),
                Mode::IntegerVectors => m - 1 - s,
            };
            if v < 0 {
                feasible = false;
                break;
            }
            *slot = v as u32;
        }
        if feasible {
            if let Some(&jk) = last.get(need.as_slice()) {
                if idx.iter().any(|&j| j != jk) {
                    let mut pick = idx.clone();
                    pick.push(jk);
                    return Ok(Err(off_diagonal(&pick)));
                }
            }
        }
        if !odometer(&mut idx, l) {
            return Ok(Ok(report));
        }
    }
}

/// Every selection in `[L]^k`, lexicographically.
pub fn naive_scan(c: &SumFreeCollection) -> Checked<()> {
    validate(c)?;
    if let Some(v) = range_violation(c) {
        return Ok(Err(v));
    }
    let l = c.tuples.len();
    if l == 0 {
        return Ok(Ok(()));
    }
    let mut pick = vec![0usize; c.k];
    loop {
        let diagonal = pick.iter().all(|&j| j == pick[0]);
        let zero = is_zero_sum(c, &pick);
        if diagonal && !zero {
            let j = pick[0];
            return Ok(Err(Violation::new(ViolationKind::Diagonal, pick, format!("tuple {j} does not sum to zero"))));
        }
        if !diagonal && zero {
            return Ok(Err(off_diagonal(&pick)));
        }
        if !odometer(&mut pick, l) {
            return Ok(Ok(()));
        }
    }
}

/// Counts multisets of size `k-1` from `Y` by sum with a knapsack table and
/// requires that `(k-1) y` is reached only by the constant multiset.
pub fn verify_progression_free(fs: &FieldSetup) -> Checked<()> {
    let k = fs.k;
    if k < 3 {
        return Err(Error::InvalidParams(format!("k must be at least 3, got {k}")));
    }
    let limit = fs.prime / k as u64;
    if let Some(&y) = fs.y.iter().find(|&&y| y == 0 || y > limit) {
        return Err(Error::InvalidParams(format!("{y} lies outside 1..={limit}")));
    }
    if fs.y.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParams("Y must be strictly increasing".into()));
    }
    let Some(&top) = fs.y.last() else {
        return Ok(Ok(()));
    };
    let parts = k - 1;
    let max_sum = parts * top as usize;
    // ways[c][s]: multisets of size c with sum s, capped at 2
    let mut ways = vec![vec![0u8; max_sum + 1]; parts + 1];
    ways[0][0] = 1;
    for &y in &fs.y {
        let y = y as usize;
        for c in 1..=parts {
            for s in y..=max_sum {
                let add = ways[c - 1][s - y];
                ways[c][s] = ways[c][s].saturating_add(add).min(2);
            }
        }
    }
    for &y in &fs.y {
        let target = parts * y as usize;
        if ways[parts][target] > 1 {
            let witness = find_multiset(&fs.y, parts, target, y).unwrap_or_default();
            return Ok(Err(Violation::new(
                ViolationKind::ProgressionSolution,
                witness.iter().map(|&v| v as usize).chain([y as usize]).collect(),
                format!("{witness:?} sums to {} = {parts} * {y}", target),
            )));
        }
    }
    Ok(Ok(()))
}

fn find_multiset(pool: &[u64], parts: usize, target: usize, constant: u64) -> Option<Vec<u64>> {
    fn go(pool: &[u64], start: usize, left: usize, target: usize, constant: u64, acc: &mut Vec<u64>) -> bool {
        if left == 0 {
            return target == 0 && acc.iter().any(|&v| v != constant);
        }
        for i in start..pool.len() {
            let v = pool[i] as usize;
            if v > target {
                break;
            }
            acc.push(pool[i]);
            if go(pool, i, left - 1, target - v, constant, acc) {
                return true;
            }
            acc.pop();
        }
        false
    }
    let mut acc = Vec::new();
    go(pool, 0, parts, target, constant, &mut acc).then_some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::Method;

    fn zm(m: usize, k: usize, tuples: Vec<Vec<Vec<u32>>>) -> SumFreeCollection {
        let n = tuples.first().map_or(0, |t| t[0].len());
        SumFreeCollection { mode: Mode::Zm, m, k, n, seed: 0, prime: 2, tuples }
    }

    #[test]
    fn single_tuple_is_sum_free() {
        // (x, x, -2x) in Z_5^2
        let c = zm(5, 3, vec![vec![vec![1, 2], vec![1, 2], vec![3, 1]]]);
        assert_eq!(verify_sumfree(&c).unwrap(), Ok(SumFreeReport { tuples: 1, fallback: false }));
        assert_eq!(naive_scan(&c).unwrap(), Ok(()));
    }

    #[test]
    fn mixed_zero_sum_is_reported() {
        // in Z_2^2 with k = 3: tuple 0 = (a, b, c), tuple 1 = (a', b, c) forces a witness
        let c = zm(
            2,
            3,
            vec![
                vec![vec![1, 0], vec![0, 1], vec![1, 1]],
                vec![vec![1, 0], vec![1, 1], vec![0, 1]],
            ],
        );
        let v = verify_sumfree(&c).unwrap().unwrap_err();
        assert_eq!(v.kind, ViolationKind::OffDiagonal);
        let mut pick = v.indices.clone();
        assert!(is_zero_sum(&c, &pick));
        pick.dedup();
        assert!(pick.len() > 1);
        assert!(naive_scan(&c).unwrap().is_err());
    }

    #[test]
    fn corrupted_diagonal() {
        let mut c = zm(3, 3, vec![vec![vec![1], vec![1], vec![1]]]);
        c.tuples[0][0][0] = 2;
        let v = verify_sumfree(&c).unwrap().unwrap_err();
        assert_eq!((v.kind, v.indices), (ViolationKind::Diagonal, vec![0, 0, 0]));
    }

    #[test]
    fn duplicate_last_members_fall_back() {
        let c = zm(4, 3, vec![vec![vec![1], vec![2], vec![1]], vec![vec![2], vec![1], vec![1]]]);
        // a repeated last member always pairs with the other diagonal
        let v = verify_sumfree(&c).unwrap().unwrap_err();
        assert_eq!((v.kind, v.indices), (ViolationKind::OffDiagonal, vec![0, 0, 1]));
    }

    #[test]
    fn malformed_input_is_an_error() {
        let c = zm(2, 3, vec![vec![vec![1, 0], vec![0, 1]]]);
        assert!(verify_sumfree(&c).is_err());
    }

    #[test]
    fn progression_free_detects_solutions() {
        let bad = FieldSetup { prime: 31, k: 3, y: vec![1, 2, 3], method: Method::Greedy };
        let v = verify_progression_free(&bad).unwrap().unwrap_err();
        assert_eq!(v.indices, vec![1, 3, 2]);
        let good = FieldSetup { prime: 31, k: 3, y: vec![1, 2, 4, 5, 10], method: Method::Greedy };
        assert!(verify_progression_free(&good).unwrap().is_ok());
    }
}
