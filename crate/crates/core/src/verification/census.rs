//! Counts of zero-sum tuples that share a member with a fixed tuple, by the
//! rank of their difference. Emits data only.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;

use super::linalg::rational_rank;
use crate::construction::enumerate_x0;
use crate::distributions::ScaledDistribution;
use crate::error::{Error, Result};
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct Census {
    pub k: usize,
    pub n: usize,
    /// `counts[d]` for `d` in `0..k`; only `1..=k-2` can be nonzero.
    pub counts: Vec<u64>,
    /// `exp(d (H(tau) - H(nu)) n / (k-2))` for each `d`.
    pub exp_terms: Vec<f64>,
    pub enumerated: u64,
}

/// Enumerates `(x'_1, ..., x'_k)` in `X_0^k` summing to `(m-1) 1^n`, equal to
/// `xs` in at least one position but not everywhere.
pub fn special_pair_census(
    xs: &[Vec<u32>],
    nu_n: &ScaledDistribution<Rational>,
    m: usize,
    entropy_gap: f64,
    cap: u128,
) -> Result<Census> {
    let k = xs.len();
    if k < 3 {
        return Err(Error::InvalidParams(format!("need k >= 3, got {k}")));
    }
    let n = xs[0].len();
    let x0 = enumerate_x0(nu_n, m, n, cap)?;
    let size = (x0.len() as u128).checked_pow(k as u32 - 1).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::EnumerationCap { size, cap });
    }
    if xs.iter().any(|x| x0.binary_search(x).is_err()) {
        return Err(Error::InvalidParams("every member of xs must lie in X_0".into()));
    }
    let index: BTreeMap<&[u32], usize> = x0.iter().enumerate().map(|(i, x)| (x.as_slice(), i)).collect();
    let top = m as u32 - 1;
    let mut counts = vec![0u64; k];
    let mut pick = vec![0usize; k - 1];
    let mut enumerated = 0u64;
    loop {
        enumerated += 1;
        let need: Option<Vec<u32>> = (0..n)
            .map(|c| top.checked_sub(pick.iter().map(|&i| x0[i][c]).sum::<u32>()))
            .collect();
        if let Some(&last) = need.as_deref().and_then(|v| index.get(v)) {
            let cand: Vec<&Vec<u32>> = pick.iter().map(|&i| &x0[i]).chain([&x0[last]]).collect();
            let shares = cand.iter().zip(xs).any(|(a, b)| *a == b);
            let same = cand.iter().zip(xs).all(|(a, b)| *a == b);
            if shares && !same {
                let diffs: Vec<Vec<BigInt>> = cand
                    .iter()
                    .zip(xs)
                    .map(|(a, b)| a.iter().zip(b).map(|(&u, &v)| BigInt::from(u as i64 - v as i64)).collect())
                    .collect();
                counts[rational_rank(&diffs)] += 1;
            }
        }
        let Some(d) = (0..k - 1).rev().find(|&d| pick[d] + 1 < x0.len()) else {
            break;
        };
        pick[d] += 1;
        pick[d + 1..].iter_mut().for_each(|v| *v = 0);
    }
    let exp_terms = (0..k)
        .map(|d| libm::exp(d as f64 * entropy_gap / (k - 2) as f64 * n as f64))
        .collect();
    Ok(Census { k, n, counts, exp_terms, enumerated })
}
