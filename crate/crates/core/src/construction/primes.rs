//! Deterministic Miller-Rabin for 64-bit inputs and prime selection.

use crate::error::{Error, Result};

const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Largest target accepted by [`choose_prime`].
pub const MAX_PRIME_TARGET: f64 = 4_611_686_018_427_387_904.0; // 2^62

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Exact for every `u64`: the first twelve prime bases suffice below 3.3e24.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// `(p, l)` with `m = p^l`, if `m` is a prime power.
pub fn prime_power(m: u64) -> Option<(u64, u32)> {
    if m < 2 {
        return None;
    }
    let p = (2..=m).find(|d| m % d == 0)?;
    let (mut rest, mut l) = (m, 0);
    while rest % p == 0 {
        rest /= p;
        l += 1;
    }
    (rest == 1).then_some((p, l))
}

/// Real lower bound `exp((h_tau - h_nu) n / (k - 2))` for the field size.
pub fn prime_target(h_tau: f64, h_nu: f64, n: usize, k: usize) -> f64 {
    libm::exp((h_tau - h_nu).max(0.0) / (k - 2) as f64 * n as f64)
}

/// The override if it is prime, else the smallest prime at or above
/// [`prime_target`].
pub fn choose_prime(h_tau: f64, h_nu: f64, n: usize, k: usize, prime_override: Option<u64>) -> Result<u64> {
    if let Some(p) = prime_override {
        return if is_prime(p) { Ok(p) } else { Err(Error::NotPrime(p)) };
    }
    if k < 3 {
        return Err(Error::InvalidParams(alloc::format!("k must be at least 3, got {k}")));
    }
    if !(h_nu >= 0.0) || h_tau < h_nu - 1e-12 {
        return Err(Error::InvalidParams(alloc::format!(
            "entropies must satisfy h_tau >= h_nu >= 0, got {h_tau} and {h_nu}"
        )));
    }
    let target = prime_target(h_tau, h_nu, n, k);
    if !(target <= MAX_PRIME_TARGET) {
        return Err(Error::PrimeTooLarge(target));
    }
    Ok(next_prime(libm::ceil(target) as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn agrees_with_trial_division() {
        for n in 0..20_000 {
            assert_eq!(is_prime(n), trial(n), "{n}");
        }
        // strong pseudoprimes to several small bases
        for n in [3_215_031_751u64, 2_152_302_898_747, 3_474_749_660_383, 341_550_071_728_321] {
            assert!(!is_prime(n));
        }
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(u64::MAX));
    }

    #[test]
    fn prime_choice_examples() {
        let h_nu = 3f64.ln() - 2.0 / 3.0 * 2f64.ln();
        assert_eq!(choose_prime(3f64.ln(), h_nu, 6, 3, None), Ok(17));
        assert_eq!(choose_prime(0.1, 0.0, 1, 3, Some(31)), Ok(31));
        assert_eq!(choose_prime(0.1, 0.0, 1, 3, Some(33)), Err(Error::NotPrime(33)));
        assert_eq!(choose_prime(0.5, 0.5, 40, 3, None), Ok(2));
        assert!(matches!(choose_prime(1.0, 0.0, 100, 3, None), Err(Error::PrimeTooLarge(_))));
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(5), Some((5, 1)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }
}
