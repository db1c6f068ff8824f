//! Oracles for the decomposition: an exact phase-one simplex deciding
//! membership in the cone of atoms, and the six properties of `alpha_j`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::{Checked, Violation, ViolationKind};
use crate::compositions::orbit_representatives;
use crate::distributions::ScaledDistribution;
use crate::error::{Error, Result};
use crate::marginal_decomposition::alpha;
use crate::scalar::{int, Rational};

/// Counts of each value `0..=n` in a composition.
fn atom_column(rep: &[u32], n: usize) -> Vec<Rational> {
    let mut col = vec![Rational::zero(); n + 1];
    for &a in rep {
        col[a as usize] += Rational::one();
    }
    col
}

/// Nonnegative weights on the sorted compositions of `n` into `k` parts
/// whose atoms add up to `psi`, or `None` if `psi` is outside their cone.
pub fn cone_membership(psi: &ScaledDistribution<Rational>, k: usize) -> Result<Option<BTreeMap<Vec<u32>, Rational>>> {
    let n = psi.support_max();
    let reps = orbit_representatives(n, k)?;
    let rows = n + 1;
    let cols = reps.len();
    let width = cols + rows;
    // tableau rows: [A | I | b]; artificials start in the basis
    let mut t: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            let mut row = vec![Rational::zero(); width + 1];
            for (j, rep) in reps.iter().enumerate() {
                row[j] = atom_column(rep, n)[i].clone();
            }
            row[cols + i] = Rational::one();
            row[width] = psi.at(i);
            row
        })
        .collect();
    let mut basis: Vec<usize> = (cols..width).collect();
    // reduced costs of the phase-one objective (sum of artificials)
    let mut obj = vec![Rational::zero(); width + 1];
    for row in &t {
        for j in 0..cols {
            obj[j] -= &row[j];
        }
        obj[width] -= &row[width];
    }
    loop {
        // Bland: lowest index with negative reduced cost
        let Some(enter) = (0..width).find(|&j| obj[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..rows {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][width] / &t[i][enter];
            let better = match &leave {
                None => true,
                Some((r, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*r]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((r, _)) = leave else {
            return Err(Error::Invariant("phase-one objective is unbounded".into()));
        };
        let piv = t[r][enter].clone();
        t[r].iter_mut().for_each(|v| *v /= &piv);
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                row.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= &f * p);
            }
        }
        let f = obj[enter].clone();
        obj.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= &f * p);
        basis[r] = enter;
    }
    if !obj[width].is_zero() {
        return Ok(None);
    }
    let mut out = BTreeMap::new();
    for (i, &b) in basis.iter().enumerate() {
        if b < cols && !t[i][width].is_zero() {
            out.insert(reps[b].clone(), t[i][width].clone());
        }
    }
    Ok(Some(out))
}

/// Evaluates a map from compositions to weights, independently of
/// [`crate::marginal_decomposition::SimpleCombination`].
pub fn evaluate_atoms(coefficients: &BTreeMap<Vec<u32>, Rational>, n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n + 1];
    for (rep, lambda) in coefficients {
        for &a in rep {
            out[a as usize] += lambda;
        }
    }
    out
}

/// Checks properties (a) to (f) of `alpha_j` directly from its definition.
pub fn alpha_property_check(n: usize, k: usize, j: usize) -> Checked<()> {
    let (a, comb) = alpha(n, k, j)?;
    let w = a.weights();
    let fail = |prop: &str, detail: alloc::string::String| {
        Ok(Err(Violation::new(ViolationKind::Alpha, vec![n, k, j], format!("({prop}) {detail}"))))
    };
    if w.len() != n + 1 {
        return fail("a", format!("support has {} points, expected {}", w.len(), n + 1));
    }
    if let Some((t, _)) = comb.coefficients().iter().find(|(t, c)| c.is_negative() || t.len() != k || t.iter().sum::<u32>() as usize != n) {
        return fail("a", format!("atom {t:?} is not a nonnegative composition of {n} into {k} parts"));
    }
    if evaluate_atoms(comb.coefficients(), n) != w {
        return fail("a", "witness does not evaluate to alpha".into());
    }
    let total = w.iter().fold(Rational::zero(), |s, x| s + x);
    let moment = w.iter().enumerate().fold(Rational::zero(), |s, (i, x)| s + int(i as i64) * x);
    if moment * int(k as i64) != total * int(n as i64) {
        return fail("b", "mean differs from n/k".into());
    }
    if let Some(i) = (1..j).find(|&i| w[i] > w[i + 1]) {
        return fail("c", format!("alpha({i}) > alpha({})", i + 1));
    }
    if let Some(i) = (j + 1..=n).find(|&i| !w[i].is_zero()) {
        return fail("d", format!("alpha({i}) is nonzero above j"));
    }
    if w[j].is_zero() {
        return fail("e", "alpha(j) is zero".into());
    }
    if n >= 2 * k {
        let (f, c) = (n / k, n.div_ceil(k));
        if int(2) * &w[f] < &w[f - 1] + &w[c] {
            return fail("f", format!("2 alpha({f}) < alpha({}) + alpha({c})", f - 1));
        }
    }
    Ok(Ok(()))
}
