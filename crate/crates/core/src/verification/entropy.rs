//! Entropy of linear images of symmetric tensors and the perturbation bound.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::linalg::rational_rank_q;
use super::{Checked, Violation, ViolationKind, CHECK_TOL};
use crate::compositions::{DenseTensor, SymmetricTensor};
use crate::distributions::ScaledDistribution;
use crate::error::{Error, Result};
use crate::scalar::{int, Rational, Weight};

/// A subspace of the sum-zero vectors in `Q^arity`, given by a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSpec {
    arity: usize,
    basis: Vec<Vec<Rational>>,
}

impl SubspaceSpec {
    pub fn new(arity: usize, basis: Vec<Vec<Rational>>) -> Result<Self> {
        if arity < 2 {
            return Err(Error::ArityTooSmall(arity));
        }
        for (i, b) in basis.iter().enumerate() {
            if b.len() != arity {
                return Err(Error::InvalidParams(format!("basis vector {i} has length {}, expected {arity}", b.len())));
            }
            if !b.iter().fold(Rational::zero(), |a, x| a + x).is_zero() {
                return Err(Error::InvalidParams(format!("basis vector {i} does not sum to zero")));
            }
        }
        if rational_rank_q(&basis) != basis.len() {
            return Err(Error::InvalidParams("basis vectors are linearly dependent".into()));
        }
        Ok(SubspaceSpec { arity, basis })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `(1, ..., 1, -(arity-1))`.
    pub fn anchor(arity: usize) -> Vec<Rational> {
        let mut v = vec![int(1); arity];
        v[arity - 1] = int(1 - arity as i64);
        v
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        rational_rank_q(&rows) == self.dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceEntropy {
    /// Entropy of the joint image `(w(t))_{w in basis}`.
    pub image: f64,
    pub tensor: f64,
    pub marginal: f64,
    /// `dim W / (l-1) * H(pi)`.
    pub plain_bound: f64,
    /// `H(mu) + (dim W - 1)/(l-2) * (H(pi) - H(mu))`, in anchored mode.
    pub anchored_bound: Option<f64>,
}

fn entropy_of_masses<T: Weight>(masses: impl Iterator<Item = T>, total: f64) -> f64 {
    masses
        .map(|w| w.to_f64() / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * libm::log(p))
        .sum()
}

/// Lower bounds on the entropy of `t -> (w(t))_{w in W}` under a symmetric
/// `pi`. Image masses are summed exactly before any logarithm.
pub fn subspace_entropy_check<T: Weight>(pi: &DenseTensor<T>, w: &SubspaceSpec, anchored: bool) -> Checked<SubspaceEntropy> {
    let l = pi.table().arity();
    if w.arity() != l {
        return Err(Error::InvalidParams(format!("subspace arity {} differs from tensor arity {l}", w.arity())));
    }
    if !pi.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if anchored {
        if l < 3 {
            return Err(Error::InvalidParams("anchored mode needs arity at least 3".into()));
        }
        if !w.contains(&SubspaceSpec::anchor(l)) {
            return Err(Error::Hypothesis("anchor (1, ..., 1, -(l-1)) is not in the subspace".into()));
        }
    }
    let total = pi.weights().iter().fold(T::zero(), |a, x| a + x.clone()).to_f64();
    let mut groups: BTreeMap<Vec<Rational>, T> = BTreeMap::new();
    for (t, mass) in pi.table().elements().iter().zip(pi.weights()) {
        let key: Vec<Rational> = w
            .basis()
            .iter()
            .map(|b| b.iter().zip(t).fold(Rational::zero(), |acc, (c, &x)| acc + c * int(x as i64)))
            .collect();
        let slot = groups.entry(key).or_insert_with(T::zero);
        *slot = slot.clone() + mass.clone();
    }
    let image = entropy_of_masses(groups.into_values(), total);
    let tensor = pi.entropy();
    let marginal = pi.marginal()?.entropy();
    let plain_bound = w.dim() as f64 / (l - 1) as f64 * tensor;
    let anchored_bound = anchored.then(|| marginal + (w.dim() as f64 - 1.0) / (l - 2) as f64 * (tensor - marginal));
    let report = SubspaceEntropy { image, tensor, marginal, plain_bound, anchored_bound };
    if image < plain_bound - CHECK_TOL {
        return Ok(Err(Violation::new(
            ViolationKind::SubspaceEntropy,
            vec![w.dim(), l],
            format!("image entropy {image} below {plain_bound}"),
        )));
    }
    if let Some(b) = anchored_bound {
        if image < b - CHECK_TOL {
            return Ok(Err(Violation::new(
                ViolationKind::AnchoredEntropy,
                vec![w.dim(), l],
                format!("image entropy {image} below anchored bound {b}"),
            )));
        }
    }
    Ok(Ok(report))
}

/// Convenience wrapper for orbit-stored tensors.
pub fn subspace_entropy_check_symmetric<T: Weight>(
    pi: &SymmetricTensor<T>,
    w: &SubspaceSpec,
    anchored: bool,
) -> Checked<SubspaceEntropy> {
    subspace_entropy_check(&pi.to_dense(), w, anchored)
}

/// `|H(w1) - H(w0)| <= ||w1 - w0||_1 ln(1/c)` when both are at least `c`
/// everywhere. Returns `(lhs, rhs)`.
pub fn perturbation_entropy_check(w0: &ScaledDistribution<f64>, w1: &ScaledDistribution<f64>, c: f64) -> Checked<(f64, f64)> {
    if w0.weights().len() != w1.weights().len() {
        return Err(Error::InvalidParams("distributions have different supports".into()));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParams(format!("c must be positive, got {c}")));
    }
    for (name, w) in [("w0", w0), ("w1", w1)] {
        if (w.total() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!("{name} is not normalized")));
        }
        if let Some((i, v)) = w.weights().iter().enumerate().find(|(_, &v)| v < c) {
            return Err(Error::Hypothesis(format!("{name}({i}) = {v} is below c = {c}")));
        }
    }
    let lhs = (w1.entropy() - w0.entropy()).abs();
    let l1: f64 = w0.weights().iter().zip(w1.weights()).map(|(a, b)| (a - b).abs()).sum();
    let rhs = l1 * libm::log(1.0 / c);
    if lhs > rhs + CHECK_TOL {
        return Ok(Err(Violation::new(ViolationKind::Perturbation, vec![], format!("{lhs} exceeds {rhs}"))));
    }
    Ok(Ok((lhs, rhs)))
}
