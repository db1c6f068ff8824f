//! Compositions `T_{r,l}`, symmetric tensors stored per orbit, marginals,
//! symmetrization and max-entropy fitting to a prescribed marginal.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::distributions::ScaledDistribution;
use crate::error::{Error, Result};
use crate::scalar::Weight;

pub const IPF_MAX_SWEEPS: usize = 10_000;

/// All `arity`-tuples of nonnegative integers summing to `r`, in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionTable {
    r: usize,
    arity: usize,
    elements: Vec<Vec<u32>>,
}

impl CompositionTable {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn elements(&self) -> &[Vec<u32>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, t: &[u32]) -> Option<usize> {
        self.elements.binary_search_by(|e| e.as_slice().cmp(t)).ok()
    }
}

pub fn enumerate_compositions(r: usize, arity: usize) -> Result<CompositionTable> {
    if arity < 2 {
        return Err(Error::ArityTooSmall(arity));
    }
    let mut elements = Vec::new();
    let mut cur = alloc::vec![0u32; arity];
    fill(&mut cur, 0, r as u32, &mut elements);
    Ok(CompositionTable { r, arity, elements })
}

fn fill(cur: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(cur.clone());
        return;
    }
    for v in 0..=left {
        cur[pos] = v;
        fill(cur, pos + 1, left - v, out);
    }
}

/// Sorted non-increasing copy: the orbit representative.
pub fn canonical(t: &[u32]) -> Vec<u32> {
    let mut v = t.to_vec();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

/// Number of distinct permutations of `t`.
pub fn orbit_size(t: &[u32]) -> u64 {
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for &a in t {
        *counts.entry(a).or_insert(0) += 1;
    }
    let mut size = factorial(t.len() as u64);
    for &c in counts.values() {
        size /= factorial(c);
    }
    size
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Orbit representatives of `T_{r,arity}` in lexicographic order.
pub fn orbit_representatives(r: usize, arity: usize) -> Result<Vec<Vec<u32>>> {
    let table = enumerate_compositions(r, arity)?;
    Ok(table
        .elements
        .into_iter()
        .filter(|t| t.windows(2).all(|w| w[0] >= w[1]))
        .collect())
}

/// An `S_l`-symmetric weight function on `T_{r,l}`. The map holds the
/// weight of each single element, keyed by its orbit representative.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTensor<T = f64> {
    r: usize,
    arity: usize,
    orbits: BTreeMap<Vec<u32>, T>,
}

impl<T: Weight> SymmetricTensor<T> {
    /// Builds from per-element weights keyed by any member of each orbit.
    /// Orbits not mentioned get weight zero.
    pub fn from_orbits(r: usize, arity: usize, weights: impl IntoIterator<Item = (Vec<u32>, T)>) -> Result<Self> {
        let mut orbits: BTreeMap<Vec<u32>, T> =
            orbit_representatives(r, arity)?.into_iter().map(|rep| (rep, T::zero())).collect();
        for (t, w) in weights {
            if t.len() != arity || t.iter().map(|&a| a as usize).sum::<usize>() != r {
                return Err(Error::InvalidParams(alloc::format!("{t:?} is not in T_({r},{arity})")));
            }
            if w.is_negative() {
                return Err(Error::NegativeWeight { index: 0, value: w.to_f64() });
            }
            orbits.insert(canonical(&t), w);
        }
        Ok(SymmetricTensor { r, arity, orbits })
    }

    pub fn uniform(r: usize, arity: usize) -> Result<Self> {
        let count = enumerate_compositions(r, arity)?.len();
        let w = T::from_ratio(1, count as i64);
        let reps = orbit_representatives(r, arity)?;
        Self::from_orbits(r, arity, reps.into_iter().map(|rep| (rep, w.clone())))
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// `(representative, element weight, orbit size)` in representative order.
    pub fn orbits(&self) -> impl Iterator<Item = (&Vec<u32>, &T, u64)> {
        self.orbits.iter().map(|(rep, w)| (rep, w, orbit_size(rep)))
    }

    pub fn weight(&self, t: &[u32]) -> T {
        self.orbits.get(&canonical(t)).cloned().unwrap_or_else(T::zero)
    }

    pub fn total_mass(&self) -> T {
        self.orbits()
            .fold(T::zero(), |acc, (_, w, size)| acc + w.clone() * T::from_ratio(size as i64, 1))
    }

    pub fn min_weight(&self) -> T {
        let mut it = self.orbits.values();
        let first = it.next().cloned().unwrap_or_else(T::zero);
        it.fold(first, |acc, w| if *w < acc { w.clone() } else { acc })
    }

    /// Projection onto the first coordinate (equal to every other one).
    pub fn marginal(&self) -> ScaledDistribution<T> {
        let mut out = alloc::vec![T::zero(); self.r + 1];
        for (rep, w, size) in self.orbits() {
            let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
            for &a in rep {
                *counts.entry(a).or_insert(0) += 1;
            }
            for (a, c) in counts {
                let hits = size * c / self.arity as u64;
                out[a as usize] = out[a as usize].clone() + w.clone() * T::from_ratio(hits as i64, 1);
            }
        }
        ScaledDistribution::from_raw(out)
    }

    /// Entropy in nats of the normalized tensor.
    pub fn entropy(&self) -> f64 {
        let total = self.total_mass().to_f64();
        self.orbits()
            .map(|(_, w, size)| {
                let p = w.to_f64() / total;
                if p > 0.0 {
                    -(size as f64) * p * libm::log(p)
                } else {
                    0.0
                }
            })
            .sum()
    }

    pub fn to_dense(&self) -> DenseTensor<T> {
        let table = enumerate_compositions(self.r, self.arity).expect("arity validated at construction");
        let weights = table.elements.iter().map(|t| self.weight(t)).collect();
        DenseTensor { table, weights }
    }

    pub fn to_f64(&self) -> SymmetricTensor<f64> {
        SymmetricTensor {
            r: self.r,
            arity: self.arity,
            orbits: self.orbits.iter().map(|(k, w)| (k.clone(), w.to_f64())).collect(),
        }
    }

    pub fn normalized(&self) -> Self {
        let total = self.total_mass();
        SymmetricTensor {
            r: self.r,
            arity: self.arity,
            orbits: self.orbits.iter().map(|(k, w)| (k.clone(), w.clone() / total.clone())).collect(),
        }
    }
}

/// A weight per element of `T_{r,l}`, aligned with the table order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor<T = f64> {
    table: CompositionTable,
    weights: Vec<T>,
}

impl<T: Weight> DenseTensor<T> {
    pub fn new(table: CompositionTable, weights: Vec<T>) -> Result<Self> {
        if weights.len() != table.len() {
            return Err(Error::InvalidParams(alloc::format!(
                "expected {} weights, got {}",
                table.len(),
                weights.len()
            )));
        }
        for (index, w) in weights.iter().enumerate() {
            if w.is_negative() {
                return Err(Error::NegativeWeight { index, value: w.to_f64() });
            }
        }
        Ok(DenseTensor { table, weights })
    }

    pub fn table(&self) -> &CompositionTable {
        &self.table
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn projection(&self, coord: usize) -> Vec<T> {
        project(&self.table, &self.weights, coord)
    }

    pub fn is_symmetric(&self) -> bool {
        let mut seen: BTreeMap<Vec<u32>, &T> = BTreeMap::new();
        for (t, w) in self.table.elements.iter().zip(&self.weights) {
            match seen.get(&canonical(t)) {
                Some(prev) if *prev != w => return false,
                Some(_) => {}
                None => {
                    seen.insert(canonical(t), w);
                }
            }
        }
        true
    }

    /// The common coordinate projection; fails unless the tensor is symmetric.
    pub fn marginal(&self) -> Result<ScaledDistribution<T>> {
        if !self.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(ScaledDistribution::from_raw(self.projection(0)))
    }

    pub fn entropy(&self) -> f64 {
        let total: f64 = self.weights.iter().map(Weight::to_f64).sum();
        self.weights
            .iter()
            .map(|w| {
                let p = w.to_f64() / total;
                if p > 0.0 {
                    -p * libm::log(p)
                } else {
                    0.0
                }
            })
            .sum()
    }
}

/// Orbit average `(1/l!) sum_sigma w(t^sigma)`.
pub fn symmetrize<T: Weight>(w: &DenseTensor<T>) -> SymmetricTensor<T> {
    let mut sums: BTreeMap<Vec<u32>, T> = BTreeMap::new();
    for (t, x) in w.table.elements.iter().zip(&w.weights) {
        let e = sums.entry(canonical(t)).or_insert_with(T::zero);
        *e = e.clone() + x.clone();
    }
    let orbits = sums
        .into_iter()
        .map(|(rep, s)| {
            let size = orbit_size(&rep);
            (rep, s / T::from_ratio(size as i64, 1))
        })
        .collect();
    SymmetricTensor { r: w.table.r, arity: w.table.arity, orbits }
}

/// Maximum-entropy symmetric tensor on `T_{r,arity}` whose coordinate
/// projections all equal `target` (normalized), by cyclic iterative
/// proportional fitting from the uniform tensor.
pub fn maxent_with_marginals(
    target: &ScaledDistribution<f64>,
    r: usize,
    arity: usize,
    tol: f64,
) -> Result<SymmetricTensor<f64>> {
    let table = enumerate_compositions(r, arity)?;
    let total = target.total();
    if !(total > 0.0) {
        return Err(Error::InvalidParams("target has zero mass".into()));
    }
    if (r + 1..=target.support_max()).any(|i| target.weights()[i] > 0.0) {
        return Err(Error::InvalidParams(alloc::format!("target is not supported on 0..={r}")));
    }
    let goal: Vec<f64> = (0..=r).map(|i| target.at(i) / total).collect();
    let mut w = alloc::vec![1.0 / table.len() as f64; table.len()];
    let mut residual = f64::INFINITY;
    for _ in 0..IPF_MAX_SWEEPS {
        residual = (0..arity)
            .map(|c| l1(&project(&table, &w, c), &goal))
            .fold(0.0, f64::max);
        if residual <= tol {
            return Ok(symmetrize(&DenseTensor { table, weights: w }));
        }
        for c in 0..arity {
            let proj = project(&table, &w, c);
            for (t, x) in table.elements.iter().zip(w.iter_mut()) {
                let a = t[c] as usize;
                *x = if proj[a] > 0.0 { *x * goal[a] / proj[a] } else { 0.0 };
            }
        }
    }
    Err(Error::NoConvergence { iterations: IPF_MAX_SWEEPS, residual })
}

fn project<T: Weight>(table: &CompositionTable, weights: &[T], coord: usize) -> Vec<T> {
    let mut out = alloc::vec![T::zero(); table.r + 1];
    for (t, w) in table.elements.iter().zip(weights) {
        let a = t[coord] as usize;
        out[a] = out[a].clone() + w.clone();
    }
    out
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| libm::fabs(x - y)).sum()
}

/// `sum |a_i - b_i|` over two scaled distributions, padding with zeros.
pub fn l1_distance<T: Weight>(a: &ScaledDistribution<T>, b: &ScaledDistribution<T>) -> T {
    let len = a.weights().len().max(b.weights().len());
    (0..len).fold(T::zero(), |acc, i| acc + (a.at(i) - b.at(i)).abs())
}

impl<T: Weight> SymmetricTensor<T> {
    pub fn is_zero(&self) -> bool {
        self.orbits.values().all(Zero::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn composition_counts() {
        let t = enumerate_compositions(1, 3).unwrap();
        assert_eq!(t.elements(), &[alloc::vec![0, 0, 1], alloc::vec![0, 1, 0], alloc::vec![1, 0, 0]]);
        assert_eq!(enumerate_compositions(2, 3).unwrap().len(), 6);
        assert_eq!(enumerate_compositions(4, 4).unwrap().len(), 35);
        assert!(enumerate_compositions(3, 1).is_err());
        for r in 0..=12usize {
            for l in 2..=6usize {
                let n = enumerate_compositions(r, l).unwrap().len() as u64;
                assert_eq!(n, num_integer::binomial((r + l - 1) as u64, (l - 1) as u64));
            }
        }
    }

    #[test]
    fn uniform_marginal() {
        let t: SymmetricTensor<Rational> = SymmetricTensor::uniform(1, 3).unwrap();
        assert_eq!(t.marginal().weights(), &[rat(2, 3), rat(1, 3)]);
        let point = SymmetricTensor::from_orbits(4, 3, [(alloc::vec![0, 4, 0], rat(1, 3))]).unwrap();
        let mu = point.marginal();
        assert_eq!(mu.at(0), rat(2, 3));
        assert_eq!(mu.at(4), rat(1, 3));
    }

    #[test]
    fn dense_marginal_rejects_asymmetric() {
        let table = enumerate_compositions(1, 3).unwrap();
        let d = DenseTensor::new(table, alloc::vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(d.marginal(), Err(Error::NotSymmetric));
        let s = symmetrize(&d);
        assert!((s.weight(&[0, 1, 0]) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn maxent_forced_cases() {
        let target = ScaledDistribution::new(alloc::vec![2.0 / 3.0, 1.0 / 3.0]).unwrap();
        let t = maxent_with_marginals(&target, 1, 3, 1e-12).unwrap();
        assert!((t.weight(&[1, 0, 0]) - 1.0 / 3.0).abs() < 1e-12);
        let point = ScaledDistribution::new(alloc::vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let t = maxent_with_marginals(&point, 6, 3, 1e-12).unwrap();
        assert!((t.weight(&[2, 2, 2]) - 1.0).abs() < 1e-12);
    }
}
