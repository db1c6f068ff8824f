//! JSON and CSV shapes for everything the CLI reads or writes.
//!
//! Rationals travel as `"p/q"` strings so no precision is lost; reals are
//! plain JSON numbers. Each `into_*` conversion re-runs the owning type's
//! validation, so a file that parses is also a valid value.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};

use sumfree_core::compositions::SymmetricTensor;
use sumfree_core::construction::{ConstructionReport, Mode, SumFreeCollection};
use sumfree_core::marginal_decomposition::SimpleCombination;
use sumfree_core::rounding::{EntropyGapReport, RoundedPair};
use sumfree_core::verification::{SuiteReport, Violation};
use sumfree_core::Rational;

/// A weight that is either exact (`"p/q"`) or a float.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightJson {
    Exact(String),
    Real(f64),
}

impl WeightJson {
    pub fn exact(q: &Rational) -> Self {
        WeightJson::Exact(q.to_string())
    }

    pub fn to_rational(&self) -> anyhow::Result<Rational> {
        match self {
            WeightJson::Exact(s) => s.trim().parse::<Rational>().map_err(|e| anyhow!("bad rational {s:?}: {e}")),
            WeightJson::Real(x) => bail!("expected an exact \"p/q\" weight, got {x}"),
        }
    }

    pub fn to_f64(&self) -> anyhow::Result<f64> {
        match self {
            WeightJson::Real(x) => Ok(*x),
            WeightJson::Exact(_) => Ok(num_traits::ToPrimitive::to_f64(&self.to_rational()?).unwrap_or(f64::NAN)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitJson {
    pub rep: Vec<u32>,
    pub weight: WeightJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorJson {
    pub r: usize,
    pub arity: usize,
    pub orbits: Vec<OrbitJson>,
}

impl TensorJson {
    pub fn from_exact(t: &SymmetricTensor<Rational>) -> Self {
        TensorJson {
            r: t.r(),
            arity: t.arity(),
            orbits: t.orbits().map(|(rep, w, _)| OrbitJson { rep: rep.clone(), weight: WeightJson::exact(w) }).collect(),
        }
    }

    pub fn from_real(t: &SymmetricTensor<f64>) -> Self {
        TensorJson {
            r: t.r(),
            arity: t.arity(),
            orbits: t.orbits().map(|(rep, w, _)| OrbitJson { rep: rep.clone(), weight: WeightJson::Real(*w) }).collect(),
        }
    }

    pub fn into_exact(self) -> anyhow::Result<SymmetricTensor<Rational>> {
        let orbits = self
            .orbits
            .into_iter()
            .map(|o| Ok((o.rep, o.weight.to_rational()?)))
            .collect::<anyhow::Result<Vec<_>>>()?;
        Ok(SymmetricTensor::from_orbits(self.r, self.arity, orbits)?)
    }

    pub fn into_real(self) -> anyhow::Result<SymmetricTensor<f64>> {
        let orbits = self
            .orbits
            .into_iter()
            .map(|o| Ok((o.rep, o.weight.to_f64()?)))
            .collect::<anyhow::Result<Vec<_>>>()?;
        Ok(SymmetricTensor::from_orbits(self.r, self.arity, orbits)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomJson {
    pub tuple: Vec<u32>,
    pub lambda: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationJson {
    pub n: usize,
    pub k: usize,
    pub atoms: Vec<AtomJson>,
}

impl CombinationJson {
    pub fn from_combination(c: &SimpleCombination<Rational>) -> Self {
        CombinationJson {
            n: c.n(),
            k: c.k(),
            atoms: c
                .coefficients()
                .iter()
                .map(|(t, l)| AtomJson { tuple: t.clone(), lambda: l.to_string() })
                .collect(),
        }
    }

    pub fn into_combination(self) -> anyhow::Result<SimpleCombination<Rational>> {
        let mut c = SimpleCombination::new(self.n, self.k);
        for (i, a) in self.atoms.into_iter().enumerate() {
            let lambda = WeightJson::Exact(a.lambda).to_rational().with_context(|| format!("atom {i}"))?;
            c.add(&a.tuple, lambda).with_context(|| format!("atom {i}"))?;
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyGapJson {
    pub entropy_rounded: f64,
    pub entropy_maxent: f64,
    pub gap: f64,
    pub scaled_gap: Option<f64>,
}

impl From<&EntropyGapReport> for EntropyGapJson {
    fn from(r: &EntropyGapReport) -> Self {
        EntropyGapJson {
            entropy_rounded: r.entropy_rounded,
            entropy_maxent: r.entropy_maxent,
            gap: r.gap,
            scaled_gap: r.scaled_gap.is_finite().then_some(r.scaled_gap),
        }
    }
}

/// The rounded tensor next to the one it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundedPairJson {
    pub n: usize,
    pub tau: TensorJson,
    pub tau_tilde: TensorJson,
    pub nu_n: Vec<String>,
    pub linf_gap: f64,
    /// `m^k / n`.
    pub linf_bound: f64,
    pub zero_orbits: usize,
    pub entropy_gap: EntropyGapJson,
}

impl RoundedPairJson {
    pub fn new(tau: &SymmetricTensor<Rational>, pair: &RoundedPair, m: usize, gap: &EntropyGapReport) -> Self {
        RoundedPairJson {
            n: pair.n,
            tau: TensorJson::from_exact(tau),
            tau_tilde: TensorJson::from_exact(&pair.tau_tilde),
            nu_n: pair.nu_n.weights().iter().map(|w| w.to_string()).collect(),
            linf_gap: pair.linf_gap,
            linf_bound: (m as f64).powi(tau.arity() as i32) / pair.n as f64,
            zero_orbits: pair.zero_orbits,
            entropy_gap: gap.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeJson {
    Integer,
    Zm,
}

impl From<Mode> for ModeJson {
    fn from(m: Mode) -> Self {
        match m {
            Mode::IntegerVectors => ModeJson::Integer,
            Mode::Zm => ModeJson::Zm,
        }
    }
}

impl From<ModeJson> for Mode {
    fn from(m: ModeJson) -> Self {
        match m {
            ModeJson::Integer => Mode::IntegerVectors,
            ModeJson::Zm => Mode::Zm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub prime_target: f64,
    pub prime_rule: String,
    pub line_size: usize,
    pub x0_size: usize,
    pub class_sizes: Vec<usize>,
    pub candidates: usize,
    pub isolated: usize,
    pub entropy_tau: f64,
    pub entropy_nu: f64,
    pub zero_orbits: usize,
    /// `capacity^n`, for comparison with the number of tuples.
    pub capacity_pow_n: f64,
}

impl ReportJson {
    pub fn new(r: &ConstructionReport, capacity: f64) -> Self {
        ReportJson {
            prime_target: r.prime_target,
            prime_rule: r.prime_rule.to_string(),
            line_size: r.line_size,
            x0_size: r.x0_size,
            class_sizes: r.class_sizes.clone(),
            candidates: r.candidates,
            isolated: r.isolated,
            entropy_tau: r.entropy_tau,
            entropy_nu: r.entropy_nu,
            zero_orbits: r.zero_orbits,
            capacity_pow_n: capacity.powi(r.n as i32),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectionJson {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    #[serde(rename = "P")]
    pub prime: u64,
    pub mode: ModeJson,
    pub tuples: Vec<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ReportJson>,
}

impl CollectionJson {
    pub fn new(c: &SumFreeCollection, report: Option<ReportJson>) -> Self {
        CollectionJson {
            m: c.m,
            k: c.k,
            n: c.n,
            seed: c.seed,
            prime: c.prime,
            mode: c.mode.into(),
            tuples: c.tuples.clone(),
            report,
        }
    }

    pub fn to_collection(&self) -> SumFreeCollection {
        SumFreeCollection {
            mode: self.mode.into(),
            m: self.m,
            k: self.k,
            n: self.n,
            seed: self.seed,
            prime: self.prime,
            tuples: self.tuples.clone(),
        }
    }
}

/// A `verify` input: one collection or a list of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CollectionFile {
    One(CollectionJson),
    Many(Vec<CollectionJson>),
}

impl CollectionFile {
    pub fn into_vec(self) -> Vec<CollectionJson> {
        match self {
            CollectionFile::One(c) => vec![c],
            CollectionFile::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationJson {
    pub kind: String,
    pub indices: Vec<usize>,
    pub detail: String,
}

impl From<&Violation> for ViolationJson {
    fn from(v: &Violation) -> Self {
        ViolationJson { kind: v.kind.as_str().to_string(), indices: v.indices.clone(), detail: v.detail.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReportJson {
    pub suite: String,
    pub seed: u64,
    pub cases: u64,
    pub failures: Vec<ViolationJson>,
    pub stats: BTreeMap<String, f64>,
}

impl From<&SuiteReport> for SuiteReportJson {
    fn from(r: &SuiteReport) -> Self {
        SuiteReportJson {
            suite: r.suite.clone(),
            seed: r.seed,
            cases: r.cases,
            failures: r.failures.iter().map(Into::into).collect(),
            stats: r.stats.clone(),
        }
    }
}

/// One line of the construction summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    #[serde(rename = "P")]
    pub prime: u64,
    #[serde(rename = "R")]
    pub line_size: usize,
    #[serde(rename = "|X0|")]
    pub x0_size: usize,
    pub candidates: usize,
    pub isolated: usize,
}

impl From<&ConstructionReport> for SummaryRow {
    fn from(r: &ConstructionReport) -> Self {
        SummaryRow {
            m: r.m,
            k: r.k,
            n: r.n,
            seed: r.seed,
            prime: r.prime,
            line_size: r.line_size,
            x0_size: r.x0_size,
            candidates: r.candidates,
            isolated: r.isolated,
        }
    }
}

pub fn summary_csv(rows: &[SummaryRow]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(["m", "k", "n", "seed", "P", "R", "|X0|", "candidates", "isolated"])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}
