//! Argument parsing and dispatch for the `sumfree` binary.

use std::ops::Range;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use sumfree_core::construction::{
    construct_prepared, prepare, ConstructOptions, Construction, Method, DEFAULT_CANDIDATE_CAP, DEFAULT_ENUMERATION_CAP,
};
use sumfree_core::distributions::{capacity, nu, nu_rational, Params, DEFAULT_TOL};
use sumfree_core::marginal_decomposition::{symmetric_marginal_tensor, MarginalTensor};
use sumfree_core::rounding::{entropy_gap_report, round_tau};
use sumfree_core::verification::{bounded_tuple_count, run_suite, verify_sumfree, Violation, SUITES};
use sumfree_core::Error;

use crate::formats::{
    summary_csv, to_json, CollectionFile, CollectionJson, CombinationJson, ReportJson, RoundedPairJson, SuiteReportJson,
    SummaryRow, TensorJson, ViolationJson,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sumfree", version, about = "Capacity constants, marginal tensors and k-colored sum-free sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Numerical tolerance for real-valued steps.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Denominator precision used to turn the geometric weights into rationals.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub precision: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimizer, capacity and entropy of the geometric weights.
    Gamma { m: usize, k: usize },
    /// The geometric weights on {0, ..., m-1}.
    Nu { m: usize, k: usize },
    /// A strictly positive symmetric tensor whose marginal is the rationalized weights.
    Tau {
        m: usize,
        k: usize,
        /// Emit the atom decomposition instead of the tensor.
        #[arg(long)]
        witness: bool,
    },
    /// The tensor rounded to multiples of k/n, with its gap report.
    Round { m: usize, k: usize, n: usize },
    /// Build a k-colored sum-free collection in {0..m-1}^n.
    Construct {
        m: usize,
        k: usize,
        n: usize,
        #[arg(long, default_value_t = 0, conflicts_with = "seeds")]
        seed: u64,
        /// Seed range, `a..b` (exclusive) or `a..=b`.
        #[arg(long, value_parser = parse_seeds)]
        seeds: Option<Range<u64>>,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, value_enum, default_value_t = MethodArg::Greedy)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Integer)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        enumeration_cap: u128,
        #[arg(long, default_value_t = DEFAULT_CANDIDATE_CAP)]
        candidate_cap: u64,
    },
    /// Check a collection file (one object or an array).
    Verify { file: PathBuf },
    /// Exact count of low-sum tuples against capacity^n.
    Bounds { m: usize, k: usize, n: usize },
    /// Run a randomized verification suite.
    Props {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Greedy,
    Behrend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Integer,
    Zm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn parse_seeds(s: &str) -> Result<Range<u64>, String> {
    let (a, b, inclusive) = if let Some((a, b)) = s.split_once("..=") {
        (a, b, true)
    } else if let Some((a, b)) = s.split_once("..") {
        (a, b, false)
    } else {
        return Err(format!("expected a..b or a..=b, got {s:?}"));
    };
    let a: u64 = a.trim().parse().map_err(|e| format!("bad range start {a:?}: {e}"))?;
    let b: u64 = b.trim().parse().map_err(|e| format!("bad range end {b:?}: {e}"))?;
    let end = if inclusive { b.checked_add(1).ok_or("range end overflows")? } else { b };
    if a >= end {
        return Err(format!("seed range {s:?} is empty"));
    }
    Ok(a..end)
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    /// One JSON object, present whenever `code != 0`.
    pub stderr: Option<String>,
}

#[derive(Debug, Serialize)]
struct ErrorJson<'a> {
    error: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation: Option<ViolationJson>,
}

pub fn error_json(kind: &str, message: String, violation: Option<&Violation>) -> String {
    let e = ErrorJson { error: kind, message, violation: violation.map(Into::into) };
    serde_json::to_string(&e).unwrap_or_else(|_| format!("{{\"error\":\"{kind}\"}}")) + "\n"
}

/// Exit code and label for an error raised before any verdict.
fn classify(e: &anyhow::Error) -> (i32, &'static str) {
    match e.downcast_ref::<Error>() {
        Some(c) if c.is_resource_cap() => (EXIT_RESOURCE, "resource_cap"),
        Some(Error::Invariant(_)) => (EXIT_VIOLATION, "internal"),
        _ => (EXIT_USAGE, "invalid_input"),
    }
}

/// A successful run, possibly carrying a failed check.
struct Produced {
    text: String,
    violation: Option<Violation>,
}

impl Produced {
    fn ok(text: String) -> Self {
        Produced { text, violation: None }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let produced = match dispatch(cli) {
        Ok(p) => p,
        Err(e) => {
            let (code, kind) = classify(&e);
            return Outcome { code, stdout: String::new(), stderr: Some(error_json(kind, format!("{e:#}"), None)) };
        }
    };
    let mut stdout = produced.text;
    if let Some(path) = &cli.output {
        if let Err(e) = std::fs::write(path, &stdout) {
            let msg = format!("cannot write {}: {e}", path.display());
            return Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: Some(error_json("io", msg, None)) };
        }
        stdout = String::new();
    }
    match produced.violation {
        None => Outcome { code: EXIT_OK, stdout, stderr: None },
        Some(v) => Outcome {
            code: EXIT_VIOLATION,
            stdout,
            stderr: Some(error_json("violation", v.to_string(), Some(&v))),
        },
    }
}

#[derive(Serialize)]
struct GammaJson {
    m: usize,
    k: usize,
    gamma: f64,
    capacity: f64,
    entropy_nu: f64,
}

#[derive(Serialize)]
struct NuJson {
    m: usize,
    k: usize,
    gamma: f64,
    weights: Vec<f64>,
    mean: f64,
    entropy: f64,
}

#[derive(Serialize)]
struct BoundsJson {
    m: usize,
    k: usize,
    n: usize,
    exact: u128,
    capacity_pow_n: f64,
    ratio: f64,
    ok: bool,
}

#[derive(Serialize)]
struct VerifyEntry {
    index: usize,
    mode: &'static str,
    tuples: usize,
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    fallback: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation: Option<ViolationJson>,
}

fn marginal_tensor(cli: &Cli, m: usize, k: usize) -> anyhow::Result<MarginalTensor> {
    let p = Params::with(m, k, 0, cli.tol)?;
    let nu = nu_rational(&p, cli.precision)?;
    Ok(symmetric_marginal_tensor(&nu, k, cli.tol)?)
}

fn dispatch(cli: &Cli) -> anyhow::Result<Produced> {
    match &cli.command {
        Command::Gamma { m, k } => {
            let c = capacity(&Params::with(*m, *k, 0, cli.tol)?);
            let out = GammaJson { m: *m, k: *k, gamma: c.gamma, capacity: c.capacity, entropy_nu: c.entropy_nu };
            Ok(Produced::ok(to_json(&out)?))
        }
        Command::Nu { m, k } => {
            let p = Params::with(*m, *k, 0, cli.tol)?;
            let d = nu(&p);
            let out = NuJson {
                m: *m,
                k: *k,
                gamma: capacity(&p).gamma,
                weights: d.weights().to_vec(),
                mean: d.mean(),
                entropy: d.entropy(),
            };
            Ok(Produced::ok(to_json(&out)?))
        }
        Command::Tau { m, k, witness } => {
            let mt = marginal_tensor(cli, *m, *k)?;
            let text = if *witness {
                to_json(&CombinationJson::from_combination(&mt.combination))?
            } else {
                to_json(&TensorJson::from_exact(&mt.tensor))?
            };
            Ok(Produced::ok(text))
        }
        Command::Round { m, k, n } => {
            let tau = marginal_tensor(cli, *m, *k)?.tensor.normalized();
            let pair = round_tau(&tau, *n)?;
            let gap = entropy_gap_report(&pair, cli.tol)?;
            Ok(Produced::ok(to_json(&RoundedPairJson::new(&tau, &pair, *m, &gap))?))
        }
        Command::Construct { m, k, n, seed, seeds, prime, method, mode, format, enumeration_cap, candidate_cap } => {
            let options = ConstructOptions {
                prime: *prime,
                method: match method {
                    MethodArg::Greedy => Method::Greedy,
                    MethodArg::Behrend => Method::Behrend,
                },
                enumeration_cap: *enumeration_cap,
                candidate_cap: *candidate_cap,
                precision: cli.precision,
                tol: cli.tol,
                linear_map: None,
            };
            let prep = prepare(*m, *k, *n, &options)?;
            let seed_list: Vec<u64> = match seeds {
                Some(r) => r.clone().collect(),
                None => vec![*seed],
            };
            let built: Vec<Construction> = seed_list
                .par_iter()
                .map(|&s| construct_prepared(&prep, *m, *k, *n, s, &options))
                .collect::<Result<_, _>>()?;
            // the oracle runs on every emitted collection before anything is printed
            for c in &built {
                for coll in [&c.integer, &c.zm] {
                    if let Err(v) = verify_sumfree(coll)? {
                        return Ok(Produced { text: String::new(), violation: Some(v) });
                    }
                }
            }
            let text = match format {
                Format::Csv => summary_csv(&built.iter().map(|c| SummaryRow::from(&c.report)).collect::<Vec<_>>())?,
                Format::Json => {
                    let cap = capacity(&Params::with(*m, *k, 0, cli.tol)?).capacity;
                    let items: Vec<CollectionJson> = built
                        .iter()
                        .map(|c| {
                            let coll = match mode {
                                ModeArg::Integer => &c.integer,
                                ModeArg::Zm => &c.zm,
                            };
                            CollectionJson::new(coll, Some(ReportJson::new(&c.report, cap)))
                        })
                        .collect();
                    if seeds.is_some() {
                        to_json(&items)?
                    } else {
                        to_json(&items[0])?
                    }
                }
            };
            Ok(Produced::ok(text))
        }
        Command::Verify { file } => {
            let raw = std::fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?;
            let parsed: CollectionFile =
                serde_json::from_str(&raw).with_context(|| format!("{} is not a collection file", file.display()))?;
            let mut entries = Vec::new();
            let mut first: Option<Violation> = None;
            for (index, cj) in parsed.into_vec().into_iter().enumerate() {
                let c = cj.to_collection();
                let mode = match cj.mode {
                    crate::formats::ModeJson::Integer => "integer",
                    crate::formats::ModeJson::Zm => "zm",
                };
                let verdict = verify_sumfree(&c).with_context(|| format!("collection {index}"))?;
                let entry = match verdict {
                    Ok(r) => VerifyEntry {
                        index,
                        mode,
                        tuples: r.tuples,
                        ok: true,
                        fallback: Some(r.fallback),
                        violation: None,
                    },
                    Err(v) => {
                        let e = VerifyEntry {
                            index,
                            mode,
                            tuples: c.len(),
                            ok: false,
                            fallback: None,
                            violation: Some((&v).into()),
                        };
                        first.get_or_insert(v);
                        e
                    }
                };
                entries.push(entry);
            }
            Ok(Produced { text: to_json(&entries)?, violation: first })
        }
        Command::Bounds { m, k, n } => {
            let c = bounded_tuple_count(*n, *m, *k)?;
            let verdict = c.check();
            let out = BoundsJson {
                m: *m,
                k: *k,
                n: *n,
                exact: c.exact,
                capacity_pow_n: c.bound,
                ratio: c.exact as f64 / c.bound,
                ok: verdict.is_ok(),
            };
            Ok(Produced { text: to_json(&out)?, violation: verdict.err() })
        }
        Command::Props { suite, seed } => {
            let r = run_suite(suite, *seed)?;
            let violation = r.failures.first().cloned();
            Ok(Produced { text: to_json(&SuiteReportJson::from(&r))?, violation })
        }
    }
}

/// Parses `args` (including the program name) and runs them.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: EXIT_OK, stdout: e.to_string(), stderr: None }
                }
                _ => {
                    let text = e.to_string();
                    let head = text.split("\n\nUsage:").next().unwrap_or("usage error");
                    let msg = head.trim_start_matches("error: ").split_whitespace().collect::<Vec<_>>().join(" ");
                    Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: Some(error_json("usage", msg, None)) }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seeds("0..20"), Ok(0..20));
        assert_eq!(parse_seeds("3..=5"), Ok(3..6));
        assert!(parse_seeds("5..5").is_err());
        assert!(parse_seeds("7").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        let o = run_args(["sumfree", "gamma", "3"]);
        assert_eq!(o.code, EXIT_USAGE);
        let o = run_args(["sumfree", "gamma", "1", "3"]);
        assert_eq!(o.code, EXIT_USAGE);
        assert!(o.stderr.unwrap().contains("\"invalid_input\""));
        let o = run_args(["sumfree", "props", "--suite", "nope"]);
        assert_eq!(o.code, EXIT_USAGE);
    }

    #[test]
    fn caps_exit_three() {
        let o = run_args(["sumfree", "construct", "2", "3", "12", "--enumeration-cap", "10"]);
        assert_eq!(o.code, EXIT_RESOURCE, "{o:?}");
    }
}
