//! Logic behind the `pym-entropy` command line: input parsing, estimator
//! dispatch, reports and the convergence harness.
//!
//! Input formats (headerless, `#` starts a comment line, blank lines ignored):
//!
//! - `samples`: one token per line;
//! - `counts`: `symbol<TAB>count` with positive integer counts and unique symbols;
//! - `multiplicities`: `frequency<TAB>number-of-symbols`.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counts::{CountData, Multiplicities};
use crate::dirichlet::{ansb_estimate, miller_madow, nsb_estimate, plugin_entropy};
use crate::error::{Error, Result};
use crate::estimate::{Diagnostics, EntropyEstimate};
use crate::pym::{dpm_estimate, pym_estimate, PymConfig, PymPosterior};
use crate::sampler::RngSeed;
use crate::synthetic::{build, DistSpec};

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Malformed input, bad flags or inconsistent data.
pub const EXIT_INPUT: i32 = 2;
/// Fewer coincidences than the estimator needs.
pub const EXIT_NO_COINCIDENCES: i32 = 3;
/// Quadrature, optimization or sampling failure.
pub const EXIT_NUMERICAL: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoCoincidences { .. } => EXIT_NO_COINCIDENCES,
        Error::Numerical(_) | Error::TailTruncation { .. } => EXIT_NUMERICAL,
        _ => EXIT_INPUT,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Plugin,
    Mima,
    Nsb,
    Ansb,
    Dpm,
    Pym,
}

impl Estimator {
    pub const ALL: [Estimator; 6] =
        [Estimator::Plugin, Estimator::Mima, Estimator::Nsb, Estimator::Ansb, Estimator::Dpm, Estimator::Pym];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::Plugin => "plugin",
            Estimator::Mima => "mima",
            Estimator::Nsb => "nsb",
            Estimator::Ansb => "ansb",
            Estimator::Dpm => "dpm",
            Estimator::Pym => "pym",
        }
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Estimator::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown estimator {s:?} (expected plugin, mima, nsb, ansb, dpm or pym)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Samples,
    Counts,
    Multiplicities,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "samples" => Ok(InputFormat::Samples),
            "counts" => Ok(InputFormat::Counts),
            "multiplicities" => Ok(InputFormat::Multiplicities),
            _ => Err(Error::Config(format!("unknown format {s:?} (expected samples, counts or multiplicities)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    /// Multiplier from nats.
    pub fn factor(self) -> f64 {
        match self {
            Units::Nats => 1.0,
            Units::Bits => std::f64::consts::LOG2_E,
        }
    }
}

impl FromStr for Units {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nats" => Ok(Units::Nats),
            "bits" => Ok(Units::Bits),
            _ => Err(Error::Config(format!("unknown units {s:?} (expected nats or bits)"))),
        }
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
}

fn parse_positive(field: &str, line: usize, what: &str) -> Result<u64> {
    let parse_err = |message: String| Error::Parse { line, message };
    let v: u64 = field
        .trim()
        .parse()
        .map_err(|_| parse_err(format!("{what} {field:?} is not a positive integer")))?;
    if v == 0 {
        return Err(parse_err(format!("{what} must be positive, got 0")));
    }
    Ok(v)
}

fn split_pair(l: &str, line: usize) -> Result<(&str, &str)> {
    let mut it = l.split('\t');
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) if !a.trim().is_empty() => Ok((a.trim(), b)),
        _ => Err(Error::Parse { line, message: format!("expected two tab-separated fields, got {l:?}") }),
    }
}

/// Parse one of the three input formats.
pub fn parse_input(text: &str, format: InputFormat) -> Result<CountData> {
    match format {
        InputFormat::Samples => Ok(CountData::from_samples(content_lines(text).map(|(_, l)| l.trim()))),
        InputFormat::Counts => {
            let mut pairs = Vec::new();
            let mut seen = std::collections::HashMap::new();
            for (line, l) in content_lines(text) {
                let (sym, c) = split_pair(l, line)?;
                let c = parse_positive(c, line, "count")?;
                if let Some(first) = seen.insert(sym.to_string(), line) {
                    return Err(Error::Parse { line, message: format!("symbol {sym:?} already listed on line {first}") });
                }
                pairs.push((sym.to_string(), c));
            }
            CountData::from_pairs(pairs)
        }
        InputFormat::Multiplicities => {
            let mut pairs = Vec::new();
            let mut seen = std::collections::HashMap::new();
            for (line, l) in content_lines(text) {
                let (k, m) = split_pair(l, line)?;
                let k = parse_positive(k, line, "frequency")?;
                let m = parse_positive(m, line, "multiplicity")?;
                if let Some(first) = seen.insert(k, line) {
                    return Err(Error::Parse { line, message: format!("frequency {k} already listed on line {first}") });
                }
                pairs.push((k, m));
            }
            Ok(CountData::from_multiplicities(&Multiplicities::from_pairs(pairs)?))
        }
    }
}

/// Options shared by `estimate` and `sample`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateOptions {
    pub estimator: Estimator,
    pub alphabet_size: Option<u64>,
    pub units: Units,
    pub pym: PymConfig,
    pub seed: Option<u64>,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            estimator: Estimator::Pym,
            alphabet_size: None,
            units: Units::Nats,
            pym: PymConfig::default(),
            seed: None,
        }
    }
}

/// JSON result of `estimate`.
///
/// `mean_nats`/`std_nats` are always in nats; `mean`/`std` are in `units`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub estimator: Estimator,
    pub mean_nats: f64,
    pub std_nats: Option<f64>,
    pub units: Units,
    pub mean: f64,
    pub std: Option<f64>,
    pub map_d: Option<f64>,
    pub map_alpha: Option<f64>,
    pub log_evidence_at_map: Option<f64>,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "K")]
    pub k: u64,
    pub diagnostics: Diagnostics,
    pub seed: Option<u64>,
}

/// Run one estimator on the counts.
pub fn estimate(counts: &CountData, estimator: Estimator, alphabet: Option<u64>, cfg: &PymConfig) -> Result<EntropyEstimate> {
    match estimator {
        Estimator::Plugin => plugin_entropy(counts).map(EntropyEstimate::point),
        Estimator::Mima => miller_madow(counts).map(EntropyEstimate::point),
        Estimator::Nsb => {
            let a = alphabet.ok_or_else(|| Error::Config("the nsb estimator needs --alphabet-size".into()))?;
            if counts.is_empty() {
                return Err(Error::EmptyData);
            }
            nsb_estimate(counts, a)
        }
        Estimator::Ansb => ansb_estimate(counts),
        Estimator::Dpm => dpm_estimate(counts, cfg),
        Estimator::Pym => pym_estimate(counts, cfg),
    }
}

pub fn run_estimate(counts: &CountData, opts: &EstimateOptions) -> Result<RunReport> {
    let est = estimate(counts, opts.estimator, opts.alphabet_size, &opts.pym)?;
    let f = opts.units.factor();
    Ok(RunReport {
        estimator: opts.estimator,
        mean_nats: est.mean,
        std_nats: est.std,
        units: opts.units,
        mean: est.mean * f,
        std: est.std.map(|s| s * f),
        map_d: est.map_d,
        map_alpha: est.map_alpha,
        log_evidence_at_map: est.log_evidence_at_map,
        n: counts.n(),
        k: counts.k(),
        diagnostics: est.diagnostics,
        seed: opts.seed,
    })
}

/// Posterior entropy draws under the PYM (or DPM, per the gamma prior), in `units`.
pub fn run_sample(counts: &CountData, cfg: &PymConfig, draws: usize, seed: u64, units: Units) -> Result<Vec<f64>> {
    let post = PymPosterior::fit(counts, cfg)?;
    let f = units.factor();
    Ok(post.sample(draws, RngSeed(seed))?.into_iter().map(|h| h * f).collect())
}

/// Options for the convergence harness.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeOptions {
    pub dist: DistSpec,
    pub sizes: Vec<u64>,
    pub estimators: Vec<Estimator>,
    pub trials: usize,
    pub seed: u64,
    /// Alphabet size for `nsb`; defaults to the distribution's support size.
    pub alphabet_size: Option<u64>,
    pub pym: PymConfig,
}

/// One CSV row of the convergence harness.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeRow {
    pub size: u64,
    pub trial: usize,
    pub estimator: Estimator,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub true_entropy: f64,
    /// Exit-code class of the failure, when the estimator failed.
    pub error: Option<i32>,
}

pub const CONVERGE_HEADER: &str = "size,trial,estimator,mean,std,true_entropy,error";

/// Run every estimator on fresh draws for every `(size, trial)` cell.
pub fn run_converge(opts: &ConvergeOptions) -> Result<Vec<ConvergeRow>> {
    if opts.sizes.is_empty() || opts.estimators.is_empty() {
        return Err(Error::Config("need at least one size and one estimator".into()));
    }
    if opts.sizes.contains(&0) {
        return Err(Error::Config("sample sizes must be positive".into()));
    }
    opts.pym.validate()?;
    let root = RngSeed(opts.seed);
    let dist = build(opts.dist, root.derive(0))?;
    let alphabet = opts.alphabet_size.unwrap_or(dist.probabilities.len() as u64);
    let cells: Vec<(usize, u64, usize)> = opts
        .sizes
        .iter()
        .enumerate()
        .flat_map(|(si, &n)| (0..opts.trials).map(move |t| (si, n, t)))
        .collect();
    let mut rows: Vec<ConvergeRow> = cells
        .par_iter()
        .flat_map_iter(|&(si, n, t)| {
            let cell_seed = root.derive(1 + (si * opts.trials + t) as u64);
            let counts = dist.draw_counts(n, cell_seed);
            opts.estimators.iter().map(move |&e| {
                let (mean, std, error) = match estimate(&counts, e, Some(alphabet), &opts.pym) {
                    Ok(est) => (Some(est.mean), est.std, None),
                    Err(err) => (None, None, Some(exit_code(&err))),
                };
                ConvergeRow { size: n, trial: t, estimator: e, mean, std, true_entropy: dist.true_entropy, error }
            }).collect::<Vec<_>>()
        })
        .collect();
    let order = |e: Estimator| opts.estimators.iter().position(|&x| x == e).unwrap_or(usize::MAX);
    rows.sort_by_key(|r| (r.size, r.trial, order(r.estimator)));
    Ok(rows)
}

pub fn converge_csv(rows: &[ConvergeRow]) -> String {
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from(CONVERGE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.size,
            r.trial,
            r.estimator.name(),
            cell(r.mean),
            cell(r.std),
            r.true_entropy,
            r.error.map(|c| c.to_string()).unwrap_or_default()
        );
    }
    out
}

/// Parse a comma-separated list such as `100,1000,10000`.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|x| x.trim())
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|_| Error::Config(format!("cannot parse list item {x:?}"))))
        .collect()
}
