//! Run configuration: JSON file values merged under command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use heavytail::exact_engine::grid::GridSpec;
use heavytail::montecarlo::Side;
use heavytail::{Distribution, TailClass};
use serde::Deserialize;

pub const SEED_ENV: &str = "HEAVYTAIL_SEED";

pub const DEFAULT_N: u64 = 1_000;
pub const DEFAULT_EPSILON: f64 = 0.3;
pub const DEFAULT_TRIALS: u64 = 10_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_K_MAX: i64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Values a config file may set. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<String>,
    pub dist: Option<Vec<Distribution>>,
    pub spec: Option<TailClass>,
    pub kind: Option<String>,
    pub n: Option<u64>,
    pub epsilon: Option<f64>,
    pub grid: Option<GridSpec>,
    pub experiments: Option<Vec<ExperimentConfig>>,
    pub side: Option<Side>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub workers: Option<usize>,
    pub k_max: Option<i64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

/// One simulation of a full report.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dist: Vec<Distribution>,
    pub n: u64,
    pub epsilon: f64,
    pub side: Side,
    pub trials: u64,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }
}

/// Seed precedence: flag, then environment, then config file, then default.
pub fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    if let Ok(raw) = std::env::var(SEED_ENV) {
        return raw.trim().parse().with_context(|| format!("{SEED_ENV}={raw:?} is not an unsigned integer"));
    }
    Ok(file.unwrap_or(DEFAULT_SEED))
}

/// Parses `geometric:p`, `pareto:alpha[:v]`, `symmetric-pareto:alpha`,
/// `point:c` or an inline JSON object. A trailing `@a` re-certifies the law
/// at exponent `a`.
pub fn parse_dist(text: &str) -> Result<Distribution> {
    let text = text.trim();
    if text.starts_with('{') {
        return serde_json::from_str(text).with_context(|| format!("invalid distribution JSON {text:?}"));
    }
    let (body, cert) = match text.split_once('@') {
        Some((body, cert)) => (body, Some(number(cert)?)),
        None => (text, None),
    };
    let mut parts = body.split(':');
    let name = parts.next().unwrap_or_default();
    let args: Vec<&str> = parts.collect();
    let dist = match (name, args.as_slice()) {
        ("geometric", [p]) => Distribution::geometric(number(p)?)?,
        ("pareto", [a]) => Distribution::exact_tail_pareto(number(a)?, 1.0)?,
        ("pareto", [a, v]) => Distribution::exact_tail_pareto(number(a)?, number(v)?)?,
        ("symmetric-pareto", [a]) => Distribution::symmetric_pareto(number(a)?)?,
        ("point", [c]) => Distribution::point_mass(c.parse().with_context(|| format!("invalid integer {c:?}"))?),
        _ => bail!(
            "unrecognised distribution {text:?}; expected geometric:p, pareto:alpha[:v], symmetric-pareto:alpha, point:c or JSON"
        ),
    };
    Ok(match cert {
        Some(alpha) => dist.with_certificate_exponent(alpha)?,
        None => dist,
    })
}

fn number(s: &str) -> Result<f64> {
    s.trim().parse().with_context(|| format!("invalid number {s:?}"))
}
