//! Dominance sweep of the interval lemmas over built-in laws.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{interval_decomposition, mu_schedule};
use crate::distributions::IntegerDistribution;
use crate::error::{Error, Result};
use crate::tail_model::RegimeTag;

/// Absolute slack allowed when comparing an exact segment to its bound.
pub const DOMINANCE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub alphas: Vec<f64>,
    pub ns: Vec<u64>,
    pub epsilons: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            alphas: vec![0.5, 0.8, 1.0, 1.5, 2.0, 2.5, 3.0],
            ns: vec![100, 1_000, 10_000],
            epsilons: vec![0.1, 0.3, 0.5],
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.ns.is_empty() || self.epsilons.is_empty() {
            return Err(Error::InvalidInput("grid lists must be non-empty".into()));
        }
        Ok(())
    }
}

/// One lemma check; column order is the CSV order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub lemma_id: String,
    pub alpha: f64,
    pub n: u64,
    pub epsilon: f64,
    pub exact: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Built-in laws certified at exponent `alpha` on both sides.
pub fn builtin_families(alpha: f64) -> Result<Vec<(String, IntegerDistribution<f64>)>> {
    type D = IntegerDistribution<f64>;
    let laws = vec![
        ("pareto_v1", D::exact_tail_pareto(alpha, 1.0)?),
        ("pareto_v0.5", D::exact_tail_pareto(alpha, 0.5)?),
        ("geometric_0.5", D::geometric(0.5)?),
        ("point_0", D::point_mass(0)),
        ("point_3", D::point_mass(3)),
        ("point_-2", D::point_mass(-2)),
        ("symmetric_pareto", D::symmetric_pareto(alpha)?),
        ("pareto_vs_geometric", D::two_sided(D::exact_tail_pareto(alpha, 1.0)?, D::geometric(0.3)?, 0.6)?),
    ];
    laws.into_iter()
        .map(|(id, d)| Ok((id.to_string(), d.with_certificate_exponent(alpha)?)))
        .collect()
}

/// Runs every built-in law over the grid. Cells where the schedule violates
/// `mu < 1` or `M < x` are skipped.
pub fn lemma_grid(grid: &GridSpec) -> Result<Vec<LemmaRow>> {
    grid.validate()?;
    let mut rows = Vec::new();
    for &alpha in &grid.alphas {
        let families = builtin_families(alpha)?;
        for &n in &grid.ns {
            for &epsilon in &grid.epsilons {
                let schedule = mu_schedule(n, epsilon, alpha)?;
                if !(schedule.mu < 1.0 && schedule.m_split < schedule.x) {
                    continue;
                }
                for (id, dist) in &families {
                    let d = interval_decomposition(dist, &schedule, dist.certified())?;
                    let prefix = match d.regime {
                        RegimeTag::SubLinear => "I",
                        RegimeTag::Concentrated => "J",
                    };
                    for (j, (exact, bound)) in d.exact().into_iter().zip(d.bounds()).enumerate() {
                        let margin = bound - exact;
                        rows.push(LemmaRow {
                            lemma_id: format!("{id}:{prefix}{}", j + 1),
                            alpha,
                            n,
                            epsilon,
                            exact,
                            bound,
                            margin,
                            pass: margin >= -DOMINANCE_TOLERANCE,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

pub fn write_lemma_csv<W: Write>(rows: &[LemmaRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row).map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(())
}
