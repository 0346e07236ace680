//! Command line driver: bound evaluation, expectations, certificate checks,
//! lemma grids and simulations.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use heavytail::bounds::{preasymptotic_bound, thm1_bound, thm2_bound, thm3_bound, thm4_bound};
use heavytail::exact_engine::grid::{lemma_grid, write_lemma_csv, GridSpec, LemmaRow};
use heavytail::montecarlo::{run_experiment, write_report_csv, ExperimentPlan, ReportRow, Side};
use heavytail::tail_model::{verify_membership, MembershipReport};
use heavytail::{Bound, Distribution, Schedule, TailClass, TailSide};
use serde::{Deserialize, Serialize};

use config::{
    parse_dist, resolve_seed, ExperimentConfig, FileConfig, Format, DEFAULT_EPSILON, DEFAULT_K_MAX, DEFAULT_N,
    DEFAULT_TRIALS,
};

/// Exit status when every check passed.
pub const EXIT_OK: i32 = 0;
/// Exit status for usage and input errors.
pub const EXIT_USAGE: i32 = 1;
/// Exit status when a finite-n bound or a lemma bound is violated.
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "heavytail", version, about = "Tail bounds for sums of heavy-tailed integer random variables")]
pub struct Cli {
    /// JSON config file; flags take precedence over its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a theorem bound or the finite-n bound.
    Bound(BoundArgs),
    /// Mean of a law through the tail-sum formula.
    Expectation(DistArg),
    /// Scan a law's tails against a certificate.
    VerifyMembership(MembershipArgs),
    /// Check every interval lemma over a grid of (alpha, n, eps).
    LemmaGrid(GridArgs),
    /// Estimate a tail probability of S_n and compare it with the bounds.
    Simulate(SimulateArgs),
    /// Lemma grid plus a list of simulations, as one JSON document.
    FullReport(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundChoice {
    Thm1,
    Thm2,
    Thm3,
    Thm4,
    Pre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Right,
    Left,
}

#[derive(Debug, Args)]
struct SpecArgs {
    /// Certificate as JSON, e.g. '{"alpha_r":1,"v":1}'.
    #[arg(long)]
    spec: Option<String>,
    /// Right exponent; also the left one unless --alpha-l is given.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    v: Option<f64>,
    #[arg(long)]
    alpha_l: Option<f64>,
    /// Left constant; defaults to --v.
    #[arg(long)]
    w: Option<f64>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(long, value_enum)]
    kind: Option<BoundChoice>,
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Side of the finite-n bound.
    #[arg(long, value_enum, default_value = "right")]
    side: SideArg,
    /// Tilt for the finite-n bound instead of the default schedule.
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DistArg {
    /// geometric:p, pareto:alpha[:v], symmetric-pareto:alpha, point:c or JSON.
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MembershipArgs {
    #[arg(long)]
    dist: Option<String>,
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    k_max: Option<i64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// `default` or a JSON file with alphas, ns and epsilons.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    ns: Option<Vec<u64>>,
    #[arg(long = "eps", value_delimiter = ',')]
    epsilons: Option<Vec<f64>>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Repeat to cycle through several laws.
    #[arg(long)]
    dist: Vec<String>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, value_parser = parse_side)]
    side: Option<Side>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_side(s: &str) -> Result<Side, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_")))
        .map_err(|_| format!("unknown side {s:?}; expected right, left, centered-right, centered-left or centered-abs"))
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Checks {
    Passed,
    Failed,
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(Checks::Passed) => EXIT_OK,
        Ok(Checks::Failed) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: Cli) -> Result<Checks> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let command = match (cli.command, &file.command) {
        (Some(c), _) => c,
        (None, Some(name)) => Cli::try_parse_from(["heavytail", name.as_str()])
            .map_err(|_| anyhow!("config command {name:?} is not a known command"))?
            .command
            .expect("subcommand parsed"),
        (None, None) => bail!("no command given; see --help"),
    };
    match command {
        Command::Bound(args) => bound(args, &file),
        Command::Expectation(args) => expectation(args, &file),
        Command::VerifyMembership(args) => membership(args, &file),
        Command::LemmaGrid(args) => grid(args, &file),
        Command::Simulate(args) => simulate(args, &file),
        Command::FullReport(args) => full_report(args, &file),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out, text.as_bytes())
}

fn resolve_spec(args: &SpecArgs, file: &FileConfig) -> Result<Option<TailClass>> {
    if let Some(json) = &args.spec {
        return Ok(Some(serde_json::from_str(json).context("invalid --spec JSON")?));
    }
    if let Some(alpha) = args.alpha {
        let v = args.v.ok_or_else(|| anyhow!("--alpha needs --v"))?;
        return Ok(Some(TailClass::two_sided(alpha, v, args.alpha_l.unwrap_or(alpha), args.w.unwrap_or(v))?));
    }
    if args.v.is_some() || args.alpha_l.is_some() || args.w.is_some() {
        bail!("--v, --alpha-l and --w need --alpha");
    }
    Ok(file.spec.clone())
}

fn resolve_dists(flags: &[String], file: &FileConfig) -> Result<Vec<Distribution>> {
    if !flags.is_empty() {
        return flags.iter().map(|d| parse_dist(d)).collect();
    }
    match &file.dist {
        Some(d) if !d.is_empty() => Ok(d.clone()),
        _ => bail!("no distribution given; use --dist"),
    }
}

fn bound(args: BoundArgs, file: &FileConfig) -> Result<Checks> {
    let kind = match (args.kind, &file.kind) {
        (Some(k), _) => k,
        (None, Some(name)) => BoundChoice::from_str(name, true).map_err(|_| anyhow!("unknown bound kind {name:?}"))?,
        (None, None) => bail!("no bound kind given; use --kind"),
    };
    let spec = resolve_spec(&args.spec, file)?.ok_or_else(|| anyhow!("no certificate given; use --alpha/--v or --spec"))?;
    let n = args.n.or(file.n).unwrap_or(DEFAULT_N);
    let eps = args.eps.or(file.epsilon).unwrap_or(DEFAULT_EPSILON);
    let eval = match kind {
        BoundChoice::Thm1 => thm1_bound(&spec, n, eps)?,
        BoundChoice::Thm2 => thm2_bound(&spec, n, eps)?,
        BoundChoice::Thm3 => thm3_bound(&spec, n, eps)?,
        BoundChoice::Thm4 => thm4_bound(&spec, n, eps)?,
        BoundChoice::Pre => {
            let side = match args.side {
                SideArg::Right => TailSide::Right,
                SideArg::Left => TailSide::Left,
            };
            let sided = if side == TailSide::Left { spec.mirrored()? } else { spec.clone() };
            let alpha = if sided.alpha_r() <= 1.0 { sided.alpha_r() } else { sided.min_alpha() };
            let schedule = match args.mu {
                Some(mu) => Schedule::with_mu(n, eps, alpha, mu)?,
                None => Schedule::new(n, eps, alpha)?,
            };
            preasymptotic_bound(&[spec], &schedule, side)?
        }
    };
    emit_json(args.out.as_deref().or(file.output.as_deref()), &eval)?;
    Ok(Checks::Passed)
}

/// Output of `expectation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationReport {
    pub dist: String,
    /// `None` when the mean does not exist.
    pub expectation: Option<f64>,
    pub divergent: bool,
}

fn expectation(args: DistArg, file: &FileConfig) -> Result<Checks> {
    let dists = resolve_dists(args.dist.as_slice(), file)?;
    let dist = dists.first().expect("non-empty");
    let value = dist.expectation_tail_sum().finite();
    let report = ExpectationReport { dist: dist.label(), expectation: value, divergent: value.is_none() };
    emit_json(args.out.as_deref().or(file.output.as_deref()), &report)?;
    Ok(Checks::Passed)
}

/// Output of `verify-membership`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipOutput {
    pub dist: String,
    pub spec: TailClass,
    pub report: MembershipReport<f64>,
}

fn membership(args: MembershipArgs, file: &FileConfig) -> Result<Checks> {
    let dists = resolve_dists(args.dist.as_slice(), file)?;
    let dist = &dists[0];
    let spec = resolve_spec(&args.spec, file)?.unwrap_or_else(|| dist.certified().clone());
    let k_max = args.k_max.or(file.k_max).unwrap_or(DEFAULT_K_MAX);
    let report = verify_membership(dist, &spec, k_max)?;
    let passed = report.passed;
    emit_json(
        args.out.as_deref().or(file.output.as_deref()),
        &MembershipOutput { dist: dist.label(), spec, report },
    )?;
    Ok(if passed { Checks::Passed } else { Checks::Failed })
}

fn resolve_grid(args: &GridArgs, file: &FileConfig) -> Result<GridSpec> {
    let mut grid = match args.grid.as_deref() {
        None | Some("default") => file.grid.clone().unwrap_or_default(),
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read grid {path}"))?;
            serde_json::from_str(&text).with_context(|| format!("invalid grid file {path}"))?
        }
    };
    if let Some(a) = &args.alphas {
        grid.alphas = a.clone();
    }
    if let Some(n) = &args.ns {
        grid.ns = n.clone();
    }
    if let Some(e) = &args.epsilons {
        grid.epsilons = e.clone();
    }
    grid.validate()?;
    Ok(grid)
}

fn grid(args: GridArgs, file: &FileConfig) -> Result<Checks> {
    let spec = resolve_grid(&args, file)?;
    let rows = lemma_grid(&spec)?;
    let failures = rows.iter().filter(|r| !r.pass).count();
    let out = args.output.out.as_deref().or(file.output.as_deref());
    match args.output.format.or(file.format).unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_lemma_csv(&rows, &mut buf)?;
            emit(out, &buf)?;
        }
        Format::Json => emit_json(out, &rows)?,
    }
    eprintln!("{} lemma checks, {failures} failures", rows.len());
    Ok(if failures == 0 { Checks::Passed } else { Checks::Failed })
}

/// Rows for every bound that applies to the plan's side.
fn simulation_rows(plan: &ExperimentPlan) -> Result<Vec<ReportRow>> {
    let candidates: Vec<heavytail::Result<Bound>> = vec![plan.theorem_bound(), plan.preasymptotic()];
    let bounds: Vec<Bound> = candidates.iter().filter_map(|b| b.as_ref().ok().cloned()).collect();
    if bounds.is_empty() {
        let reason = candidates.into_iter().find_map(|b| b.err()).expect("both failed");
        bail!("no bound applies to side {}: {reason}", plan.side.as_str());
    }
    let est = run_experiment(plan)?;
    bounds.iter().map(|b| Ok(ReportRow::new(plan, &est, b)?)).collect()
}

fn simulate(args: SimulateArgs, file: &FileConfig) -> Result<Checks> {
    let plan = ExperimentPlan {
        dists: resolve_dists(&args.dist, file)?,
        n: args.n.or(file.n).unwrap_or(DEFAULT_N),
        trials: args.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
        epsilon: args.eps.or(file.epsilon).unwrap_or(DEFAULT_EPSILON),
        side: args.side.or(file.side).unwrap_or(Side::Right),
        seed: resolve_seed(args.seed, file.seed)?,
        workers: args.workers.or(file.workers).unwrap_or(1),
    };
    let rows = simulation_rows(&plan)?;
    let out = args.output.out.as_deref().or(file.output.as_deref());
    match args.output.format.or(file.format).unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_report_csv(&rows, &mut buf)?;
            emit(out, &buf)?;
        }
        Format::Json => emit_json(out, &rows)?,
    }
    Ok(if rows.iter().any(ReportRow::is_red_flag) { Checks::Failed } else { Checks::Passed })
}

/// Output of `full-report`. `generated_at` is the only field that varies
/// between identical invocations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullReport {
    pub generated_at: String,
    pub seed: u64,
    pub grid: GridSpec,
    pub lemma_checks: usize,
    pub lemma_failures: Vec<LemmaRow>,
    pub lemma_min_margin: f64,
    pub simulations: Vec<ReportRow>,
    pub red_flags: usize,
    pub passed: bool,
}

fn default_experiments(trials: u64) -> Result<Vec<ExperimentConfig>> {
    Ok(vec![
        ExperimentConfig {
            dist: vec![Distribution::exact_tail_pareto(0.8, 1.0)?],
            n: 1_000,
            epsilon: 0.4,
            side: Side::Right,
            trials,
        },
        ExperimentConfig {
            dist: vec![Distribution::symmetric_pareto(2.5)?],
            n: 10_000,
            epsilon: 0.3,
            side: Side::CenteredAbs,
            trials,
        },
    ])
}

fn full_report(args: ReportArgs, file: &FileConfig) -> Result<Checks> {
    if file.format == Some(Format::Csv) {
        bail!("full-report is JSON only");
    }
    let seed = resolve_seed(args.seed, file.seed)?;
    let workers = args.workers.or(file.workers).unwrap_or(1);
    let grid = file.grid.clone().unwrap_or_default();
    let rows = lemma_grid(&grid)?;
    let lemma_min_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let lemma_failures: Vec<LemmaRow> = rows.iter().filter(|r| !r.pass).cloned().collect();

    let experiments = match (&file.experiments, args.trials) {
        (Some(list), Some(t)) => list.iter().cloned().map(|e| ExperimentConfig { trials: t, ..e }).collect(),
        (Some(list), None) => list.clone(),
        (None, t) => default_experiments(t.or(file.trials).unwrap_or(DEFAULT_TRIALS))?,
    };
    let mut simulations = Vec::new();
    for e in experiments {
        let plan = ExperimentPlan {
            dists: e.dist,
            n: e.n,
            trials: e.trials,
            epsilon: e.epsilon,
            side: e.side,
            seed,
            workers,
        };
        simulations.extend(simulation_rows(&plan)?);
    }
    let red_flags = simulations.iter().filter(|r| r.is_red_flag()).count();
    let passed = lemma_failures.is_empty() && red_flags == 0;
    let report = FullReport {
        generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        seed,
        grid,
        lemma_checks: rows.len(),
        lemma_failures,
        lemma_min_margin,
        simulations,
        red_flags,
        passed,
    };
    emit_json(args.out.as_deref().or(file.output.as_deref()), &report)?;
    Ok(if passed { Checks::Passed } else { Checks::Failed })
}
