//! Batch runner: generates scenarios, reoptimizes them, compares against
//! the from-scratch 2-approximation and (within caps) the oracle.
//!
//! ```toml
//! seed = 7
//! workers = 4
//! epsilon = "1"
//!
//! [[batch]]
//! name = "desk"
//! count = 20
//! n = 8
//! topology = "random-connected"
//! density = 0.3
//! kinds = ["edge-inc", "edge-dec"]
//! ```

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{
    generate_instance, generate_scenario, InstanceSpec, SolutionSource, Topology,
};
use super::oracle::{oracle_solve, ORACLE_MAX_TERMINALS, ORACLE_MAX_VERTICES};
use crate::error::{Error, Result};
use crate::exact::ExactLimits;
use crate::graph::{Cost, StpInstance};
use crate::metric::MetricClosure;
use crate::reopt::{reoptimize, two_approx, Mode, ReoptConfig, ScenarioKind};
use crate::{format_rational, parse_rational, Rational};

fn default_workers() -> usize {
    1
}

fn default_epsilon() -> String {
    "1".into()
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
pub struct SuiteConfig {
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_epsilon")]
    pub epsilon: String,
    #[serde(default)]
    pub h_cap: Option<u64>,
    #[serde(default = "yes")]
    pub oracle: bool,
    /// Adds wall-clock times to the reports, which makes them
    /// non-reproducible.
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default)]
    pub terminal_cap: Option<usize>,
    #[serde(default)]
    pub tree_cap: Option<usize>,
    #[serde(rename = "batch")]
    pub batches: Vec<BatchConfig>,
}

fn default_kinds() -> Vec<ScenarioKind> {
    ScenarioKind::ALL.to_vec()
}

fn default_n() -> usize {
    8
}

fn default_fraction() -> f64 {
    0.4
}

fn default_wmin() -> Cost {
    1
}

fn default_wmax() -> Cost {
    10
}

fn default_topology() -> String {
    "random-connected".into()
}

fn default_density() -> f64 {
    0.3
}

#[derive(Clone, Debug, Deserialize)]
pub struct BatchConfig {
    pub name: String,
    pub count: usize,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_fraction")]
    pub terminal_fraction: f64,
    #[serde(default = "default_wmin")]
    pub weight_min: Cost,
    #[serde(default = "default_wmax")]
    pub weight_max: Cost,
    #[serde(default = "default_topology")]
    pub topology: String,
    #[serde(default = "default_density")]
    pub density: f64,
    #[serde(default)]
    pub chords: usize,
    #[serde(default = "default_kinds")]
    pub kinds: Vec<ScenarioKind>,
    #[serde(default)]
    pub solution: SolutionSource,
    #[serde(default)]
    pub epsilon: Option<String>,
    #[serde(default)]
    pub h_cap: Option<u64>,
}

impl BatchConfig {
    pub fn instance_spec(&self) -> Result<InstanceSpec> {
        Ok(InstanceSpec {
            n: self.n,
            terminal_fraction: self.terminal_fraction,
            weight_min: self.weight_min,
            weight_max: self.weight_max,
            topology: Topology::from_name(&self.topology, self.density, self.chords)?,
        })
    }
}

pub fn load_config(text: &str) -> Result<SuiteConfig> {
    toml::from_str(text).map_err(|e| Error::InvalidInput(format!("suite config: {e}")))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    /// The generator could not build this scenario (e.g. no Steiner vertex
    /// to promote).
    Skipped,
    Error,
}

/// One scenario run. Costs are integers in units of `10^-scale`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub id: String,
    pub batch: String,
    pub seed: u64,
    pub algorithm: ScenarioKind,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub n: usize,
    pub terminals: usize,
    pub scale: u32,
    pub rho: String,
    pub epsilon: String,
    /// `ρ + ε`.
    pub bound: String,
    pub mode: Option<Mode>,
    pub input_cost: Option<Cost>,
    pub output_cost: Option<Cost>,
    pub baseline_cost: Option<Cost>,
    pub oracle_cost: Option<Cost>,
    /// `output / oracle` as an exact fraction.
    pub ratio: Option<String>,
    pub ratio_value: Option<f64>,
    pub kept_input: Option<bool>,
    /// Every swap-engine call took the exact branch.
    pub exact_fallback: Option<bool>,
    /// `ratio ≤ ρ + ε`, checked for guaranteed-mode runs with an oracle.
    pub within_bound: Option<bool>,
    /// `c(S) ≤ ρ · OPT(I)` for the declared `ρ`.
    pub rho_declared_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub runs: usize,
    pub ok: usize,
    pub skipped: usize,
    pub errors: usize,
    pub oracle_checked: usize,
    pub exact: usize,
    pub guaranteed: usize,
    pub violations: usize,
    pub beats_baseline: usize,
    pub max_ratio: Option<f64>,
    pub mean_ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutput {
    pub reports: Vec<RunReport>,
    pub summary: Vec<SummaryRow>,
}

struct Job {
    order: (usize, usize, ScenarioKind),
    id: String,
    batch: String,
    seed: u64,
    spec: InstanceSpec,
    kind: ScenarioKind,
    source: SolutionSource,
    cfg: ReoptConfig,
}

fn within_oracle_caps(inst: &StpInstance) -> bool {
    inst.vertex_count() <= ORACLE_MAX_VERTICES && inst.terminals().len() <= ORACLE_MAX_TERMINALS
}

fn run_job(job: &Job, with_oracle: bool, timing: bool) -> RunReport {
    let started = Instant::now();
    let mut report = RunReport {
        id: job.id.clone(),
        batch: job.batch.clone(),
        seed: job.seed,
        algorithm: job.kind,
        status: Status::Ok,
        error: None,
        n: job.spec.n,
        terminals: 0,
        scale: 0,
        rho: String::new(),
        epsilon: format_rational(&job.cfg.epsilon),
        bound: String::new(),
        mode: None,
        input_cost: None,
        output_cost: None,
        baseline_cost: None,
        oracle_cost: None,
        ratio: None,
        ratio_value: None,
        kept_input: None,
        exact_fallback: None,
        within_bound: None,
        rho_declared_ok: None,
        wall_ms: None,
    };
    let scenario = generate_instance(job.seed, &job.spec)
        .and_then(|inst| generate_scenario(job.seed.rotate_left(17), &inst, job.kind, job.source));
    let scenario = match scenario {
        Ok(s) => s,
        Err(e) => {
            report.status = Status::Skipped;
            report.error = Some(e.to_string());
            return report;
        }
    };
    report.rho = format_rational(&scenario.rho);
    report.bound = format_rational(&(scenario.rho + job.cfg.epsilon));
    report.scale = scenario.base.scale();
    if let Err(e) = fill(&mut report, &scenario, job, with_oracle) {
        report.status = Status::Error;
        report.error = Some(e.to_string());
    }
    if timing {
        report.wall_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    report
}

fn fill(
    report: &mut RunReport,
    scenario: &crate::io::ScenarioFile,
    job: &Job,
    with_oracle: bool,
) -> Result<()> {
    let modified = scenario.modified_instance()?;
    report.terminals = modified.terminals().len();
    let baseline = two_approx(&modified, &MetricClosure::new(&modified))?;
    report.baseline_cost = Some(baseline.cost(&modified));

    let out = reoptimize(scenario, &job.cfg)?;
    report.mode = Some(out.mode());
    report.input_cost = Some(out.input_cost);
    report.output_cost = Some(out.cost);
    report.kept_input = Some(out.kept_input);
    report.exact_fallback =
        Some(!out.audit.is_empty() && out.audit.iter().all(|s| s.build.fallback));

    if with_oracle && within_oracle_caps(&modified) {
        let opt = oracle_solve(&modified)?.cost;
        report.oracle_cost = Some(opt);
        let ratio = if opt == 0 {
            (out.cost == 0).then(|| Rational::from_integer(1))
        } else {
            Some(Rational::new(out.cost, opt))
        };
        if let Some(r) = ratio {
            report.ratio = Some(format_rational(&r));
            report.ratio_value = Some(*r.numer() as f64 / *r.denom() as f64);
        }
        if out.mode() == Mode::Guaranteed {
            let bound = scenario.rho + job.cfg.epsilon;
            report.within_bound = Some(
                out.cost as u128 * *bound.denom() as u128 <= *bound.numer() as u128 * opt as u128,
            );
        }
        let base_opt = oracle_solve(&scenario.base)?.cost;
        let rho = scenario.rho;
        let input = scenario.solution.cost(&scenario.base);
        report.rho_declared_ok =
            Some(input as u128 * *rho.denom() as u128 <= *rho.numer() as u128 * base_opt as u128);
    }
    Ok(())
}

fn jobs(config: &SuiteConfig) -> Result<Vec<Job>> {
    let limits = ExactLimits {
        terminal_cap: config
            .terminal_cap
            .unwrap_or(ExactLimits::default().terminal_cap),
        tree_cap: config.tree_cap.unwrap_or(ExactLimits::default().tree_cap),
    };
    let mut out = Vec::new();
    for (bi, batch) in config.batches.iter().enumerate() {
        let spec = batch.instance_spec()?;
        let epsilon = parse_rational(batch.epsilon.as_deref().unwrap_or(&config.epsilon))?;
        let cfg = ReoptConfig {
            epsilon,
            h_cap: batch.h_cap.or(config.h_cap),
            limits,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(bi as u64);
        for i in 0..batch.count {
            let seed: u64 = rng.random();
            for &kind in &batch.kinds {
                out.push(Job {
                    order: (bi, i, kind),
                    id: format!("{}/{:05}/{}", batch.name, i, kind),
                    batch: batch.name.clone(),
                    seed,
                    spec,
                    kind,
                    source: batch.solution,
                    cfg,
                });
            }
        }
    }
    Ok(out)
}

/// Runs every batch. Per-scenario failures end up in the reports; only an
/// unusable configuration is an error.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteOutput> {
    let mut jobs = jobs(config)?;
    jobs.sort_by_key(|j| j.order);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("worker pool: {e}")))?;
    let reports: Vec<RunReport> = pool.install(|| {
        jobs.par_iter()
            .map(|j| run_job(j, config.oracle, config.record_timing))
            .collect()
    });
    let summary = summarize(&reports);
    Ok(SuiteOutput { reports, summary })
}

pub fn summarize(reports: &[RunReport]) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = ScenarioKind::ALL
        .iter()
        .map(|k| SummaryRow {
            algorithm: k.name().to_string(),
            ..SummaryRow::default()
        })
        .collect();
    let mut ratio_sums = [0.0f64; 4];
    for r in reports {
        let i = ScenarioKind::ALL
            .iter()
            .position(|&k| k == r.algorithm)
            .unwrap();
        let row = &mut rows[i];
        row.runs += 1;
        match r.status {
            Status::Ok => row.ok += 1,
            Status::Skipped => row.skipped += 1,
            Status::Error => row.errors += 1,
        }
        if let (Some(out), Some(opt)) = (r.output_cost, r.oracle_cost) {
            row.oracle_checked += 1;
            row.exact += usize::from(out == opt);
        }
        if let Some(ok) = r.within_bound {
            row.guaranteed += 1;
            row.violations += usize::from(!ok);
        }
        if let (Some(out), Some(base)) = (r.output_cost, r.baseline_cost) {
            row.beats_baseline += usize::from(out < base);
        }
        if let Some(v) = r.ratio_value {
            ratio_sums[i] += v;
            row.max_ratio = Some(row.max_ratio.map_or(v, |m: f64| m.max(v)));
        }
    }
    for (row, sum) in rows.iter_mut().zip(ratio_sums) {
        if row.oracle_checked > 0 {
            row.mean_ratio = Some(sum / row.oracle_checked as f64);
        }
    }
    rows.retain(|r| r.runs > 0);
    rows
}

/// One JSON object per line.
pub fn to_jsonl(reports: &[RunReport]) -> String {
    reports
        .iter()
        .map(|r| serde_json::to_string(r).expect("reports serialize") + "\n")
        .collect()
}

pub fn render_summary(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<16} {:>5} {:>5} {:>5} {:>5} {:>7} {:>6} {:>6} {:>6} {:>9} {:>9} {:>9}",
        "algorithm",
        "runs",
        "ok",
        "skip",
        "err",
        "oracle",
        "exact",
        "guar",
        "viol",
        "<2-approx",
        "max-ratio",
        "mean"
    )
    .unwrap();
    let f = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
    for r in rows {
        writeln!(
            out,
            "{:<16} {:>5} {:>5} {:>5} {:>5} {:>7} {:>6} {:>6} {:>6} {:>9} {:>9} {:>9}",
            r.algorithm,
            r.runs,
            r.ok,
            r.skipped,
            r.errors,
            r.oracle_checked,
            r.exact,
            r.guaranteed,
            r.violations,
            r.beats_baseline,
            f(r.max_ratio),
            f(r.mean_ratio)
        )
        .unwrap();
    }
    out
}
