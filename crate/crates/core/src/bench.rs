//! Multi-trial experiments, report output and hyper-parameter sweeps.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{evolve, GAConfig, RunStats};
use crate::instances::{load_instance, Instance, InstanceFormat};
use crate::oracle::gap_pct;

/// Sweeps larger than this need `allow_large`.
pub const MAX_SWEEP_CONFIGS: usize = 1024;

fn default_trials() -> usize {
    30
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub instances: Vec<PathBuf>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub config: GAConfig,
    /// Known best makespans keyed by instance name.
    #[serde(default)]
    pub reference_values: BTreeMap<String, f64>,
    #[serde(default)]
    pub format: Option<InstanceFormat>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentSpec {
    /// Reads a JSON spec; relative instance paths resolve against its folder.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut spec: ExperimentSpec = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in spec.instances.iter_mut() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.instances.is_empty() {
            return Err(Error::Config("no instances listed".into()));
        }
        self.config.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub seed: u64,
    /// `None` when the trial failed.
    pub best: Option<f64>,
    pub seconds: f64,
    pub best_chromosome: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceReport {
    pub instance: String,
    pub customers: usize,
    pub trials: Vec<TrialOutcome>,
    pub best: Option<f64>,
    pub mean: Option<f64>,
    pub reference: Option<f64>,
    /// Gap of the best trial against `reference`, in percent.
    pub gap_pct: Option<f64>,
    pub mean_seconds: f64,
    pub failed_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub config: GAConfig,
    pub instances: Vec<InstanceReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Config(format!("unknown report format `{other}`"))),
        }
    }
}

fn run_trial(inst: &Instance, cfg: &GAConfig, seed: u64) -> TrialOutcome {
    let cfg = GAConfig {
        seed,
        ..cfg.clone()
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| evolve(inst, &cfg)));
    let fail = |error: String| {
        warn!("{} seed {seed}: {error}", inst.name());
        TrialOutcome {
            seed,
            best: None,
            seconds: 0.0,
            best_chromosome: None,
            error: Some(error),
        }
    };
    match outcome {
        Ok(Ok(RunStats {
            best_fitness,
            best_chromosome,
            wall_time,
            ..
        })) => TrialOutcome {
            seed,
            best: Some(best_fitness),
            seconds: wall_time,
            best_chromosome: Some(best_chromosome.to_string()),
            error: None,
        },
        Ok(Err(e)) => fail(e.to_string()),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "trial panicked".into());
            fail(msg)
        }
    }
}

/// Runs `trials` independent GA runs with seeds `cfg.seed + k`, on up to
/// `jobs` threads. Output order follows the seed order.
pub fn run_trials(
    inst: &Instance,
    cfg: &GAConfig,
    trials: usize,
    jobs: usize,
) -> Result<Vec<TrialOutcome>> {
    let seeds: Vec<u64> = (0..trials as u64)
        .map(|k| cfg.seed.wrapping_add(k))
        .collect();
    #[cfg(feature = "parallel")]
    if jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        return Ok(pool.install(|| seeds.par_iter().map(|&s| run_trial(inst, cfg, s)).collect()));
    }
    let _ = jobs;
    Ok(seeds.iter().map(|&s| run_trial(inst, cfg, s)).collect())
}

fn summarise(inst: &Instance, trials: Vec<TrialOutcome>, reference: Option<f64>) -> InstanceReport {
    let ok: Vec<&TrialOutcome> = trials.iter().filter(|t| t.best.is_some()).collect();
    let values: Vec<f64> = ok.iter().filter_map(|t| t.best).collect();
    let best = values.iter().copied().reduce(f64::min);
    let mean = (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64);
    let mean_seconds = if ok.is_empty() {
        0.0
    } else {
        ok.iter().map(|t| t.seconds).sum::<f64>() / ok.len() as f64
    };
    let gap = match (best, reference) {
        (Some(b), Some(r)) => gap_pct(b, r).ok(),
        _ => None,
    };
    InstanceReport {
        instance: inst.name().to_string(),
        customers: inst.num_customers(),
        failed_trials: trials.len() - ok.len(),
        trials,
        best,
        mean,
        reference,
        gap_pct: gap,
        mean_seconds,
    }
}

/// Loads every instance up front (so a missing file fails before any trial
/// runs), then runs the trials of each.
pub fn run_experiment(spec: &ExperimentSpec, jobs: usize) -> Result<RunReport> {
    spec.validate()?;
    let instances = spec
        .instances
        .iter()
        .map(|p| load_instance(p, spec.format))
        .collect::<Result<Vec<_>>>()?;
    let mut reports = Vec::with_capacity(instances.len());
    for inst in &instances {
        let inst = match spec.config.alpha {
            Some(a) => inst.clone().with_alpha(a)?,
            None => inst.clone(),
        };
        info!("{}: {} trials", inst.name(), spec.trials);
        let trials = run_trials(&inst, &spec.config, spec.trials, jobs)?;
        let reference = spec.reference_values.get(inst.name()).copied();
        reports.push(summarise(&inst, trials, reference));
    }
    Ok(RunReport {
        config: spec.config.clone(),
        instances: reports,
    })
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_default()
}

pub const CSV_HEADER: &str = "instance,n,trials,best,mean,gap_pct,mean_seconds,reference";

/// CSV rounds to two decimals; JSON keeps full precision and per-trial data.
pub fn emit_report(report: &RunReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(report)?),
        ReportFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in &report.instances {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{:.2},{}",
                    r.instance,
                    r.customers,
                    r.trials.len(),
                    cell(r.best),
                    cell(r.mean),
                    cell(r.gap_pct),
                    r.mean_seconds,
                    cell(r.reference)
                );
            }
            Ok(out)
        }
    }
}

/// Writes `report.csv` and `report.json` into `dir`.
pub fn write_reports(report: &RunReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (name, format) in [
        ("report.csv", ReportFormat::Csv),
        ("report.json", ReportFormat::Json),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, emit_report(report, format)?).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepDesign {
    /// Every combination of the grid levels.
    #[default]
    Full,
    /// The 16-run orthogonal array over four factors at four levels.
    L16,
}

/// Levels per factor. An omitted axis holds the base config's value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub innovation_rate: Option<Vec<u8>>,
    pub initial_drone_pct: Option<Vec<f64>>,
    pub population_size: Option<Vec<usize>>,
    pub tournament_size: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub instance: PathBuf,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base: GAConfig,
    #[serde(default)]
    pub grid: SweepGrid,
    #[serde(default)]
    pub design: SweepDesign,
    #[serde(default)]
    pub allow_large: bool,
}

impl SweepSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut spec: SweepSpec = serde_json::from_str(&text)?;
        if spec.instance.is_relative() {
            spec.instance = path.parent().unwrap_or(Path::new("")).join(&spec.instance);
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub innovation_rate: u8,
    pub initial_drone_pct: f64,
    pub population_size: usize,
    pub tournament_size: usize,
    pub mean: Option<f64>,
    pub best: Option<f64>,
    /// The shipped default configuration.
    pub selected: bool,
}

/// L16(4^5) orthogonal array, first four columns, as level indices.
const L16: [[usize; 4]; 16] = [
    [0, 0, 0, 0],
    [0, 1, 1, 1],
    [0, 2, 2, 2],
    [0, 3, 3, 3],
    [1, 0, 1, 2],
    [1, 1, 0, 3],
    [1, 2, 3, 0],
    [1, 3, 2, 1],
    [2, 0, 2, 3],
    [2, 1, 3, 2],
    [2, 2, 0, 1],
    [2, 3, 1, 0],
    [3, 0, 3, 1],
    [3, 1, 2, 0],
    [3, 2, 1, 3],
    [3, 3, 0, 2],
];

fn axis<T: Clone>(levels: &Option<Vec<T>>, base: T, name: &str) -> Result<Vec<T>> {
    match levels {
        None => Ok(vec![base]),
        Some(v) if v.is_empty() => Err(Error::Config(format!("sweep axis `{name}` is empty"))),
        Some(v) => Ok(v.clone()),
    }
}

/// The configurations a sweep would run, in order.
pub fn sweep_configs(spec: &SweepSpec) -> Result<Vec<GAConfig>> {
    let b = &spec.base;
    let ir = axis(
        &spec.grid.innovation_rate,
        b.innovation_rate,
        "innovation_rate",
    )?;
    let dp = axis(
        &spec.grid.initial_drone_pct,
        b.initial_drone_pct,
        "initial_drone_pct",
    )?;
    let ps = axis(
        &spec.grid.population_size,
        b.population_size,
        "population_size",
    )?;
    let ts = axis(
        &spec.grid.tournament_size,
        b.tournament_size,
        "tournament_size",
    )?;
    let make = |i: u8, d: f64, p: usize, t: usize| GAConfig {
        innovation_rate: i,
        initial_drone_pct: d,
        population_size: p,
        tournament_size: t,
        ..b.clone()
    };
    let mut configs = Vec::new();
    match spec.design {
        SweepDesign::Full => {
            let total = ir.len() * dp.len() * ps.len() * ts.len();
            if total > MAX_SWEEP_CONFIGS && !spec.allow_large {
                return Err(Error::Config(format!(
                    "sweep has {total} configurations (limit {MAX_SWEEP_CONFIGS}); set allow_large to run it"
                )));
            }
            for &i in &ir {
                for &d in &dp {
                    for &p in &ps {
                        for &t in &ts {
                            configs.push(make(i, d, p, t));
                        }
                    }
                }
            }
        }
        SweepDesign::L16 => {
            if [ir.len(), dp.len(), ps.len(), ts.len()] != [4; 4] {
                return Err(Error::Config(
                    "the L16 design needs exactly four levels per axis".into(),
                ));
            }
            for row in L16 {
                configs.push(make(ir[row[0]], dp[row[1]], ps[row[2]], ts[row[3]]));
            }
            // Confirmation run of the shipped default when the array skips it.
            let default = GAConfig {
                num_generations: b.num_generations,
                alpha: b.alpha,
                seed: b.seed,
                ..GAConfig::default()
            };
            if !configs.contains(&default) {
                configs.push(default);
            }
        }
    }
    for c in &configs {
        c.validate()?;
    }
    Ok(configs)
}

fn is_default(cfg: &GAConfig) -> bool {
    let d = GAConfig::default();
    cfg.innovation_rate == d.innovation_rate
        && cfg.initial_drone_pct == d.initial_drone_pct
        && cfg.population_size == d.population_size
        && cfg.tournament_size == d.tournament_size
}

pub fn sweep_hyperparameters(spec: &SweepSpec, jobs: usize) -> Result<Vec<SweepRow>> {
    if spec.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let configs = sweep_configs(spec)?;
    let mut inst = load_instance(&spec.instance, None)?;
    if let Some(a) = spec.base.alpha {
        inst = inst.with_alpha(a)?;
    }
    let mut rows = Vec::with_capacity(configs.len());
    for (k, cfg) in configs.iter().enumerate() {
        info!("sweep config {}/{}", k + 1, configs.len());
        let report = summarise(&inst, run_trials(&inst, cfg, spec.trials, jobs)?, None);
        rows.push(SweepRow {
            innovation_rate: cfg.innovation_rate,
            initial_drone_pct: cfg.initial_drone_pct,
            population_size: cfg.population_size,
            tournament_size: cfg.tournament_size,
            mean: report.mean,
            best: report.best,
            selected: is_default(cfg),
        });
    }
    Ok(rows)
}

pub fn emit_sweep(rows: &[SweepRow], format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(rows)?),
        ReportFormat::Csv => {
            let mut out =
                String::from("innovation_rate,initial_drone_pct,population_size,tournament_size,mean,best,selected\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.innovation_rate,
                    r.initial_drone_pct,
                    r.population_size,
                    r.tournament_size,
                    cell(r.mean),
                    cell(r.best),
                    r.selected
                );
            }
            Ok(out)
        }
    }
}
