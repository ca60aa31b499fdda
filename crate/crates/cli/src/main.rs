use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fstsp::bench::{
    emit_report, emit_sweep, run_experiment, sweep_hyperparameters, write_reports, ExperimentSpec,
    ReportFormat, SweepSpec,
};
use fstsp::instances::read_tour_file;
use fstsp::oracle::{brute_force_solve, DEFAULT_LIMIT_N};
use fstsp::{evolve_with, load_instance, Error, GAConfig, InstanceFormat, RunOptions};

/// Truck-and-drone delivery routing with a self-adaptive genetic algorithm.
#[derive(Parser)]
#[command(name = "fstsp", version)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the GA once on an instance.
    Solve {
        instance: PathBuf,
        /// GA parameters as JSON or `key = value` lines.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        generations: Option<u64>,
        /// Drone/truck speed ratio, overriding the instance.
        #[arg(long)]
        alpha: Option<f64>,
        /// Seed tour, one node id per line, replacing the computed one.
        #[arg(long)]
        tour_file: Option<PathBuf>,
        /// `bouman` or `canonical`; detected when omitted.
        #[arg(long)]
        format: Option<InstanceFormat>,
        #[arg(long)]
        json: bool,
    },
    /// Run a multi-trial experiment described by a JSON spec.
    Bench {
        spec: PathBuf,
        #[arg(long, env = "FSTSP_JOBS")]
        jobs: Option<usize>,
        /// Directory for report.csv and report.json.
        #[arg(long)]
        output: Option<PathBuf>,
        /// What to print on stdout.
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
    },
    /// Solve a small instance exactly.
    Oracle {
        instance: PathBuf,
        /// Largest node count to accept.
        #[arg(long, default_value_t = DEFAULT_LIMIT_N)]
        limit: usize,
        #[arg(long)]
        format: Option<InstanceFormat>,
        #[arg(long)]
        json: bool,
    },
    /// Run a hyper-parameter sweep described by a JSON grid.
    Sweep {
        grid: PathBuf,
        #[arg(long, env = "FSTSP_JOBS")]
        jobs: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
    },
}

enum Failure {
    Usage(String),
    Io(String),
    Trial(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::Truncated { .. }
            | Error::InstanceTooSmall(_)
            | Error::InvalidInstance(_)
            | Error::Json(_) => Failure::Io(msg),
            Error::Config(_)
            | Error::TooLarge { .. }
            | Error::OutOfBounds { .. }
            | Error::InvalidChromosome(_) => Failure::Usage(msg),
            _ => Failure::Trial(msg),
        }
    }
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve {
            instance,
            config,
            seed,
            generations,
            alpha,
            tour_file,
            format,
            json,
        } => {
            let inst = load_instance(&instance, format)?;
            let mut cfg = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                    GAConfig::parse(&text)?
                }
                None => GAConfig::default(),
            };
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.num_generations = generations.unwrap_or(cfg.num_generations);
            cfg.alpha = alpha.or(cfg.alpha);
            let opts = RunOptions {
                seed_tour: tour_file.as_deref().map(read_tour_file).transpose()?,
                ..RunOptions::default()
            };
            let run = evolve_with(&inst, &cfg, &opts)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&run).map_err(Error::from)?
                );
            } else {
                println!("instance     {}", inst.name());
                println!("makespan     {:.2}", run.best_fitness);
                println!("tsp tour     {:.2}", run.seed_tour_length);
                println!("generations  {}", run.generations_run);
                println!("seconds      {:.2}", run.wall_time);
                println!("solution     {}", run.best_chromosome);
            }
        }
        Command::Bench {
            spec,
            jobs,
            output,
            format,
        } => {
            let spec = ExperimentSpec::load(&spec)?;
            let report = run_experiment(&spec, jobs.unwrap_or_else(default_jobs))?;
            if let Some(dir) = output.or_else(|| spec.output_dir.clone()) {
                write_reports(&report, &dir)?;
            }
            print!("{}", emit_report(&report, format)?);
            let failed: usize = report.instances.iter().map(|r| r.failed_trials).sum();
            if failed > 0 {
                return Err(Failure::Trial(format!("{failed} trial(s) failed")));
            }
        }
        Command::Oracle {
            instance,
            limit,
            format,
            json,
        } => {
            let inst = load_instance(&instance, format)?;
            let result = brute_force_solve(&inst, limit)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&result).map_err(Error::from)?
                );
            } else {
                println!("instance   {}", inst.name());
                println!("optimum    {:.2}", result.optimal_makespan);
                println!("evaluated  {}", result.evaluated_count);
                println!("solution   {}", result.optimal_chromosome);
            }
        }
        Command::Sweep {
            grid,
            jobs,
            output,
            format,
        } => {
            let spec = SweepSpec::load(&grid)?;
            let rows = sweep_hyperparameters(&spec, jobs.unwrap_or_else(default_jobs))?;
            let text = emit_sweep(&rows, format)?;
            match output {
                Some(path) => write_out(&path, &text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Trial(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
