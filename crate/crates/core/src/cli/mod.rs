//! Command-line experiment runner.
//!
//! `stathyp run --config exp.toml` runs one experiment, `stathyp sweep DIR`
//! runs every `*.toml` in a directory, and `stathyp list` prints the catalog
//! as JSON. Each run writes a CSV file and a `.summary.txt` beside it.

pub mod catalog;
pub mod config;
pub mod report;
pub mod runner;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use config::{ConfigError, ExperimentConfig};
use report::{write_atomic, Report};

/// Environment variable overriding the config seed (the `--seed` flag wins).
pub const SEED_ENV: &str = "STATHYP_SEED";

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_INVARIANT: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "stathyp", version, about = "Statistical hyperbolicity experiments on model spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment config.
    Run {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        #[command(flatten)]
        opts: RunOptions,
    },
    /// Run every `*.toml` config in a directory, in name order.
    Sweep {
        dir: PathBuf,
        #[command(flatten)]
        opts: RunOptions,
    },
    /// Print the experiment catalog as JSON.
    List,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Summary,
}

#[derive(Debug, Clone, Args)]
pub struct RunOptions {
    /// Directory for output files; overrides the directory part of `output`.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed; takes precedence over the environment and the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// What to print on stdout.
    #[arg(long, value_enum, default_value = "summary")]
    pub format: Format,
}

/// A failed run and the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn config(e: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_CONFIG, message: e.to_string() }
    }

    fn io(e: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_IO, message: e.to_string() }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io(m) => Failure::io(m),
            ConfigError::Invalid(e) => Failure::config(e),
        }
    }
}

/// Seed precedence: flag, then environment, then config.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>, config: u64) -> Result<u64, Error> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env {
        Some(v) => v.trim().parse().map_err(|_| Error::Parse(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        None => Ok(config),
    }
}

/// CSV location: `output` (or `<experiment>.csv`), moved into `--out` if given.
pub fn csv_path(cfg: &ExperimentConfig, out: Option<&Path>) -> PathBuf {
    let given = PathBuf::from(cfg.output.clone().unwrap_or_else(|| format!("{}.csv", cfg.experiment)));
    match out {
        Some(dir) => dir.join(given.file_name().unwrap_or(given.as_os_str())),
        None => given,
    }
}

pub fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.txt")
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Failure::config("--workers must be at least 1")),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(w).build().map_err(Failure::config)?;
            Ok(pool.install(f))
        }
    }
}

/// Loads, runs and writes one config. Returns the report on success, even
/// when invariant checks failed.
pub fn run_config(path: &Path, opts: &RunOptions) -> Result<Report, Failure> {
    let mut cfg = ExperimentConfig::load(path)?;
    let env = std::env::var(SEED_ENV).ok();
    cfg.seed = resolve_seed(opts.seed, env.as_deref(), cfg.seed).map_err(Failure::config)?;
    let report = with_pool(opts.workers, || runner::run(&cfg))?.map_err(Failure::config)?;
    let csv = csv_path(&cfg, opts.out.as_deref());
    write_atomic(&csv, &report.csv()).map_err(|e| Failure::io(format!("{}: {e}", csv.display())))?;
    let summary = summary_path(&csv);
    write_atomic(&summary, &report.summary()).map_err(|e| Failure::io(format!("{}: {e}", summary.display())))?;
    Ok(report)
}

fn emit(report: &Report, format: Format) {
    match format {
        Format::Csv => print!("{}", report.csv()),
        Format::Summary => print!("{}", report.summary()),
    }
}

fn status(report: &Report) -> u8 {
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_INVARIANT
    }
}

fn configs_in(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = std::fs::read_dir(dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    Ok(paths)
}

/// Runs the parsed command line; returns the process exit status.
pub fn execute(cli: Cli) -> u8 {
    match cli.command {
        Command::List => {
            println!("{}", serde_json::to_string_pretty(&catalog::catalog()).expect("catalog serializes"));
            EXIT_OK
        }
        Command::Run { config, opts } => match run_config(&config, &opts) {
            Ok(report) => {
                emit(&report, opts.format);
                status(&report)
            }
            Err(f) => {
                eprintln!("error: {}", f.message);
                f.code
            }
        },
        Command::Sweep { dir, opts } => {
            let paths = match configs_in(&dir) {
                Ok(p) => p,
                Err(f) => {
                    eprintln!("error: {}", f.message);
                    return f.code;
                }
            };
            let mut worst = EXIT_OK;
            for path in paths {
                let code = match run_config(&path, &opts) {
                    Ok(report) => {
                        emit(&report, opts.format);
                        status(&report)
                    }
                    Err(f) => {
                        eprintln!("error: {}: {}", path.display(), f.message);
                        f.code
                    }
                };
                worst = worst.max(code);
            }
            worst
        }
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(execute(Cli::parse()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(Some(1), Some("2"), 3).unwrap(), 1);
        assert_eq!(resolve_seed(None, Some("2"), 3).unwrap(), 2);
        assert_eq!(resolve_seed(None, None, 3).unwrap(), 3);
        assert!(resolve_seed(None, Some("x"), 3).is_err());
    }

    #[test]
    fn output_paths() {
        let mut cfg = ExperimentConfig::new(config::ExperimentKind::P1);
        assert_eq!(csv_path(&cfg, None), PathBuf::from("p1.csv"));
        cfg.output = Some("runs/a.csv".into());
        assert_eq!(csv_path(&cfg, Some(Path::new("/tmp/o"))), PathBuf::from("/tmp/o/a.csv"));
        assert_eq!(summary_path(Path::new("runs/a.csv")), PathBuf::from("runs/a.summary.txt"));
    }
}
