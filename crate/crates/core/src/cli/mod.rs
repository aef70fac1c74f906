//! Config-driven experiment runner behind the `spinbath` binary.

mod config;
mod experiments;
mod output;
mod reproduce;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

pub use config::{
    BathSpec, DensitySpec, DriveSpec, Experiment, ExperimentConfig, FitSpec, RatioSpec, SensitivitySpec,
    SequenceSpec, Spacing, StarkSpec, SweepSpec,
};
pub use experiments::{experiment_sequence, run_experiment, Outcome};
pub use output::{render_outputs, sha256_hex, write_atomic, write_run, WrittenFile};
pub use reproduce::{bundled_config, drive_monotonicity, figure_checks, figure_config, Check, FIGURES};

use crate::error::{Error, Result};
use crate::pulses::to_text;

#[derive(Debug, Parser)]
#[command(name = "spinbath", version, about = "NV coherence under a driven surface-spin bath")]
pub struct Cli {
    /// Override the run seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for trajectory sampling.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// Regenerate a figure dataset from a bundled config.
    Reproduce { figure: String },
    /// Write the pulse sequence of a config in line format.
    DumpSequence { config: PathBuf },
}

/// Process exit code for an error: 2 for bad input, 3 for numerical failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::InvalidInput(_)
        | Error::Sequence(_)
        | Error::Unsupported(_)
        | Error::DimensionMismatch { .. } => 2,
        Error::NonConvergence(_) | Error::InsufficientData(_) | Error::Unbounded(_) => 3,
        _ => 1,
    }
}

/// Result of a run or reproduce invocation.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub outcome: Outcome,
    pub checks: Vec<Check>,
    pub files: Vec<WrittenFile>,
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {n} threads: {e}")))?;
            pool.install(f)
        }
    }
}

fn execute(
    mut cfg: ExperimentConfig,
    text: &str,
    figure: Option<&str>,
    seed: Option<u64>,
    out: Option<&Path>,
    threads: Option<usize>,
) -> Result<RunSummary> {
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let dir = match (out, &cfg.output, figure) {
        (Some(o), _, _) => o.to_path_buf(),
        (None, Some(o), _) => o.clone(),
        (None, None, Some(f)) => PathBuf::from("spinbath-out").join(f),
        (None, None, None) => PathBuf::from("spinbath-out").join(cfg.experiment.name()),
    };
    let start = Instant::now();
    let outcome = with_threads(threads, || run_experiment(&cfg))?;
    let checks = match figure {
        Some(id) => figure_checks(id, &cfg, &outcome)?,
        None => Vec::new(),
    };
    let mut report = format!("experiment {} seed {}\n", cfg.experiment, cfg.seed);
    if let Some(id) = figure {
        report.push_str(&format!("figure {id}\n"));
        for c in &checks {
            report.push_str(&format!("{c}\n"));
        }
    }
    report.push('\n');
    report.push_str(&outcome.report());
    let files = write_run(&dir, text, &cfg, &outcome, &report, start.elapsed().as_secs_f64())?;
    Ok(RunSummary {
        dir,
        outcome,
        checks,
        files,
    })
}

pub fn run_config_file(path: &Path, seed: Option<u64>, out: Option<&Path>, threads: Option<usize>) -> Result<RunSummary> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg = ExperimentConfig::parse(&text)?;
    execute(cfg, &text, None, seed, out, threads)
}

pub fn reproduce_figure(id: &str, seed: Option<u64>, out: Option<&Path>, threads: Option<usize>) -> Result<RunSummary> {
    let (cfg, text) = figure_config(id)?;
    execute(cfg, text, Some(id), seed, out, threads)
}

/// Sequence text for a config file; written to `<out>/sequence.txt` when `out` is set.
pub fn dump_sequence_file(path: &Path, seed: Option<u64>, out: Option<&Path>) -> Result<String> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let text = to_text(&experiment_sequence(&cfg)?);
    if let Some(dir) = out {
        write_atomic(&dir.join("sequence.txt"), text.as_bytes())?;
    }
    Ok(text)
}

/// Entry point shared by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let out = cli.out.as_deref();
    let result = match &cli.command {
        Command::Run { config } => run_config_file(config, cli.seed, out, cli.threads).map(|s| {
            println!("{}", s.dir.display());
            print!("{}", s.outcome.report());
            0
        }),
        Command::Reproduce { figure } => reproduce_figure(figure, cli.seed, out, cli.threads).map(|s| {
            println!("{}", s.dir.display());
            for c in &s.checks {
                println!("{c}");
            }
            if s.checks.iter().all(|c| c.pass) {
                0
            } else {
                1
            }
        }),
        Command::DumpSequence { config } => dump_sequence_file(config, cli.seed, out).map(|t| {
            if out.is_none() {
                print!("{t}");
            }
            0
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
