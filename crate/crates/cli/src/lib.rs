//! Command-line front end for the `qcloning` library.
//!
//! Exit codes: 0 on success, 1 when a verification or self-test fails, 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod selftest;
pub mod table;

use commands::{Command, Format, RunConfig, RunError};

#[derive(Debug, Parser)]
#[command(name = "qcloning", version, about = "Asymmetric quantum cloning: sweeps, bounds and entanglement")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,

    /// Qudit dimension.
    #[arg(long, global = true, default_value_t = 2)]
    pub d: usize,

    /// Grid resolution.
    #[arg(long, global = true, default_value_t = 100)]
    pub grid: usize,

    /// Shrinking factor of clone A (optimize).
    #[arg(long = "eta-a", global = true)]
    pub eta_a: Option<f64>,

    /// Polar angle of the input orbit (entanglement).
    #[arg(long, global = true)]
    pub theta: Option<f64>,

    /// Seed for random inputs.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,

    /// Sets every self-test tolerance to -1; used to check that failures are detected.
    #[arg(long = "corrupt-tolerances", global = true, hide = true)]
    pub corrupt_tolerances: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Sub {
    /// Fidelities of universal machines across the mixing angle.
    SweepUniversal,
    /// Optimal phase-covariant frontier.
    SweepPc,
    /// Single frontier point at --eta-a.
    Optimize,
    /// No-signaling bound search and inequality cross-check (JSON).
    VerifyNosignaling,
    /// PPT spectra, negativities and tangle on an orbit.
    Entanglement,
    /// Run the acceptance checks.
    Selftest,
}

impl Cli {
    pub fn config(&self) -> RunConfig {
        let command = match self.command {
            Sub::SweepUniversal => Command::SweepUniversal,
            Sub::SweepPc => Command::SweepPc,
            Sub::Optimize => Command::Optimize,
            Sub::VerifyNosignaling => Command::VerifyNosignaling,
            Sub::Entanglement => Command::Entanglement,
            Sub::Selftest => Command::Selftest,
        };
        RunConfig {
            command,
            d: self.d,
            grid: self.grid,
            eta_a: self.eta_a,
            theta: self.theta,
            seed: self.seed,
            output_path: self.out.clone(),
            format: match self.format {
                OutputFormat::Csv => Format::Csv,
                OutputFormat::Json => Format::Json,
            },
            corrupt_tolerances: self.corrupt_tolerances,
        }
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), RunError> {
    match &cfg.output_path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn render_table(cfg: &RunConfig, t: &table::Table) -> String {
    match cfg.format {
        Format::Csv => t.to_csv(),
        Format::Json => table::json_text(&t.to_json()),
    }
}

/// Runs a validated configuration and returns the process exit code.
pub fn execute(cfg: &RunConfig) -> Result<i32, RunError> {
    cfg.validate().map_err(RunError::Usage)?;
    match cfg.command {
        Command::SweepUniversal => emit(cfg, &render_table(cfg, &commands::sweep_universal(cfg)?))?,
        Command::SweepPc => emit(cfg, &render_table(cfg, &commands::sweep_pc(cfg)?))?,
        Command::Optimize => emit(cfg, &render_table(cfg, &commands::optimize(cfg)?))?,
        Command::Entanglement => emit(cfg, &render_table(cfg, &commands::entanglement_report(cfg)?))?,
        Command::VerifyNosignaling => {
            let outcome = commands::verify_nosignaling(cfg)?;
            emit(cfg, &table::json_text(&outcome.report))?;
            return Ok(if outcome.passed { 0 } else { 1 });
        }
        Command::Selftest => {
            let report = selftest::run_suite(&selftest::SuiteConfig {
                seed: cfg.seed,
                corrupt_tolerances: cfg.corrupt_tolerances,
            })?;
            let text = report.render();
            match (&cfg.output_path, cfg.format) {
                (Some(_), Format::Json) => emit(cfg, &report.to_json())?,
                (Some(_), Format::Csv) => emit(cfg, &report.to_csv())?,
                (None, Format::Json) => emit(cfg, &report.to_json())?,
                (None, Format::Csv) => emit(cfg, &text)?,
            }
            if cfg.output_path.is_some() {
                eprint!("{text}");
            }
            return Ok(if report.passed { 0 } else { 1 });
        }
    }
    Ok(0)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.config()) {
        Ok(code) => code,
        Err(RunError::Usage(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
