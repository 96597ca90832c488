//! `thirdorder`: batch runs over the spectral library with JSON/CSV output.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_window, Defaults, Overrides, RunConfig};

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments: exit code 2.
    Config(String),
    /// A numerical routine failed: exit code 3.
    Compute(String),
    /// Output could not be written: exit code 3.
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Compute(m) => write!(f, "compute error: {m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

impl From<thirdorder::Error> for CliError {
    fn from(e: thirdorder::Error) -> Self {
        use thirdorder::Error::*;
        match e {
            NonzeroQMean(_) | NonzeroPMean(_) | NonRealCoefficient(_) | DuplicateMode(_) | NonFiniteCoefficient(_) | WindowTooCoarse { .. } | InvalidArgument(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Compute(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "thirdorder", version, about = "Spectral data of the third-order periodic operator i∂³ + ip∂ + i∂p + q")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// T(λ) on a real grid.
    Trace(Flags),
    /// Multiplicity-3 bands, ramifications and the ρ/Lyapunov plot grid.
    Bands(Flags),
    /// Periodic and antiperiodic eigenvalues with asymptotic fits.
    Eigs(Flags),
    /// Small-coupling band law over an ε sweep.
    Smallcoupling(Flags),
    /// Complex ramifications only.
    Ramifications(Flags),
}

#[derive(Args, Debug, Clone)]
struct Flags {
    /// JSON configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Real window as A,B.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true, value_name = "A,B")]
    window: Option<(f64, f64)>,
    /// Number of grid points.
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
    /// Largest |n| for ramifications and eigenvalues.
    #[arg(long, value_name = "N")]
    nmax: Option<i64>,
    /// Comma-separated ε values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "LIST")]
    eps: Option<Vec<f64>>,
    /// Integrator tolerance.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
    /// Worker threads.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Also reconstruct T from both spectra (eigs).
    #[arg(long)]
    reconstruct: bool,
}

impl From<Flags> for Overrides {
    fn from(f: Flags) -> Self {
        Overrides {
            config: f.config,
            out: f.out,
            window: f.window,
            grid: f.grid,
            nmax: f.nmax,
            eps: f.eps,
            tol: f.tol,
            threads: f.threads,
            reconstruct: f.reconstruct,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (flags, defaults, action): (Flags, Defaults, fn(&RunConfig) -> Result<(), CliError>) = match cli.command {
        Command::Trace(f) => (f, Defaults { window: (-50.0, 50.0), grid: 200, nmax: 12, tol: 1e-12 }, commands::trace),
        Command::Bands(f) => (f, Defaults { window: (-100.0, 100.0), grid: 512, nmax: 12, tol: 1e-12 }, commands::bands),
        Command::Eigs(f) => (f, Defaults { window: (-2000.0, 2000.0), grid: 512, nmax: 16, tol: 1e-12 }, commands::eigs),
        Command::Smallcoupling(f) => (f, Defaults { window: (-1.0, 1.0), grid: 512, nmax: 12, tol: 1e-13 }, commands::smallcoupling),
        Command::Ramifications(f) => (f, Defaults { window: (-100.0, 100.0), grid: 512, nmax: 12, tol: 1e-12 }, commands::ramifications),
    };
    let cfg = RunConfig::resolve(&flags.into(), &defaults)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Config(e.to_string()))?;
    }
    action(&cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("thirdorder: {e}");
            ExitCode::from(e.code())
        }
    }
}
