//! Run configuration: a JSON file merged with command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thirdorder::{Coefficients64, Complex64};

use crate::CliError;

/// Fourier modes as `[n, re, im]` triples.
type Modes = Vec<(i64, f64, f64)>;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientInput {
    #[serde(default)]
    p: Modes,
    #[serde(default)]
    q: Modes,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    coefficients: Option<CoefficientInput>,
    p: Option<Modes>,
    q: Option<Modes>,
    window: Option<[f64; 2]>,
    grid: Option<usize>,
    nmax: Option<i64>,
    eps: Option<Vec<f64>>,
    tol: Option<f64>,
    out: Option<PathBuf>,
    threads: Option<usize>,
    reconstruct: Option<bool>,
}

/// Values given on the command line; each one wins over the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub window: Option<(f64, f64)>,
    pub grid: Option<usize>,
    pub nmax: Option<i64>,
    pub eps: Option<Vec<f64>>,
    pub tol: Option<f64>,
    pub threads: Option<usize>,
    pub reconstruct: bool,
}

/// Options that determine the numbers in the data files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Options {
    pub window: (f64, f64),
    pub grid: usize,
    pub nmax: i64,
    pub eps: Vec<f64>,
    pub tol: f64,
    pub reconstruct: bool,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub coefficients: Coefficients64,
    pub options: Options,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

/// Per-command defaults.
pub struct Defaults {
    pub window: (f64, f64),
    pub grid: usize,
    pub nmax: i64,
    pub tol: f64,
}

fn to_entries(modes: &Modes) -> Vec<(i64, Complex64)> {
    modes.iter().map(|&(n, re, im)| (n, Complex64::new(re, im))).collect()
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("cannot parse {}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(flags: &Overrides, defaults: &Defaults) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let (p, q) = match (file.coefficients, file.p, file.q) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(CliError::Config("give coefficients either under \"coefficients\" or as top-level p/q, not both".into()))
            }
            (Some(c), None, None) => (c.p, c.q),
            (None, p, q) => (p.unwrap_or_default(), q.unwrap_or_default()),
        };
        let coefficients = Coefficients64::from_fourier(&to_entries(&p), &to_entries(&q)).map_err(|e| CliError::Config(e.to_string()))?;

        let window = flags.window.or(file.window.map(|w| (w[0], w[1]))).unwrap_or(defaults.window);
        let grid = flags.grid.or(file.grid).unwrap_or(defaults.grid);
        let nmax = flags.nmax.or(file.nmax).unwrap_or(defaults.nmax);
        let eps = flags.eps.clone().or(file.eps).unwrap_or_else(|| vec![0.05, 0.1, 0.2]);
        let tol = flags.tol.or(file.tol).unwrap_or(defaults.tol);
        let out = flags.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("."));
        let threads = flags.threads.or(file.threads);
        let reconstruct = flags.reconstruct || file.reconstruct.unwrap_or(false);

        if !(window.0.is_finite() && window.1.is_finite() && window.0 < window.1) {
            return Err(CliError::Config(format!("window must satisfy left < right, got [{}, {}]", window.0, window.1)));
        }
        if grid < 16 {
            return Err(CliError::Config(format!("grid must be at least 16, got {grid}")));
        }
        if nmax < 1 {
            return Err(CliError::Config(format!("nmax must be positive, got {nmax}")));
        }
        if !(tol > 0.0 && tol < 1.0) {
            return Err(CliError::Config(format!("tol must lie in (0, 1), got {tol}")));
        }
        if eps.is_empty() || eps.iter().any(|e| !e.is_finite() || *e == 0.0) {
            return Err(CliError::Config("eps must be a non-empty list of nonzero numbers".into()));
        }
        if threads == Some(0) {
            return Err(CliError::Config("threads must be positive".into()));
        }
        std::fs::create_dir_all(&out).map_err(|e| CliError::Config(format!("cannot create {}: {e}", out.display())))?;
        let probe = out.join(".thirdorder-write-check");
        std::fs::write(&probe, b"").map_err(|e| CliError::Config(format!("{} is not writable: {e}", out.display())))?;
        let _ = std::fs::remove_file(&probe);

        Ok(RunConfig { coefficients, options: Options { window, grid, nmax, eps, tol, reconstruct }, out, threads })
    }
}

/// Parses `A,B`.
pub fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let v = parse_list(s)?;
    match v.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(format!("expected A,B, got {s:?}")),
    }
}

/// Parses a comma-separated list of numbers.
fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"))).collect()
}
