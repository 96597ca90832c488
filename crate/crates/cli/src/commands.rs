//! The subcommands. Each one computes, then writes its files in a fixed order.

use rayon::prelude::*;
use serde::Serialize;
use thirdorder::eigenvalues::{antiperiodic_consistency, find_eigenvalues, reconstruct_t, validate_eigenvalue_asymptotics, EigenFit, EigenKind, EigenOptions, EigenvalueList};
use thirdorder::small_coupling::{measure_band, width_exponent, MeasureOptions};
use thirdorder::spectrum_scan::{band_grid, locate_ramifications, scan_s3, BandReport, RamificationOptions, RamificationScan, ScanOptions};
use thirdorder::{propagate, Complex64, IntegratorOptions64, SpectralPoint};

use crate::config::RunConfig;
use crate::output::{coefficient_hash, fmt_f64, write_csv, write_json, write_meta, Header};
use crate::CliError;

fn header(cfg: &RunConfig) -> Header<'_> {
    Header { coefficients_sha256: coefficient_hash(&cfg.coefficients), options: &cfg.options }
}

fn integrator(cfg: &RunConfig) -> IntegratorOptions64 {
    IntegratorOptions64::with_tolerance(cfg.options.tol)
}

fn grid_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|k| if k + 1 == n { hi } else { lo + step * k as f64 }).collect()
}

fn b(x: bool) -> String {
    x.to_string()
}

/// trace.csv: T(λ) = (re_T + i·im_T)·exp(log_scale) on the grid.
pub fn trace(cfg: &RunConfig) -> Result<(), CliError> {
    let o = &cfg.options;
    let io = integrator(cfg);
    let rows: Vec<Vec<String>> = grid_points(o.window.0, o.window.1, o.grid)
        .par_iter()
        .map(|&x| {
            let m = propagate(&cfg.coefficients, &SpectralPoint::real(x), &io)?;
            let t = m.matrix.trace();
            Ok(vec![fmt_f64(x), fmt_f64(t.re), fmt_f64(t.im), fmt_f64(m.log_scale)])
        })
        .collect::<thirdorder::Result<_>>()?;
    let h = header(cfg);
    write_csv(&cfg.out.join("trace.csv"), &h, &["lambda", "re_T", "im_T", "log_scale"], &rows)?;
    write_meta(&cfg.out, "trace", "trace", &h, cfg.threads)
}

fn ramification_rows(scan: &RamificationScan<f64>) -> Vec<Vec<String>> {
    scan.records
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.sign.as_char().to_string(),
                fmt_f64(r.value.re),
                fmt_f64(r.value.im),
                fmt_f64(r.residual),
                b(r.disk_ok),
                b(r.converged),
                r.psi_residual.map(fmt_f64).unwrap_or_default(),
            ]
        })
        .collect()
}

const RAMIFICATION_COLUMNS: [&str; 8] = ["n", "sign", "re", "im", "residual", "disk_ok", "converged", "psi_residual"];

fn ramifications_scan(cfg: &RunConfig) -> Result<RamificationScan<f64>, CliError> {
    let opts = RamificationOptions { integrator: integrator(cfg), ..RamificationOptions::default() };
    Ok(locate_ramifications(&cfg.coefficients, cfg.options.nmax, &opts)?)
}

/// bands.json, ramifications.csv and the plot grid grid.csv.
pub fn bands(cfg: &RunConfig) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Out<'a> {
        #[serde(flatten)]
        header: &'a Header<'a>,
        report: &'a BandReport<f64>,
        windings: &'a [(i64, f64)],
        n0: i64,
    }
    let o = &cfg.options;
    let io = integrator(cfg);
    let scan_opts = ScanOptions { integrator: io, ..ScanOptions::default() };
    let report = scan_s3(&cfg.coefficients, o.window, o.grid, &scan_opts)?;
    let rams = ramifications_scan(cfg)?;
    let grid = band_grid(&cfg.coefficients, o.window, o.grid, &io)?;
    let grid_rows: Vec<Vec<String>> = grid
        .iter()
        .map(|g| {
            let mut row = vec![fmt_f64(g.lambda), fmt_f64(g.trace.re), fmt_f64(g.trace.im), fmt_f64(g.rho)];
            for d in &g.lyapunov {
                row.push(fmt_f64(d.re));
                row.push(fmt_f64(d.im));
            }
            row.push(b(g.s3_rho));
            row.push(b(g.s3_lyapunov));
            row
        })
        .collect();

    let h = header(cfg);
    write_json(&cfg.out.join("bands.json"), &Out { header: &h, report: &report, windings: &rams.windings, n0: rams.n0 })?;
    write_csv(&cfg.out.join("ramifications.csv"), &h, &RAMIFICATION_COLUMNS, &ramification_rows(&rams))?;
    let columns =
        ["lambda", "re_T", "im_T", "rho", "re_delta1", "im_delta1", "re_delta2", "im_delta2", "re_delta3", "im_delta3", "s3_rho", "s3_lyapunov"];
    write_csv(&cfg.out.join("grid.csv"), &h, &columns, &grid_rows)?;
    write_meta(&cfg.out, "bands", "bands", &h, cfg.threads)
}

/// ramifications.csv only.
pub fn ramifications(cfg: &RunConfig) -> Result<(), CliError> {
    let rams = ramifications_scan(cfg)?;
    let h = header(cfg);
    write_csv(&cfg.out.join("ramifications.csv"), &h, &RAMIFICATION_COLUMNS, &ramification_rows(&rams))?;
    write_meta(&cfg.out, "ramifications", "ramifications", &h, cfg.threads)
}

/// eigenvalues.csv, eigen_fit.json and, on request, reconstruction.json.
pub fn eigs(cfg: &RunConfig) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Fits<'a> {
        #[serde(flatten)]
        header: &'a Header<'a>,
        periodic: EigenFit<f64>,
        antiperiodic: EigenFit<f64>,
        periodic_central: (i64, usize),
        antiperiodic_central: (i64, usize),
    }
    #[derive(Serialize)]
    struct Point {
        lambda: f64,
        reconstructed: Complex64,
        propagated: Complex64,
        relative_error: f64,
    }
    #[derive(Serialize)]
    struct Reconstruction<'a> {
        #[serde(flatten)]
        header: &'a Header<'a>,
        n_trunc: i64,
        points: Vec<Point>,
        max_relative_error: f64,
        antiperiodic_consistency: f64,
    }

    let o = &cfg.options;
    let io = integrator(cfg);
    let c = &cfg.coefficients;
    let eo = EigenOptions { integrator: io, ..EigenOptions::default() };
    let range = (-o.nmax, o.nmax);
    let per = find_eigenvalues(c, EigenKind::Periodic, range, &eo)?;
    let anti = find_eigenvalues(c, EigenKind::Antiperiodic, range, &eo)?;
    let fits = Fits {
        header: &header(cfg),
        periodic: validate_eigenvalue_asymptotics(&per, c)?,
        antiperiodic: validate_eigenvalue_asymptotics(&anti, c)?,
        periodic_central: (per.central_n, per.central_count),
        antiperiodic_central: (anti.central_n, anti.central_count),
    };
    let recon = if o.reconstruct {
        let p0 = c.p0();
        let points: Vec<Point> = grid_points(o.window.0, o.window.1, 20)
            .par_iter()
            .map(|&x| {
                let propagated = propagate(c, &SpectralPoint::real(x), &io)?.trace;
                let reconstructed = reconstruct_t(&per, &anti, p0, x)?;
                let relative_error = (reconstructed - propagated).norm() / propagated.norm().max(1.0);
                Ok(Point { lambda: x, reconstructed, propagated, relative_error })
            })
            .collect::<thirdorder::Result<_>>()?;
        let max_relative_error = points.iter().fold(0.0f64, |a, p| a.max(p.relative_error));
        let consistency = antiperiodic_consistency(&per, &anti, p0)?;
        Some((points, max_relative_error, consistency, per.complete_to().min(anti.complete_to())))
    } else {
        None
    };

    let h = header(cfg);
    let rows: Vec<Vec<String>> = [&per, &anti]
        .iter()
        .flat_map(|l: &&EigenvalueList<f64>| {
            l.entries.iter().map(move |e| vec![l.kind.name().to_string(), e.n.to_string(), fmt_f64(e.value), fmt_f64(e.residual)])
        })
        .collect();
    write_csv(&cfg.out.join("eigenvalues.csv"), &h, &["kind", "n", "value", "residual"], &rows)?;
    write_json(&cfg.out.join("eigen_fit.json"), &fits)?;
    if let Some((points, max_relative_error, antiperiodic_consistency, n_trunc)) = recon {
        write_json(&cfg.out.join("reconstruction.json"), &Reconstruction { header: &h, n_trunc, points, max_relative_error, antiperiodic_consistency })?;
    }
    write_meta(&cfg.out, "eigs", "eigs", &h, cfg.threads)
}

/// smallcoupling.json and smallcoupling.csv over the ε list.
pub fn smallcoupling(cfg: &RunConfig) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Row {
        epsilon: f64,
        h: f64,
        b2: f64,
        b3: f64,
        predicted: Option<(f64, f64)>,
        measured: Option<(f64, f64)>,
        width_ratio: Option<f64>,
        empty_predicted: bool,
        inconclusive: bool,
    }
    #[derive(Serialize)]
    struct Out<'a> {
        #[serde(flatten)]
        header: &'a Header<'a>,
        rows: &'a [Row],
        width_exponent: Option<f64>,
    }

    let c = &cfg.coefficients;
    if c.p0() != 0.0 {
        return Err(CliError::Config(thirdorder::Error::NonzeroPMean(c.p0()).to_string()));
    }
    let mo = MeasureOptions { integrator: integrator(cfg), grid: cfg.options.grid, ..MeasureOptions::default() };
    let rows: Vec<Row> = cfg
        .options
        .eps
        .par_iter()
        .map(|&e| {
            let m = measure_band(c, e, &mo)?;
            let p = m.prediction;
            Ok(Row {
                epsilon: e,
                h: p.h,
                b2: p.b2,
                b3: p.b3,
                predicted: (p.h > 0.0).then_some((p.r_minus, p.r_plus)),
                measured: m.measured,
                width_ratio: m.width_ratio,
                empty_predicted: p.empty,
                inconclusive: p.inconclusive,
            })
        })
        .collect::<thirdorder::Result<_>>()?;
    let pts: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.measured.map(|(l, rr)| (r.epsilon.abs(), rr - l))).collect();
    let exponent = if pts.len() >= 2 { width_exponent(&pts) } else { None };

    let h = header(cfg);
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.epsilon),
                fmt_f64(r.h),
                fmt_f64(r.b2),
                fmt_f64(r.b3),
                opt(r.predicted.map(|p| p.0)),
                opt(r.predicted.map(|p| p.1)),
                opt(r.measured.map(|p| p.0)),
                opt(r.measured.map(|p| p.1)),
                opt(r.width_ratio),
            ]
        })
        .collect();
    write_json(&cfg.out.join("smallcoupling.json"), &Out { header: &h, rows: &rows, width_exponent: exponent })?;
    let columns = ["epsilon", "h", "b2", "b3", "predicted_left", "predicted_right", "measured_left", "measured_right", "width_ratio"];
    write_csv(&cfg.out.join("smallcoupling.csv"), &h, &columns, &table)?;
    write_meta(&cfg.out, "smallcoupling", "smallcoupling", &h, cfg.threads)
}
