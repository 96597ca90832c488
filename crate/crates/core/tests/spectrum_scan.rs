mod common;

use std::f64::consts::PI;

use common::*;
use thirdorder::monodromy::{point, propagate};
use thirdorder::multipliers::{discriminant_cubic, discriminant_scale, rho_ab};
use thirdorder::small_coupling::epsilon_terms;
use thirdorder::spectrum_scan::*;
use thirdorder::{Coefficients64, Error, IntegratorOptions64};

fn tight() -> IntegratorOptions64 {
    IntegratorOptions64::with_tolerance(1e-12)
}

/// ρ/max(1,|T|)⁴ straight from the propagated trace.
fn rho_oracle(k: &Coefficients64, x: f64) -> f64 {
    let t = propagate(k, &point(c(x, 0.0)), &tight()).unwrap().trace;
    rho_ab(t.re - 3.0, t.im) / t.norm().max(1.0).powi(4)
}

#[test]
fn free_operator_has_a_single_degenerate_point() {
    let r = scan_s3(&Coefficients64::zero(), (-100.0, 100.0), 512, &ScanOptions::default()).unwrap();
    assert_eq!(r.intervals.len(), 1, "{:?}", r.intervals);
    let b = r.intervals[0];
    assert!(b.degenerate && b.left.abs() < 1e-6);
}

#[test]
fn cosine_p_opens_one_band_and_cosine_q_none() {
    let band = scan_s3(&cos_p().scaled(0.2), (-100.0, 100.0), 512, &ScanOptions::default()).unwrap();
    let real: Vec<_> = band.intervals.iter().filter(|b| !b.degenerate).collect();
    assert_eq!(real.len(), 1, "{:?}", band.intervals);
    assert!(real[0].right > real[0].left && !real[0].clipped);
    assert_eq!(band.count_m, 2);

    let none = scan_s3(&cos_q().scaled(0.2), (-100.0, 100.0), 512, &ScanOptions::default()).unwrap();
    assert!(none.intervals.iter().all(|b| b.degenerate), "{:?}", none.intervals);
    assert!(none.intervals.iter().all(|b| b.left.abs() < 1.0));
}

#[test]
fn band_endpoints_are_zeros_of_rho() {
    let k = cos_p().scaled(0.2);
    let r = scan_s3(&k, (-100.0, 100.0), 512, &ScanOptions::default()).unwrap();
    let band = r.intervals.iter().find(|b| !b.degenerate).unwrap();
    let half = (band.right - band.left) / 4.0;
    for e in &r.endpoint_records {
        let x = e.value.re;
        // Bisect the oracle independently from a bracket around the reported point.
        let (mut a, mut b) = (x - half, x + half);
        let fa = rho_oracle(&k, a);
        assert!(fa * rho_oracle(&k, b) < 0.0);
        for _ in 0..40 {
            let m = 0.5 * (a + b);
            if rho_oracle(&k, m) * fa > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        assert!((0.5 * (a + b) - x).abs() < 1e-6, "{x} vs {}", 0.5 * (a + b));
    }
}

#[test]
fn coarse_windows_are_rejected() {
    let r = scan_s3(&Coefficients64::zero(), (-1e6, 1e6), 16, &ScanOptions::default());
    assert!(matches!(r, Err(Error::WindowTooCoarse { .. })));
}

#[test]
fn zero_labels_run_inward() {
    let l = label_real_zeros(&[-3.0, -1.0, 1.0, 3.0]);
    assert_eq!(l[0].0, 0);
    assert_eq!(l[3].0, 0);
    assert_eq!((l[1].0, l[2].0), (-1, 1));
}

#[test]
fn disk_geometry() {
    let r = unperturbed_ramification::<f64>(3);
    assert!((r - c(0.0, (6.0 * PI / 3f64.sqrt()).powi(3))).norm() < 1e-9);
    assert!(in_disk(r, 3) && !in_disk(r, 2) && !in_disk(r.conj(), 3) && in_disk(r.conj(), -3));
    assert!((disk_radius::<f64>() - PI / (2.0 * 3f64.sqrt())).abs() < 1e-15);
}

#[test]
fn free_ramifications_are_unperturbed() {
    let s = locate_ramifications(&Coefficients64::zero(), 4, &RamificationOptions::default()).unwrap();
    assert_eq!(s.records.len(), 16);
    for r in &s.records {
        let r0 = if r.n > 0 { unperturbed_ramification::<f64>(r.n) } else { unperturbed_ramification::<f64>(-r.n).conj() };
        assert!((r.value - r0).norm() / r0.norm() < 1e-6, "n = {}", r.n);
        assert!(r.disk_ok);
    }
    assert!(s.windings.iter().all(|w| (w.1 - 2.0).abs() < 1e-6));
}

#[test]
fn constant_p_ramifications() {
    let k = const_p(1.0);
    let s = locate_ramifications(&k, 8, &RamificationOptions::default()).unwrap();
    assert!(s.windings.iter().filter(|w| w.0 >= 3).all(|w| (w.1 - 2.0).abs() < 0.05));
    for r in s.records.iter().filter(|r| r.n >= 3) {
        // The closed-form trace is an independent check of ρ(r) = 0.
        let t = const_p_trace(1.0, r.value);
        let tc = const_p_trace(1.0, r.value.conj()).conj();
        assert!(discriminant_cubic(t, tc).rho.norm() < 1e-6 * discriminant_scale(t, tc), "n = {}", r.n);
        assert!(r.psi_residual.unwrap_or(0.0) < 1e-5);
    }
    let fit = validate_ramification_asymptotics(&s.records, &k);
    assert!(matches!(fit, Err(Error::InsufficientData(_))));
    let s = locate_ramifications(&k, 12, &RamificationOptions::default()).unwrap();
    let fit = validate_ramification_asymptotics(&s.records, &k).unwrap();
    let last = fit.rows.last().unwrap();
    assert!((last.d_plus - c(1.0, 0.0)).norm() < 0.05 && (last.d_minus - c(1.0, 0.0)).norm() < 0.05);
    assert!(fit.deviation_slope.unwrap() <= -1.7);
    assert!(fit.residual_decreasing);
}

#[test]
fn conjugation_symmetry_of_rho() {
    let k = mixed();
    for l in [c(30.0, 12.0), c(-500.0, 80.0), c(2e3, -700.0)] {
        let (a, _) = rho_complex(&k, l, &tight()).unwrap();
        let (b, s) = rho_complex(&k, l.conj(), &tight()).unwrap();
        assert!((a - b.conj()).norm() < 1e-9 * s);
    }
}

#[test]
fn first_order_split_of_the_first_pair() {
    // The pair in 𝒟₁ separates by d⁺ − d⁻ ≈ −2ε|p̂₁|/√3.
    let e = 0.02;
    let k = cos_p().scaled(e);
    let opts = RamificationOptions { trusted_from: 1, ..RamificationOptions::default() };
    let s = locate_ramifications(&k, 1, &opts).unwrap();
    let r0 = unperturbed_ramification::<f64>(1);
    let unit = c(0.0, -4.0 * PI / 3f64.sqrt());
    let d = |sgn: Sign| (s.records.iter().find(|r| r.n == 1 && r.sign == sgn).unwrap().value - r0) / unit;
    let split = (d(Sign::Plus) - d(Sign::Minus)).re / e;
    assert!((split + 2.0 / 3f64.sqrt()).abs() < 0.05, "{split}");

    // Independent route: the ε-series and the cubic discriminant.
    let rho_at = |shift: f64| {
        let lam = r0 + unit * (shift * e);
        let t = epsilon_terms(&cos_p(), lam, 4).unwrap().trace_sum(e);
        let tc = epsilon_terms(&cos_p(), lam.conj(), 4).unwrap().trace_sum(e).conj();
        discriminant_cubic(t, tc).rho.norm()
    };
    let s3 = 1.0 / 3f64.sqrt();
    assert!(rho_at(s3).max(rho_at(-s3)) * 100.0 < rho_at(1.0).min(rho_at(-1.0)));
}

#[test]
fn plot_grid_marks_bands() {
    let k = cos_p().scaled(0.2);
    let g = band_grid(&k, (-20.0, 20.0), 101, &tight()).unwrap();
    assert_eq!(g.len(), 101);
    for row in &g {
        assert_eq!(row.s3_rho, row.rho <= 0.0);
    }
}

#[test]
fn narrow_band_between_grid_points_is_found_once() {
    // The window is symmetric about the band, so two grid points tie for the minimum.
    let r = scan_s3(&cos_p().scaled(0.05), (-0.01, 0.01), 512, &ScanOptions::default()).unwrap();
    assert_eq!(r.count_m, 2);
    let b = r.intervals.iter().find(|b| !b.degenerate).unwrap();
    let w = 4.0 * (1.0 / (6.0 * PI * PI)).powf(1.5) * 0.05f64.powi(3);
    assert!(((b.right - b.left) / w - 1.0).abs() < 0.01);
}
