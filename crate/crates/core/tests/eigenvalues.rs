mod common;

use std::f64::consts::PI;

use common::*;
use proptest::prelude::*;
use thirdorder::eigenvalues::*;
use thirdorder::monodromy::{point, propagate};
use thirdorder::{Coefficients64, Error, IntegratorOptions64};

fn exact_list(kind: EigenKind, p0: f64, n_max: i64) -> EigenvalueList<f64> {
    let entries = (-n_max..=n_max)
        .filter(|&n| kind.admits(n))
        .map(|n| {
            let k = PI * n as f64;
            EigenvalueEntry { n, value: k.powi(3) - 2.0 * p0 * k, residual: 0.0, in_disk: true, bracket_failed: false }
        })
        .collect();
    EigenvalueList { kind, entries, central_n: kind.default_central(), central_count: 0 }
}

fn rel(a: num_complex::Complex64, b: num_complex::Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

#[test]
fn free_and_constant_p_eigenvalues_are_exact() {
    for p0 in [0.0, 1.0] {
        let k = if p0 == 0.0 { Coefficients64::zero() } else { const_p(p0) };
        for kind in [EigenKind::Periodic, EigenKind::Antiperiodic] {
            let list = find_eigenvalues(&k, kind, (-12, 12), &EigenOptions::default()).unwrap();
            let want = exact_list(kind, p0, 12);
            assert_eq!(list.entries.len(), want.entries.len());
            for (a, b) in list.entries.iter().zip(&want.entries) {
                assert_eq!(a.n, b.n);
                assert!((a.value - b.value).abs() <= 1e-9 * b.value.abs().max(1.0), "{kind:?} n = {}: {} vs {}", a.n, a.value, b.value);
                assert!(!a.bracket_failed);
                if a.n.abs() >= 3 {
                    assert!(a.in_disk);
                }
            }
            assert!(list.is_monotone());
            assert_eq!(list.complete_to(), if kind == EigenKind::Periodic { 12 } else { 11 });
        }
    }
}

#[test]
fn d_values_match_the_sine_and_cosine_products() {
    let zero = Coefficients64::zero();
    for x in [-700.0, -31.0, 0.0, 2.5, 90.0, 1234.5] {
        let l = c(x, 0.0);
        let t = propagate(&zero, &point(l), &IntegratorOptions64::with_tolerance(1e-12)).unwrap().trace;
        let (dp, dm) = d0(l);
        let scale = z0(l).exp().max(1.0);
        assert!((d_plus_minus(t, EigenKind::Periodic, l).unwrap() - dp).norm() / scale < 1e-9);
        assert!((d_plus_minus(t, EigenKind::Antiperiodic, l).unwrap() - dm).norm() / scale < 1e-9);
    }
    let l = c(PI.powi(3), 0.0);
    let t = propagate(&zero, &point(l), &IntegratorOptions64::with_tolerance(1e-12)).unwrap().trace;
    assert!(d_plus_minus(t, EigenKind::Antiperiodic, l).unwrap().norm() < 1e-9);
    assert!(matches!(d_plus_minus(t, EigenKind::Periodic, c(1.0, 1.0)), Err(Error::NonRealLambda(_))));
}

#[test]
fn hadamard_products_of_exact_spectra() {
    let (dp, dm) = d0(c(50.0, 0.0));
    let hp = hadamard_d(&exact_list(EigenKind::Periodic, 0.0, 40), 0.0, 50.0).unwrap();
    let hm = hadamard_d(&exact_list(EigenKind::Antiperiodic, 0.0, 40), 0.0, 50.0).unwrap();
    assert!(rel(hp.value, dp) < 1e-4 && rel(hm.value, dm) < 1e-4);
    assert_eq!(hp.n_trunc, 40);

    let l = c(10.0, 0.0);
    let t = const_p_trace(1.0, l);
    let h = hadamard_d(&exact_list(EigenKind::Antiperiodic, 1.0, 40), 1.0, 10.0).unwrap();
    assert!(rel(h.value, c(2.0 + 2.0 * t.re, 0.0)) < 1e-3);
}

#[test]
fn reconstruction_of_free_and_constant_p_traces() {
    let per = exact_list(EigenKind::Periodic, 0.0, 40);
    let anti = exact_list(EigenKind::Antiperiodic, 0.0, 40);
    assert!(rel(reconstruct_t(&per, &anti, 0.0, 20.0).unwrap(), t0(c(20.0, 0.0))) < 1e-3);
    assert_eq!(reconstruct_t(&per, &anti, 0.0, 0.0).unwrap().im, 0.0);

    let per = exact_list(EigenKind::Periodic, 1.0, 40);
    let anti = exact_list(EigenKind::Antiperiodic, 1.0, 40);
    assert!(rel(reconstruct_t(&per, &anti, 1.0, -15.0).unwrap(), const_p_trace(1.0, c(-15.0, 0.0))) < 1e-3);
    assert!(reconstruct_t(&anti, &per, 1.0, 1.0).is_err());
}

#[test]
fn exact_hits_are_flagged() {
    let per = exact_list(EigenKind::Periodic, 0.0, 10);
    let v = hadamard_d(&per, 0.0, (4.0 * PI).powi(3)).unwrap();
    assert!(v.exact_zero && v.value.norm() == 0.0);
    let mut broken = per.clone();
    broken.entries.retain(|e| e.n != 0);
    assert!(matches!(hadamard_d(&broken, 0.0, 1.0), Err(Error::InsufficientData(_))));
}

#[test]
fn central_window_size_does_not_change_the_spectrum() {
    let k = cos_p();
    for (kind, sizes) in [(EigenKind::Periodic, [3, 5, 7]), (EigenKind::Antiperiodic, [2, 4, 6])] {
        let lists: Vec<_> = sizes
            .iter()
            .map(|&n| find_eigenvalues(&k, kind, (-8, 8), &EigenOptions { central_n: Some(n), ..EigenOptions::default() }).unwrap())
            .collect();
        for l in &lists[1..] {
            for (a, b) in l.entries.iter().zip(&lists[0].entries) {
                assert!((a.value - b.value).abs() <= 1e-9 * b.value.abs().max(1.0), "{kind:?} n = {}", a.n);
            }
        }
        assert!(lists.iter().all(|l| l.is_monotone()));
    }
    let bad = find_eigenvalues(&k, EigenKind::Periodic, (-8, 8), &EigenOptions { central_n: Some(4), ..EigenOptions::default() });
    assert!(bad.is_err());
}

#[test]
fn cosine_p_asymptotics() {
    let k = cos_p();
    let list = find_eigenvalues(&k, EigenKind::Periodic, (-16, 16), &EigenOptions::default()).unwrap();
    assert!(list.entries.iter().filter(|e| e.n.abs() >= 3).all(|e| e.in_disk));
    let fit = validate_eigenvalue_asymptotics(&list, &k).unwrap();
    assert!(fit.e_decreasing, "{} vs {}", fit.e_tail, fit.e_reference);
    assert!(fit.deviation_slope.unwrap() < -1.7);

    let short = find_eigenvalues(&k, EigenKind::Antiperiodic, (-7, 7), &EigenOptions::default()).unwrap();
    assert!(matches!(validate_eigenvalue_asymptotics(&short, &k), Err(Error::InsufficientData(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hadamard_matches_free_d(x in -400.0..400.0f64) {
        let (dp, dm) = d0(c(x, 0.0));
        let hp = hadamard_d(&exact_list(EigenKind::Periodic, 0.0, 60), 0.0, x).unwrap();
        let hm = hadamard_d(&exact_list(EigenKind::Antiperiodic, 0.0, 60), 0.0, x).unwrap();
        prop_assert!(rel(hp.value, dp) < 1e-6);
        prop_assert!(rel(hm.value, dm) < 1e-6);
    }
}
