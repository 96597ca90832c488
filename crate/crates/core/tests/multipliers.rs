mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use thirdorder::monodromy::{point, propagate, trace_pair};
use thirdorder::multipliers::*;
use thirdorder::{Coefficients64, IntegratorOptions64};

fn tight() -> IntegratorOptions64 {
    IntegratorOptions64::with_tolerance(1e-12)
}

fn closest_match(a: &[C64; 3], b: &[C64; 3]) -> f64 {
    // Greedy set distance relative to magnitude.
    let mut worst: f64 = 0.0;
    for x in a {
        let d = b.iter().map(|y| (x - y).norm() / x.norm().max(y.norm())).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    worst
}

#[test]
fn triple_root_at_zero() {
    let cubic = characteristic_cubic(c(3.0, 0.0), c(3.0, 0.0));
    assert_eq!(cubic, [c(-1.0, 0.0), c(3.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]);
    let tr = solve_multipliers(c(3.0, 0.0), c(3.0, 0.0), &point(c(0.0, 0.0)));
    for t in tr.tau {
        assert!((t - c(1.0, 0.0)).norm() < 1e-4);
    }
    assert!(tr.labels.ambiguous);
    assert!(discriminant(&tr).rho.norm() < 1e-12);
}

#[test]
fn unperturbed_roots_are_labeled_exponentials() {
    let l = c((6.0 * PI).powi(3), 0.0);
    let sp = point(l);
    let t = propagate(&Coefficients64::zero(), &sp, &tight()).unwrap().trace;
    let tr = solve_multipliers(t, t.conj(), &sp);
    let iz = c(0.0, 6.0 * PI);
    let want = [c(1.0, 0.0), (iz * omega_k(1)).exp(), (iz * omega_k(2)).exp()];
    for j in 0..3 {
        assert!((tr.tau[j] - want[j]).norm() / want[j].norm() < 1e-8, "τ{} = {}", j + 1, tr.tau[j]);
    }
    assert!(!tr.labels.ambiguous);
}

#[test]
fn constant_p_multipliers() {
    for l in [1e3, 3e4, 2e5] {
        let lam = c(l, 0.0);
        let sp = point(lam);
        let t = propagate(&const_p(1.0), &sp, &tight()).unwrap().trace;
        let tr = solve_multipliers(t, t.conj(), &sp);
        let want = k_roots(1.0, lam).map(|k| (c(0.0, 1.0) * k).exp());
        assert!(closest_match(&tr.tau, &want) < 1e-7, "λ = {l}");
    }
}

#[test]
fn unperturbed_discriminant_matches_sinh_product() {
    let zero = Coefficients64::zero();
    for k in 0..40 {
        let l = -1e4 + 2e4 * (k as f64 + 0.3) / 40.0;
        let lam = c(l, 0.0);
        let sp = point(lam);
        let t = propagate(&zero, &sp, &tight()).unwrap().trace;
        let rho = discriminant(&solve_multipliers(t, t.conj(), &sp)).rho;
        let want = rho0(lam);
        assert!((rho - want).norm() / want.norm().max(1.0) < 1e-7, "λ = {l}");
    }
}

#[test]
fn closed_form_discriminants() {
    let real = c(1.0, 0.0);
    assert_eq!(discriminant_from_trace(c(3.0, 0.0), real).unwrap().rho, c(0.0, 0.0));
    assert_eq!(discriminant_from_trace(c(0.0, 0.0), real).unwrap().rho, c(-27.0, 0.0));
    assert_eq!(discriminant_ab(c(3.0, 0.0), real).unwrap().rho, c(0.0, 0.0));
    assert_eq!(discriminant_ab(c(0.0, 0.0), real).unwrap().rho, c(-27.0, 0.0));
    assert_eq!(discriminant_ab(c(3.0, 1.0), real).unwrap().rho, c(109.0, 0.0));
    assert_eq!(rho_ab(-3.0, 0.0), -27.0);
    assert!(discriminant_from_trace(c(3.0, 0.0), c(1.0, 0.1)).is_err());
    assert!(discriminant_ab(c(3.0, 0.0), c(1.0, -0.1)).is_err());
}

#[test]
fn trace_identity_at_hundred() {
    let lam = c(100.0, 0.0);
    let t = propagate(&Coefficients64::zero(), &point(lam), &tight()).unwrap().trace;
    let rho = discriminant_from_trace(t, lam).unwrap().rho;
    let want = rho0(lam);
    assert!((rho - want).norm() / want.norm() < 1e-8);
}

#[test]
fn psi_at_unperturbed_ramification() {
    for n in [2, 5] {
        let r = c(0.0, (2.0 * PI * n as f64 / 3f64.sqrt()).powi(3));
        let z = cube_root(r);
        let z_conj = cube_root(r.conj());
        let tau3 = (c(0.0, 1.0) * z * omega_k(2)).exp();
        let tau3_bar = (c(0.0, 1.0) * z_conj * omega_k(2)).exp();
        let v = psi(&point(r), tau3, tau3_bar);
        assert!(v.norm() < 1e-9 * tau3.norm(), "n = {n}: {}", v.norm() / tau3.norm());
    }
}

#[test]
fn psi_is_large_away_from_ramifications() {
    let lam = c((10.0 * PI).powi(3), 0.0);
    let sp = point(lam);
    let t = propagate(&const_p(1.0), &sp, &tight()).unwrap().trace;
    let tr = solve_multipliers(t, t.conj(), &sp);
    let v = psi(&sp, tr.tau[2], tr.tau[2]);
    assert!(v.norm() > 1e-2 * tr.tau[2].norm());
}

#[test]
fn routes_agree_on_real_line() {
    for k in [Coefficients64::zero(), const_p(1.0), cos_p()] {
        for j in 0..100 {
            let l = -3000.0 + 6000.0 * (j as f64 + 0.5) / 100.0;
            let lam = c(l, 0.0);
            let sp = point(lam);
            let t = propagate(&k, &sp, &tight()).unwrap().trace;
            let tr = solve_multipliers(t, t.conj(), &sp);
            let d = discriminant_routes(&tr, t, lam).unwrap();
            assert!(d.cross_residual < 1e-6, "λ = {l}: {:e}", d.cross_residual);
        }
    }
}

#[test]
fn sign_law_on_real_line() {
    let k = cos_p_cos_q();
    for j in 0..400 {
        let l = -200.0 + 400.0 * (j as f64 + 0.5) / 400.0;
        let lam = c(l, 0.0);
        let sp = point(lam);
        let t = propagate(&k, &sp, &tight()).unwrap().trace;
        let tr = solve_multipliers(t, t.conj(), &sp);
        let rho = discriminant_ab(t, lam).unwrap().rho.re;
        match tr.unimodular_count(1e-8) {
            3 => assert!(rho <= 1e-6, "λ = {l}"),
            1 => assert!(rho >= -1e-6, "λ = {l}"),
            _ => {}
        }
    }
}

#[test]
fn labels_are_stable_off_the_disks() {
    let k = mixed();
    for arg in [PI / 12.0, 0.4, -0.3] {
        for r in [10.0, 25.0, 60.0] {
            let lam = C64::from_polar(r, arg).powi(3);
            let (m, tc) = trace_pair(&k, lam, &tight()).unwrap();
            let tr = solve_multipliers(m.trace, tc, &point(lam));
            assert!(tr.labels.cost * 2.0 <= tr.labels.runner_up, "z = {r}e^(i{arg})");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn vieta_holds(r in -1.0..4.0f64, th in 0.0..6.28f64, which in 0usize..4) {
        let k = [Coefficients64::zero(), const_p(1.0), cos_p_cos_q(), mixed()][which].clone();
        let lam = C64::from_polar(10f64.powf(r), th);
        let (m, tc) = trace_pair(&k, lam, &tight()).unwrap();
        let tr = solve_multipliers(m.trace, tc, &point(lam));
        for v in tr.vieta_residuals(m.trace, tc) {
            prop_assert!(v < 1e-8);
        }
    }

    #[test]
    fn cubic_and_product_forms_agree(r in -1.0..3.0f64, th in 0.0..6.28f64) {
        let lam = C64::from_polar(10f64.powf(r), th);
        let (m, tc) = trace_pair(&mixed(), lam, &tight()).unwrap();
        let tr = solve_multipliers(m.trace, tc, &point(lam));
        let a = discriminant(&tr).rho;
        let b = discriminant_cubic(m.trace, tc).rho;
        prop_assert!((a - b).norm() <= 1e-9 * discriminant_scale(m.trace, tc));
    }
}
