//! Periodic and antiperiodic eigenvalues as real zeros of D(±1, λ), their
//! asymptotics, and the Hadamard-product reconstruction of D(±1, ·) and T.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::Coefficients;
use crate::error::{Error, Result};
use crate::monodromy::{propagate, SpectralPoint};
use crate::ode::IntegratorOptions;
use crate::roots::{brent, golden_min};
use crate::scalar::{c, cr, i_unit, Real, C};
use crate::spectrum_scan::loglog_slope;

/// Boundary condition y(x + 1) = σ y(x): σ = +1 periodic, σ = −1 antiperiodic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenKind {
    Periodic,
    Antiperiodic,
}

impl EigenKind {
    pub fn sigma(self) -> i32 {
        match self {
            EigenKind::Periodic => 1,
            EigenKind::Antiperiodic => -1,
        }
    }

    /// Whether `n` is an admissible label (even for periodic, odd otherwise).
    pub fn admits(self, n: i64) -> bool {
        (n.rem_euclid(2) == 0) == (self == EigenKind::Periodic)
    }

    /// Default size N of the central window {|λ| < (πN)³}.
    pub fn default_central(self) -> i64 {
        match self {
            EigenKind::Periodic => 5,
            EigenKind::Antiperiodic => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EigenKind::Periodic => "periodic",
            EigenKind::Antiperiodic => "antiperiodic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueEntry<T> {
    pub n: i64,
    /// NaN when the bracket search failed.
    pub value: T,
    /// |D(σ, value)| / max(1, e^{z₀}).
    pub residual: T,
    /// The real cube root of `value` lies within π/2 of πn.
    pub in_disk: bool,
    pub bracket_failed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueList<T> {
    pub kind: EigenKind,
    /// Sorted by n.
    pub entries: Vec<EigenvalueEntry<T>>,
    /// N of the central window and the number of zeros found there.
    pub central_n: i64,
    pub central_count: usize,
}

impl<T: Real> EigenvalueList<T> {
    pub fn get(&self, n: i64) -> Option<T> {
        self.entries.iter().find(|e| e.n == n).map(|e| e.value)
    }

    /// Largest M such that every admissible |n| ≤ M is present with a finite value.
    pub fn complete_to(&self) -> i64 {
        let have: BTreeMap<i64, T> = self.entries.iter().filter(|e| e.value.is_finite()).map(|e| (e.n, e.value)).collect();
        let mut m = if self.kind == EigenKind::Periodic { 0 } else { 1 };
        if self.kind == EigenKind::Periodic && !have.contains_key(&0) {
            return -1;
        }
        while have.contains_key(&(m + 2)) && have.contains_key(&(-(m + 2))) {
            m += 2;
        }
        if self.kind == EigenKind::Antiperiodic && !(have.contains_key(&1) && have.contains_key(&-1)) {
            return -1;
        }
        m
    }

    /// Entries are nondecreasing in value along increasing n.
    pub fn is_monotone(&self) -> bool {
        self.entries.windows(2).all(|w| !(w[1].value < w[0].value))
    }
}

/// Controls for [`find_eigenvalues`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions<T> {
    pub integrator: IntegratorOptions<T>,
    /// Size N of the central window; must be odd for periodic and even for
    /// antiperiodic. `None` picks [`EigenKind::default_central`].
    pub central_n: Option<i64>,
    /// Grid step of the central scan in s = λ^{1/3}.
    pub grid_step: T,
    /// Roots are refined to `xtol_rel · max(1, |s|)` in s.
    pub xtol_rel: T,
    /// A local minimum of |D|/max(1, e^{z₀}) below this is a double zero.
    pub double_zero_tol: T,
}

impl<T: Real> Default for EigenOptions<T> {
    fn default() -> Self {
        EigenOptions {
            integrator: IntegratorOptions::with_tolerance(T::lit(1e-12)),
            central_n: None,
            grid_step: T::lit(0.05),
            xtol_rel: T::lit(1e-14),
            double_zero_tol: T::lit(1e-8),
        }
    }
}

/// D(1, λ) = 2i Im T(λ) and D(−1, λ) = 2 + 2 Re T(λ) for real λ.
pub fn d_plus_minus<T: Real>(t_val: C<T>, kind: EigenKind, lambda: C<T>) -> Result<C<T>> {
    if lambda.im != T::zero() {
        return Err(Error::NonRealLambda(lambda.im.as_f64()));
    }
    let two = T::lit(2.0);
    Ok(match kind {
        EigenKind::Periodic => c(T::zero(), two * t_val.im),
        EigenKind::Antiperiodic => cr(two + two * t_val.re),
    })
}

/// D(σ, λ)/(2·max(1, e^{z₀})) made real (the i-factor dropped for σ = +1).
fn d_normalized<T: Real>(coef: &Coefficients<T>, kind: EigenKind, lambda: T, opts: &IntegratorOptions<T>) -> Result<T> {
    let sp = SpectralPoint::real(lambda);
    let shift = sp.z0.max(T::zero());
    let t = propagate(coef, &sp, opts)?.trace_shifted(shift);
    Ok(match kind {
        EigenKind::Periodic => t.im,
        EigenKind::Antiperiodic => t.re + (-shift).exp(),
    })
}

fn real_cbrt<T: Real>(x: T) -> T {
    x.signum() * x.abs().cbrt()
}

fn in_k_disk<T: Real>(lambda: T, n: i64) -> bool {
    (real_cbrt(lambda) - T::PI() * T::from_int(n)).abs() < T::FRAC_PI_2()
}

/// Zeros of D(σ, ·) in s = λ^{1/3} ∈ (lo, hi), with multiplicity.
fn scan_zeros<T: Real>(coef: &Coefficients<T>, kind: EigenKind, lo: T, hi: T, opts: &EigenOptions<T>) -> Result<Vec<(T, usize)>> {
    let io = opts.integrator;
    let count = ((hi - lo) / opts.grid_step).ceil().to_usize().unwrap_or(2).max(2);
    let step = (hi - lo) / T::from_usize(count).unwrap();
    let xs: Vec<T> = (1..count).map(|k| lo + step * T::from_usize(k).unwrap()).collect();
    let f = |s: T| d_normalized(coef, kind, s * s * s, &io);
    let fs: Vec<T> = xs.par_iter().map(|&s| f(s)).collect::<Result<_>>()?;
    let g = |s: T| f(s).unwrap_or(T::nan());
    let xtol = |s: T| opts.xtol_rel * T::one().max(s.abs());

    let mut zeros: Vec<(T, usize)> = Vec::new();
    for i in 0..xs.len() {
        if fs[i] == T::zero() {
            zeros.push((xs[i], 1));
        } else if i + 1 < xs.len() && fs[i + 1] != T::zero() && (fs[i] < T::zero()) != (fs[i + 1] < T::zero()) {
            zeros.push((brent(g, xs[i], xs[i + 1], fs[i], fs[i + 1], xtol(xs[i]), 200).0, 1));
        }
    }
    // Same-sign local minima of |D| hide a double zero or a close pair.
    let mins: Vec<usize> = (1..xs.len().saturating_sub(1))
        .filter(|&i| {
            let (a, b, d) = (fs[i - 1], fs[i], fs[i + 1]);
            let same = (a > T::zero()) == (b > T::zero()) && (b > T::zero()) == (d > T::zero()) && b != T::zero();
            same && b.abs() <= a.abs() && b.abs() <= d.abs()
        })
        .collect();
    let refined: Vec<(usize, T, T)> = mins
        .par_iter()
        .map(|&i| {
            let sgn = fs[i].signum();
            let (x, v) = golden_min(|s| sgn * g(s), xs[i - 1], xs[i + 1], xtol(xs[i]), 400);
            (i, x, v * sgn)
        })
        .collect();
    for (i, x, v) in refined {
        if v.signum() != fs[i].signum() && v != T::zero() {
            zeros.push((brent(g, xs[i - 1], x, fs[i - 1], v, xtol(x), 200).0, 1));
            zeros.push((brent(g, x, xs[i + 1], v, fs[i + 1], xtol(x), 200).0, 1));
        } else if T::lit(2.0) * v.abs() < opts.double_zero_tol {
            zeros.push((x, 2));
        }
    }
    zeros.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    Ok(zeros)
}

fn entry<T: Real>(coef: &Coefficients<T>, kind: EigenKind, n: i64, lambda: T, io: &IntegratorOptions<T>) -> Result<EigenvalueEntry<T>> {
    let r = d_normalized(coef, kind, lambda, io)?;
    Ok(EigenvalueEntry { n, value: lambda, residual: T::lit(2.0) * r.abs(), in_disk: in_k_disk(lambda, n), bracket_failed: false })
}

/// Eigenvalues λₙ with n in `n_range` (inclusive) and of the parity of `kind`.
///
/// The central window |λ| < (πN)³ is scanned on a grid uniform in λ^{1/3} and
/// its zero count checked against N. Outside it each λₙ is bracketed in the
/// real trace of 𝒦ₙ, |λ^{1/3} − πn| < π/2, and refined by Brent's method.
pub fn find_eigenvalues<T: Real>(coef: &Coefficients<T>, kind: EigenKind, n_range: (i64, i64), opts: &EigenOptions<T>) -> Result<EigenvalueList<T>> {
    let big_n = opts.central_n.unwrap_or(kind.default_central());
    if big_n < 1 || kind.admits(big_n) {
        return Err(Error::InvalidArgument(format!("central window size {big_n} has the wrong parity for {} eigenvalues", kind.name())));
    }
    if n_range.0 > n_range.1 {
        return Err(Error::InvalidArgument(format!("empty index range {}..={}", n_range.0, n_range.1)));
    }
    let io = opts.integrator;
    let edge = T::PI() * T::from_int(big_n);
    let zeros = scan_zeros(coef, kind, -edge, edge, opts)?;
    let central_count: usize = zeros.iter().map(|z| z.1).sum();
    if central_count as i64 != big_n {
        return Err(Error::CountMismatch {
            what: format!("{} eigenvalues in |λ| < (π·{big_n})³", kind.name()),
            found: central_count as f64,
            expected: big_n as f64,
        });
    }
    let mut central = Vec::new();
    let mut n = 1 - big_n;
    for &(s, m) in &zeros {
        for _ in 0..m {
            central.push((n, s * s * s));
            n += 2;
        }
    }

    let mut entries: Vec<EigenvalueEntry<T>> = central
        .par_iter()
        .filter(|(n, _)| *n >= n_range.0 && *n <= n_range.1)
        .map(|&(n, l)| entry(coef, kind, n, l, &io))
        .collect::<Result<_>>()?;

    let outer: Vec<i64> = (n_range.0..=n_range.1).filter(|&n| kind.admits(n) && n.abs() > big_n).collect();
    let found: Vec<EigenvalueEntry<T>> = outer
        .par_iter()
        .map(|&n| {
            let mid = T::PI() * T::from_int(n);
            let (a, b) = (mid - T::FRAC_PI_2(), mid + T::FRAC_PI_2());
            let f = |s: T| d_normalized(coef, kind, s * s * s, &io);
            let (fa, fb) = (f(a)?, f(b)?);
            if fa == T::zero() || fb == T::zero() || (fa < T::zero()) == (fb < T::zero()) {
                return Ok(EigenvalueEntry { n, value: T::nan(), residual: T::nan(), in_disk: false, bracket_failed: true });
            }
            let xtol = opts.xtol_rel * mid.abs();
            let (s, _) = brent(|s| f(s).unwrap_or(T::nan()), a, b, fa, fb, xtol, 200);
            entry(coef, kind, n, s * s * s, &io)
        })
        .collect::<Result<_>>()?;
    entries.extend(found);
    entries.sort_by_key(|e| e.n);
    Ok(EigenvalueList { kind, entries, central_n: big_n, central_count })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenFitRow<T> {
    pub n: i64,
    pub value: T,
    /// (λₙ − (πn)³ + 2p̂₀πn)·n.
    pub e: T,
    /// |λₙ/(πn)³ − 1|, zero for n = 0.
    pub relative_deviation: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenFit<T> {
    pub rows: Vec<EigenFitRow<T>>,
    /// max |eₙ| over 3 ≤ |n| ≤ 5.
    pub e_reference: T,
    /// max |eₙ| over 8 ≤ |n| ≤ 16.
    pub e_tail: T,
    /// `e_tail` does not exceed `e_reference`, or both are at rounding level.
    pub e_decreasing: bool,
    pub max_abs_e: T,
    /// Least-squares slope of log(relative deviation) against log |n| over
    /// |n| ≥ 2, or `None` when the deviations are at rounding level.
    pub deviation_slope: Option<T>,
}

/// Checks λₙ = (πn)³ − 2p̂₀πn + o(1)/n and λₙ = (πn)³(1 + O(n⁻²)).
pub fn validate_eigenvalue_asymptotics<T: Real>(list: &EigenvalueList<T>, coef: &Coefficients<T>) -> Result<EigenFit<T>> {
    let reach = list.entries.iter().filter(|e| e.value.is_finite()).map(|e| e.n.abs()).max().unwrap_or(0);
    let need = if list.kind.admits(12) { 12 } else { 11 };
    if reach < need {
        return Err(Error::InsufficientData(format!("{} eigenvalues cover |n| ≤ {reach}, need {need}", list.kind.name())));
    }
    let p0 = coef.p0();
    let rows: Vec<EigenFitRow<T>> = list
        .entries
        .iter()
        .filter(|e| e.value.is_finite())
        .map(|e| {
            let k = T::PI() * T::from_int(e.n);
            let base = k * k * k;
            let err = (e.value - base + T::lit(2.0) * p0 * k) * T::from_int(e.n);
            let dev = if e.n == 0 { T::zero() } else { (e.value / base - T::one()).abs() };
            EigenFitRow { n: e.n, value: e.value, e: err, relative_deviation: dev }
        })
        .collect();
    let band = |lo: i64, hi: i64| rows.iter().filter(|r| (lo..=hi).contains(&r.n.abs())).fold(T::zero(), |a, r| a.max(r.e.abs()));
    let e_reference = band(3, 5);
    let e_tail = band(8, 16);
    let max_abs_e = rows.iter().fold(T::zero(), |a, r| a.max(r.e.abs()));
    // Root-finding noise in eₙ grows like |n|⁴ times the relative tolerance.
    let floor = T::lit(1e-12) * (T::PI() * T::lit(16.0)).powi(3) * T::lit(16.0);
    let e_decreasing = e_tail <= e_reference.max(floor);
    let noise = T::lit(1e-11);
    let tail: Vec<&EigenFitRow<T>> = rows.iter().filter(|r| r.n.abs() >= 2).collect();
    let pts: Vec<(f64, f64)> = tail.iter().filter(|r| r.relative_deviation > noise).map(|r| (r.n.abs() as f64, r.relative_deviation.as_f64())).collect();
    let deviation_slope = if pts.len() * 2 >= tail.len() { loglog_slope(&pts).map(T::lit) } else { None };
    Ok(EigenFit { rows, e_reference, e_tail, e_decreasing, max_abs_e, deviation_slope })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HadamardValue<T> {
    pub value: C<T>,
    /// |log of the tail factor| contributed by the surrogate eigenvalues.
    pub truncation_estimate: T,
    /// λ coincides with a supplied eigenvalue; `value` is exactly zero.
    pub exact_zero: bool,
    /// Largest |n| taken from the supplied list.
    pub n_trunc: i64,
}

const TAIL_TERMS: i64 = 20_000;

/// D(σ, λ) from the eigenvalues by the Hadamard product, pairing n with −n.
/// Indices beyond the complete part of the list use λₙ ≈ (πn)³ − 2·tail_p0·πn.
pub fn hadamard_d<T: Real>(list: &EigenvalueList<T>, tail_p0: T, lambda: T) -> Result<HadamardValue<T>> {
    let m = list.complete_to();
    if m < 0 {
        return Err(Error::InsufficientData(format!("{} list lacks its central eigenvalues", list.kind.name())));
    }
    let get = |n: i64| list.get(n).unwrap();
    let hit = |v: T| (v - lambda).abs() <= T::lit(1e-12) * T::one().max(v.abs());
    let first = if list.kind == EigenKind::Periodic { 2 } else { 1 };
    let mut used: Vec<T> = (first..=m).step_by(2).flat_map(|k| [get(k), get(-k)]).collect();
    if list.kind == EigenKind::Periodic {
        used.push(get(0));
    }
    if used.iter().any(|&v| hit(v)) {
        return Ok(HadamardValue { value: cr(T::zero()), truncation_estimate: T::zero(), exact_zero: true, n_trunc: m });
    }

    let mut value = match list.kind {
        EigenKind::Periodic => i_unit::<T>() * (get(0) - lambda),
        EigenKind::Antiperiodic => cr(T::lit(8.0)),
    };
    for k in (first..=m).step_by(2) {
        let b = T::PI() * T::from_int(k);
        let b3 = b * b * b;
        value = value * ((get(k) - lambda) / b3) * ((get(-k) - lambda) / -b3);
    }

    // Surrogate pairs: ((A² − λ²)/(πk)⁶ with A = (πk)³ − 2p̂₀πk.
    let mut log_tail = T::zero();
    let mut sign = T::one();
    let last = m + 2 * TAIL_TERMS;
    let mut k = m + 2;
    while k <= last {
        let b = T::PI() * T::from_int(k);
        let u = T::one() - T::lit(2.0) * tail_p0 / (b * b);
        let w = lambda / (b * b * b * u);
        let f = u * u * (T::one() - w * w);
        sign = sign * f.signum();
        log_tail += f.abs().ln();
        k += 2;
    }
    // Σ over k > last in steps of 2 of ln(1 − 2p̂₀/(πk)²)² ≈ −2p̂₀/(π²(last + 1)).
    log_tail -= T::lit(2.0) * tail_p0 / (T::PI() * T::PI() * T::from_int(last + 1));
    value = value * (sign * log_tail.exp());
    Ok(HadamardValue { value, truncation_estimate: log_tail.abs(), exact_zero: false, n_trunc: m })
}

/// T(λ) for real λ from both spectra: Im T = D(1, λ)/(2i), Re T = D(−1, λ)/2 − 1.
pub fn reconstruct_t<T: Real>(periodic: &EigenvalueList<T>, antiperiodic: &EigenvalueList<T>, tail_p0: T, lambda: T) -> Result<C<T>> {
    if periodic.kind != EigenKind::Periodic || antiperiodic.kind != EigenKind::Antiperiodic {
        return Err(Error::InvalidArgument("expected one periodic and one antiperiodic list".into()));
    }
    let dp = hadamard_d(periodic, tail_p0, lambda)?.value;
    let dm = hadamard_d(antiperiodic, tail_p0, lambda)?.value;
    let half = T::lit(0.5);
    Ok(c(dm.re * half - T::one(), dp.im * half))
}

/// max over the antiperiodic eigenvalues λ* of |Re T(λ*) + 1| for the
/// reconstructed T.
pub fn antiperiodic_consistency<T: Real>(periodic: &EigenvalueList<T>, antiperiodic: &EigenvalueList<T>, tail_p0: T) -> Result<T> {
    let mut worst = T::zero();
    for e in antiperiodic.entries.iter().filter(|e| e.value.is_finite()) {
        let t = reconstruct_t(periodic, antiperiodic, tail_p0, e.value)?;
        worst = worst.max((t.re + T::one()).abs());
    }
    Ok(worst)
}
