//! Small coupling: the ε-expansion M(1, λ, ε) = Σ εⁿMₙ(1, λ) for the
//! coefficients (εp, εq), the invariant h and the multiplicity-3 band that
//! opens near λ = 0 with width 4h^{3/2}ε³.

use serde::{Deserialize, Serialize};

use crate::coeffs::Coefficients;
use crate::error::{Error, Result};
use crate::linalg::Mat3;
use crate::monodromy::{p_matrix, principal_cbrt, q_matrix};
use crate::ode::IntegratorOptions;
use crate::quadrature::GaussLegendre;
use crate::scalar::{cr, i_unit, omega_pow, Real, C};
use crate::spectrum_scan::{loglog_slope, scan_s3, BandReport, ScanOptions};

/// Highest supported order of the ε-expansion.
pub const MAX_ORDER: usize = 4;

const NODES: usize = 96;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSeries<T> {
    pub lambda: C<T>,
    /// M₀(1, λ), …, M_N(1, λ).
    pub terms: Vec<Mat3<T>>,
    /// Tₙ = Tr Mₙ(1, λ).
    pub traces: Vec<C<T>>,
    /// 1/κ with κ = ∫|p| + ∫|q|; the remainder after N terms is bounded by
    /// (|ε|κ)^{N+1} e^{z₀ + |ε|κ}.
    pub epsilon_radius_hint: T,
}

impl<T: Real> EpsilonSeries<T> {
    /// Σ εⁿ Tₙ.
    pub fn trace_sum(&self, eps: T) -> C<T> {
        self.traces.iter().rev().fold(cr(T::zero()), |acc, &t| acc * eps + t)
    }

    /// Σ εⁿ Mₙ.
    pub fn matrix_sum(&self, eps: T) -> Mat3<T> {
        self.terms.iter().rev().fold(Mat3::zero(), |acc, m| acc.scale_real(eps) + *m)
    }
}

/// e^{tP(λ)}: spectral form with eigenvalues izωʲ, or the Taylor series for
/// |tλ| < 1e−6 where the eigenvalues coalesce.
pub fn exp_tp<T: Real>(lambda: C<T>, t: T) -> Mat3<T> {
    let p = p_matrix(lambda);
    if (lambda * t).norm() < T::lit(1e-6) {
        let tp = p.scale_real(t);
        let mut term = Mat3::identity();
        let mut sum = Mat3::identity();
        for k in 1..=20 {
            term = (term * tp).scale_real(T::from_usize(k).unwrap().recip());
            sum += term;
        }
        return sum;
    }
    let z = principal_cbrt(lambda);
    let mu: [C<T>; 3] = std::array::from_fn(|j| i_unit::<T>() * z * omega_pow::<T>(j as i64));
    let id = Mat3::identity();
    let mut out = Mat3::zero();
    for j in 0..3 {
        let (k, l) = ((j + 1) % 3, (j + 2) % 3);
        let num = (p - id.scale(mu[k])) * (p - id.scale(mu[l]));
        let den = (mu[j] - mu[k]) * (mu[j] - mu[l]);
        out += num.scale((mu[j] * t).exp() / den);
    }
    out
}

/// M₀(1, λ), …, M_N(1, λ) from Mₙ(t) = ∫₀ᵗ M₀(t − s)Q(s)Mₙ₋₁(s) ds, evaluated
/// as Mₙ(t) = e^{tP} ∫₀ᵗ e^{−sP}Q(s)Mₙ₋₁(s) ds with a 96-node Gauss–Legendre
/// integration matrix.
pub fn epsilon_terms<T: Real>(coef: &Coefficients<T>, lambda: C<T>, order: usize) -> Result<EpsilonSeries<T>> {
    if order > MAX_ORDER {
        return Err(Error::UnsupportedOrder { requested: order, max: MAX_ORDER });
    }
    let gl = GaussLegendre::<T>::new(NODES);
    let s = gl.integration_matrix();
    let xs = gl.unit_nodes();
    let ws: Vec<T> = gl.weights.iter().map(|&w| w * T::lit(0.5)).collect();
    let fwd: Vec<Mat3<T>> = xs.iter().map(|&t| exp_tp(lambda, t)).collect();
    let back: Vec<Mat3<T>> = xs.iter().map(|&t| exp_tp(lambda, -t)).collect();
    let qs: Vec<Mat3<T>> = xs
        .iter()
        .map(|&t| {
            let (p, q) = coef.eval_pq(t);
            q_matrix(p, q)
        })
        .collect();
    let e1 = exp_tp(lambda, T::one());

    let mut terms = vec![e1];
    let mut prev = fwd.clone();
    for _ in 0..order {
        let w: Vec<Mat3<T>> = (0..NODES).map(|j| back[j] * qs[j] * prev[j]).collect();
        let total = (0..NODES).fold(Mat3::zero(), |acc, j| acc + w[j].scale_real(ws[j]));
        terms.push(e1 * total);
        prev = (0..NODES)
            .map(|i| {
                let integral = (0..NODES).fold(Mat3::zero(), |acc, j| acc + w[j].scale_real(s[i][j]));
                fwd[i] * integral
            })
            .collect();
    }
    let traces = terms.iter().map(|m| m.trace()).collect();
    let kappa = coef.kappa(256).value;
    let epsilon_radius_hint = if kappa > T::zero() { kappa.recip() } else { T::infinity() };
    Ok(EpsilonSeries { lambda, terms, traces, epsilon_radius_hint })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPrediction<T> {
    pub epsilon: T,
    pub h: T,
    /// b₂ = Im T₂(0), b₃ = Im T₃(0).
    pub b2: T,
    pub b3: T,
    /// Band center r(ε) = 2b₂ε² + 2b₃ε³.
    pub center: T,
    /// r(ε) ∓ 2h^{3/2}|ε|³; equal to `center` unless h > 0.
    pub r_minus: T,
    pub r_plus: T,
    /// 4h^{3/2}|ε|³, zero unless h > 0.
    pub width_leading: T,
    /// h < 0: no multiplicity-3 spectrum near 0.
    pub empty: bool,
    /// h = 0: the leading law says nothing.
    pub inconclusive: bool,
}

/// Leading-order band near λ = 0 for the coefficients (εp, εq). Requires p̂₀ = 0.
pub fn predict_band<T: Real>(coef: &Coefficients<T>, epsilon: T) -> Result<BandPrediction<T>> {
    let h = coef.invariant_h()?;
    let series = epsilon_terms(coef, cr(T::zero()), 3)?;
    let (b2, b3) = (series.traces[2].im, series.traces[3].im);
    let e = epsilon;
    let two = T::lit(2.0);
    let center = two * b2 * e * e + two * b3 * e * e * e;
    let half = if h > T::zero() { two * h.powf(T::lit(1.5)) * (e * e * e).abs() } else { T::zero() };
    Ok(BandPrediction {
        epsilon,
        h,
        b2,
        b3,
        center,
        r_minus: center - half,
        r_plus: center + half,
        width_leading: two * half,
        empty: h < T::zero(),
        inconclusive: h == T::zero(),
    })
}

/// Controls for [`measure_band`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureOptions<T> {
    /// Window width in units of the predicted width.
    pub window_factor: T,
    pub min_window: T,
    pub grid: usize,
    pub integrator: IntegratorOptions<T>,
}

impl<T: Real> Default for MeasureOptions<T> {
    fn default() -> Self {
        MeasureOptions { window_factor: T::lit(10.0), min_window: T::lit(1e-8), grid: 512, integrator: IntegratorOptions::with_tolerance(T::lit(1e-13)) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandMeasurement<T> {
    pub prediction: BandPrediction<T>,
    pub window: (T, T),
    /// The non-degenerate 𝔖₃ interval nearest to r(ε), if any.
    pub measured: Option<(T, T)>,
    /// measured width / 4h^{3/2}|ε|³.
    pub width_ratio: Option<T>,
    pub scan: BandReport<T>,
}

/// Scans ρ for (εp, εq) around r(ε) and compares the band found with the
/// prediction. For h ≤ 0 the window uses 4|h|^{3/2}|ε|³ as its width scale.
pub fn measure_band<T: Real>(coef: &Coefficients<T>, epsilon: T, opts: &MeasureOptions<T>) -> Result<BandMeasurement<T>> {
    let prediction = predict_band(coef, epsilon)?;
    let scale = T::lit(4.0) * prediction.h.abs().powf(T::lit(1.5)) * (epsilon * epsilon * epsilon).abs();
    let half = (opts.window_factor * scale).max(opts.min_window) * T::lit(0.5);
    let window = (prediction.center - half, prediction.center + half);
    let scan_opts = ScanOptions { integrator: opts.integrator, ..ScanOptions::default() };
    let scan = scan_s3(&coef.scaled(epsilon), window, opts.grid, &scan_opts)?;
    let measured = scan
        .intervals
        .iter()
        .filter(|b| !b.degenerate)
        .min_by(|a, b| {
            let da = ((a.left + a.right) * T::lit(0.5) - prediction.center).abs();
            let db = ((b.left + b.right) * T::lit(0.5) - prediction.center).abs();
            da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
        })
        .map(|b| (b.left, b.right));
    let width_ratio = match measured {
        Some((l, r)) if prediction.width_leading > T::zero() => Some((r - l) / prediction.width_leading),
        _ => None,
    };
    Ok(BandMeasurement { prediction, window, measured, width_ratio, scan })
}

/// Least-squares exponent k in width ∝ εᵏ.
pub fn width_exponent(points: &[(f64, f64)]) -> Option<f64> {
    loglog_slope(points)
}
