//! Multiplicity-3 spectrum on the real line (where ρ ≤ 0) and the complex
//! ramifications (zeros of ρ), with their labeling and asymptotic checks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::Coefficients;
use crate::error::{Error, Result};
use crate::monodromy::{principal_cbrt, propagate, trace_pair, SpectralPoint};
use crate::multipliers::{discriminant_cubic, discriminant_scale, psi, rho_ab, solve_multipliers};
use crate::ode::IntegratorOptions;
use crate::roots::{brent, golden_min};
use crate::scalar::{c, cr, i_unit, Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// A located zero r_n^± of ρ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamificationRecord<T> {
    pub n: i64,
    pub sign: Sign,
    pub value: C<T>,
    /// |ρ(value)| divided by the magnitude scale of the terms of ρ.
    pub residual: T,
    /// Whether the cube root of `value` lies in the localization disk 𝒟ₙ.
    pub disk_ok: bool,
    /// Newton refinement reached its step tolerance.
    pub converged: bool,
    /// |ψ(value)| / |τ₃(value)| for non-real records in the upper half-plane.
    pub psi_residual: Option<T>,
}

/// One refined sign change or tangential zero of ρ on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band<T> {
    pub left: T,
    pub right: T,
    /// Zero-width band: ρ touches 0 without changing sign.
    pub degenerate: bool,
    /// The interval was cut by the scan window.
    pub clipped: bool,
}

/// Located 𝔖₃ intervals inside a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandReport<T> {
    pub window: (T, T),
    pub grid: usize,
    pub intervals: Vec<Band<T>>,
    /// Real zeros with their labels, in increasing order.
    pub endpoint_records: Vec<RamificationRecord<T>>,
    /// Number of real zeros counted with multiplicity.
    pub count_m: usize,
    /// Set when `count_m` is odd, where the real-zero labeling is a guess.
    pub odd_count: bool,
}

/// Controls for the real-line scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions<T> {
    pub integrator: IntegratorOptions<T>,
    /// Largest allowed grid step measured in z = λ^{1/3} units.
    pub max_z_step: T,
    /// Crossings are refined to width `xtol_rel · max(1, |λ|)`.
    pub xtol_rel: T,
    /// A local minimum of ρ below `tangent_rel` times its grid neighbours is
    /// reported as a tangential zero.
    pub tangent_rel: T,
}

impl<T: Real> Default for ScanOptions<T> {
    fn default() -> Self {
        ScanOptions {
            integrator: IntegratorOptions::with_tolerance(T::lit(1e-12)),
            max_z_step: T::lit(0.5),
            xtol_rel: T::lit(1e-9),
            tangent_rel: T::lit(1e-10),
        }
    }
}

/// ρ on the real line divided by max(1, |T|)⁴ so that it stays finite.
/// Returns (scaled ρ, T).
pub fn rho_real_scaled<T: Real>(coef: &Coefficients<T>, lambda: T, opts: &IntegratorOptions<T>) -> Result<(T, C<T>)> {
    let sp = SpectralPoint::real(lambda);
    let m = propagate(coef, &sp, opts)?;
    let s = T::one().max(m.trace.norm());
    let a = m.trace.re - T::lit(3.0);
    let b = m.trace.im;
    let (a1, b1) = (a / s, b / s);
    let inv = s.recip();
    // ρ/s⁴ term by term.
    let rho = a1 * a1 * a1 * (a1 + T::lit(4.0) * inv)
        + b1 * b1 * (T::lit(108.0) * inv * inv + T::lit(2.0) * (a1 + T::lit(18.0) * inv) * a1 + b1 * b1);
    Ok((rho, m.trace))
}

/// ρ(λ) for real λ by the (a, b) form, together with T(λ).
pub fn rho_real<T: Real>(coef: &Coefficients<T>, lambda: T, opts: &IntegratorOptions<T>) -> Result<(T, C<T>)> {
    let m = propagate(coef, &SpectralPoint::real(lambda), opts)?;
    Ok((rho_ab(m.trace.re - T::lit(3.0), m.trace.im), m.trace))
}

fn grid_points<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let step = (hi - lo) / T::from_usize(n - 1).unwrap();
    (0..n).map(|k| if k + 1 == n { hi } else { lo + step * T::from_usize(k).unwrap() }).collect()
}

fn check_window<T: Real>(window: (T, T), grid: usize) -> Result<()> {
    if grid < 16 {
        return Err(Error::InvalidArgument(format!("grid must be at least 16, got {grid}")));
    }
    if !(window.0 < window.1) || !window.0.is_finite() || !window.1.is_finite() {
        return Err(Error::InvalidArgument("window must satisfy left < right".into()));
    }
    Ok(())
}

/// Grid step in z units at the most sensitive point of the window.
fn z_step<T: Real>(window: (T, T), grid: usize) -> T {
    let dl = (window.1 - window.0) / T::from_usize(grid - 1).unwrap();
    let nearest = if window.0 <= T::zero() && window.1 >= T::zero() { T::zero() } else { window.0.abs().min(window.1.abs()) };
    dl / (T::lit(3.0) * T::one().max(nearest).powf(T::lit(2.0) / T::lit(3.0)))
}

/// Labels sorted real zeros outermost pair first: the smallest is r₀⁻ and
/// the largest r₀⁺, then (r₋ₖ⁺, rₖ⁻) moving inward.
pub fn label_real_zeros(sorted: &[f64]) -> Vec<(i64, Sign)> {
    let k = sorted.len();
    let mut out = vec![(0i64, Sign::Minus); k];
    for i in 0..k.div_ceil(2) {
        let j = k - 1 - i;
        out[i] = if i == 0 { (0, Sign::Minus) } else { (-(i as i64), Sign::Plus) };
        if j != i {
            out[j] = if i == 0 { (0, Sign::Plus) } else { (i as i64, Sign::Minus) };
        }
    }
    out
}

/// Locates 𝔖₃ = {λ ∈ ℝ : ρ(λ) ≤ 0} inside `window` from a sign scan of ρ on
/// `grid` equispaced points.
pub fn scan_s3<T: Real>(coef: &Coefficients<T>, window: (T, T), grid: usize, opts: &ScanOptions<T>) -> Result<BandReport<T>> {
    check_window(window, grid)?;
    let step = z_step(window, grid);
    if step > opts.max_z_step {
        return Err(Error::WindowTooCoarse { step: step.as_f64(), limit: opts.max_z_step.as_f64() });
    }
    let io = opts.integrator;
    let xs = grid_points(window.0, window.1, grid);
    let f = |x: T| rho_real_scaled(coef, x, &io).map(|r| r.0);
    let fs: Vec<T> = xs.par_iter().map(|&x| f(x)).collect::<Result<_>>()?;
    let g = |x: T| f(x).unwrap_or(T::nan());
    let xtol = |x: T| opts.xtol_rel * T::one().max(x.abs());

    // (location, multiplicity)
    let mut zeros: Vec<(T, usize)> = Vec::new();
    for i in 0..grid - 1 {
        let (a, b) = (fs[i], fs[i + 1]);
        if a == T::zero() && i > 0 {
            continue;
        }
        if (a < T::zero()) != (b < T::zero()) || a == T::zero() {
            let (r, _) = brent(g, xs[i], xs[i + 1], a, b, xtol(xs[i]), 200);
            zeros.push((r, 1));
        }
    }
    let mins: Vec<usize> = (1..grid - 1)
        .filter(|&i| fs[i] > T::zero() && fs[i - 1] > T::zero() && fs[i + 1] > T::zero() && fs[i] < fs[i - 1] && fs[i] <= fs[i + 1])
        .collect();
    let refined: Vec<(usize, T, T)> = mins
        .par_iter()
        .map(|&i| {
            let tol = T::lit(1e-3) * xtol(xs[i]);
            let (x, v) = golden_min(g, xs[i - 1], xs[i + 1], tol, 400);
            (i, x, v)
        })
        .collect();
    for (i, x, v) in refined {
        let nb = fs[i - 1].max(fs[i + 1]);
        if v < T::zero() {
            let (l, _) = brent(g, xs[i - 1], x, fs[i - 1], v, xtol(x), 200);
            let (r, _) = brent(g, x, xs[i + 1], v, fs[i + 1], xtol(x), 200);
            zeros.push((l, 1));
            zeros.push((r, 1));
        } else if v <= opts.tangent_rel * nb {
            let dup = zeros.iter().any(|&(z, m)| m == 2 && (z - x).abs() <= xs[i + 1] - xs[i]);
            if !dup {
                zeros.push((x, 2));
            }
        }
    }
    zeros.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    // A crossing reached from two neighbouring brackets is kept once.
    zeros.dedup_by(|b, a| a.1 == b.1 && (b.0 - a.0).abs() <= T::lit(2.0) * xtol(a.0));

    let mut intervals = Vec::new();
    let mut open: Option<(T, bool)> = if fs[0] < T::zero() { Some((window.0, true)) } else { None };
    for &(x, mult) in &zeros {
        if mult == 2 {
            if open.is_none() {
                intervals.push(Band { left: x, right: x, degenerate: true, clipped: false });
            }
            continue;
        }
        match open.take() {
            Some((l, clipped)) => intervals.push(Band { left: l, right: x, degenerate: false, clipped }),
            None => open = Some((x, false)),
        }
    }
    if let Some((l, _)) = open {
        intervals.push(Band { left: l, right: window.1, degenerate: false, clipped: true });
    }

    let flat: Vec<f64> = zeros.iter().flat_map(|&(x, m)| std::iter::repeat_n(x.as_f64(), m)).collect();
    let labels = label_real_zeros(&flat);
    let mut endpoint_records = Vec::with_capacity(flat.len());
    let mut k = 0;
    for &(x, m) in &zeros {
        let (res, _) = rho_real_scaled(coef, x, &io)?;
        for _ in 0..m {
            let (n, sign) = labels[k];
            k += 1;
            endpoint_records.push(RamificationRecord {
                n,
                sign,
                value: cr(x),
                residual: res.abs(),
                disk_ok: in_disk(cr(x), n),
                converged: true,
                psi_residual: None,
            });
        }
    }
    Ok(BandReport { window, grid, intervals, count_m: flat.len(), odd_count: flat.len() % 2 == 1, endpoint_records })
}

/// Center of 𝒟ₙ in the z-plane: e^{±iπ/6}·2π|n|/√3.
pub fn disk_center<T: Real>(n: i64) -> C<T> {
    let r = T::TAU() * T::from_int(n.abs()) / T::lit(3.0).sqrt();
    let ang = if n >= 0 { T::FRAC_PI_6() } else { -T::FRAC_PI_6() };
    C::from_polar(r, ang)
}

/// Radius π/(2√3) of every 𝒟ₙ.
pub fn disk_radius<T: Real>() -> T {
    T::PI() / (T::lit(2.0) * T::lit(3.0).sqrt())
}

/// Whether λ lies in 𝒟ₙ. For n < 0 the cube root continued below the ray
/// arg z = −π/6 is used, matching the conjugate disks.
pub fn in_disk<T: Real>(lambda: C<T>, n: i64) -> bool {
    let z = if n >= 0 { principal_cbrt(lambda) } else { principal_cbrt(lambda.conj()).conj() };
    (z - disk_center::<T>(n)).norm() < disk_radius::<T>()
}

/// Unperturbed double zero r_n^{0,±} = i(2πn/√3)³ (conjugated for n < 0).
pub fn unperturbed_ramification<T: Real>(n: i64) -> C<T> {
    let r = T::TAU() * T::from_int(n.abs()) / T::lit(3.0).sqrt();
    let v = c(T::zero(), r * r * r);
    if n >= 0 { v } else { v.conj() }
}

/// ρ(λ) for complex λ from T(λ) and T̄(λ̄), with its term-magnitude scale.
pub fn rho_complex<T: Real>(coef: &Coefficients<T>, lambda: C<T>, opts: &IntegratorOptions<T>) -> Result<(C<T>, T)> {
    let (m, tc) = trace_pair(coef, lambda, opts)?;
    Ok((discriminant_cubic(m.trace, tc).rho, discriminant_scale(m.trace, tc)))
}

/// Controls for the ramification search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamificationOptions<T> {
    pub integrator: IntegratorOptions<T>,
    /// Initial trapezoid node count on ∂𝒟ₙ.
    pub nodes: usize,
    /// Node count cap for the winding number.
    pub max_nodes: usize,
    /// Disks with n below this are searched but a winding other than 2
    /// there is not an error.
    pub trusted_from: i64,
    pub newton_iters: usize,
}

impl<T: Real> Default for RamificationOptions<T> {
    fn default() -> Self {
        RamificationOptions {
            integrator: IntegratorOptions::with_tolerance(T::lit(1e-12)),
            nodes: 256,
            max_nodes: 2048,
            trusted_from: 3,
            newton_iters: 12,
        }
    }
}

/// Result of the disk-by-disk search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamificationScan<T> {
    /// Records for 1 ≤ |n| ≤ n_max, sorted by (n, sign).
    pub records: Vec<RamificationRecord<T>>,
    /// Numerical winding number of ρ on each ∂𝒟ₙ, n = 1..=n_max.
    pub windings: Vec<(i64, T)>,
    /// Smallest n₀ such that every disk with n ≥ n₀ has winding 2.
    pub n0: i64,
}

struct ContourData<T> {
    winding: T,
    rounded: i64,
    w: Vec<C<T>>,
    logs: Vec<C<T>>,
}

fn contour<T: Real>(coef: &Coefficients<T>, n: i64, opts: &RamificationOptions<T>) -> Result<ContourData<T>> {
    let center = disk_center::<T>(n);
    let radius = disk_radius::<T>();
    let mut nodes = opts.nodes.max(8);
    loop {
        let w: Vec<C<T>> = (0..nodes)
            .map(|k| C::from_polar(radius, T::TAU() * T::from_usize(k).unwrap() / T::from_usize(nodes).unwrap()))
            .collect();
        let vals: Vec<C<T>> = w
            .par_iter()
            .map(|&wk| {
                let z = center + wk;
                rho_complex(coef, z * z * z, &opts.integrator).map(|r| r.0)
            })
            .collect::<Result<_>>()?;
        let mut phase = Vec::with_capacity(nodes + 1);
        phase.push(vals[0].arg());
        let mut max_jump = T::zero();
        for k in 1..=nodes {
            let d = (vals[k % nodes] / vals[k - 1]).arg();
            max_jump = max_jump.max(d.abs());
            phase.push(phase[k - 1] + d);
        }
        let winding = (phase[nodes] - phase[0]) / T::TAU();
        let rounded = winding.round();
        let good = (winding - rounded).abs() < T::lit(0.2) && max_jump < T::FRAC_PI_2();
        if good || nodes * 2 > opts.max_nodes {
            let logs = (0..nodes).map(|k| c(vals[k].norm().ln(), phase[k])).collect();
            return Ok(ContourData { winding, rounded: rounded.to_i64().unwrap_or(0), w, logs });
        }
        nodes *= 2;
    }
}

/// Delves–Lyness estimate of the two zeros inside the contour, in the
/// shifted variable w = z − center.
fn two_zeros<T: Real>(data: &ContourData<T>) -> (C<T>, C<T>) {
    let nodes = data.w.len();
    let nf = T::from_usize(nodes).unwrap();
    let wind = T::from_int(data.rounded);
    let mut s1 = cr(T::zero());
    let mut s2 = cr(T::zero());
    for k in 0..nodes {
        let w = data.w[k];
        let theta = T::TAU() * T::from_usize(k).unwrap() / nf;
        // Periodic part g = log ρ − W log w.
        let g = data.logs[k] - c(w.norm().ln(), theta) * wind;
        s1 = s1 + w * g;
        s2 = s2 + w * w * g;
    }
    let s1 = -s1 / nf;
    let s2 = -s2 * T::lit(2.0) / nf;
    let e2 = (s1 * s1 - s2) * T::lit(0.5);
    let disc = (s1 * s1 - e2 * T::lit(4.0)).sqrt();
    // A split below the noise of the moments is indistinguishable from a
    // double zero; report the well-conditioned mean for both.
    if disc.norm() < T::lit(1e-5) * disk_radius::<T>() {
        let m = s1 * T::lit(0.5);
        return (m, m);
    }
    ((s1 + disc) * T::lit(0.5), (s1 - disc) * T::lit(0.5))
}

fn newton_rho<T: Real>(coef: &Coefficients<T>, start: C<T>, opts: &RamificationOptions<T>) -> Result<(C<T>, T, bool)> {
    let io = &opts.integrator;
    let mut x = start;
    let (mut fx, mut sc) = rho_complex(coef, x, io)?;
    let mut converged = false;
    for _ in 0..opts.newton_iters {
        let h = T::lit(1e-5) * T::one().max(x.norm()).powf(T::lit(2.0) / T::lit(3.0));
        let (fp, _) = rho_complex(coef, x + cr(h), io)?;
        let (fm, _) = rho_complex(coef, x - cr(h), io)?;
        let d = (fp - fm) / (h + h);
        if d.norm() == T::zero() {
            break;
        }
        let cand = x - fx / d;
        let (fc, scc) = rho_complex(coef, cand, io)?;
        if !(fc.norm() < fx.norm()) {
            converged = fx.norm() <= T::lit(1e-12) * sc;
            break;
        }
        let step = (cand - x).norm();
        x = cand;
        fx = fc;
        sc = scc;
        if step <= T::lit(1e-13) * x.norm() {
            converged = true;
            break;
        }
    }
    if fx.norm() <= T::lit(1e-12) * sc {
        converged = true;
    }
    Ok((x, fx.norm() / sc, converged))
}

/// |ψ(λ)|/|τ₃(λ)| at λ in the upper half-plane. At λ̄ the two dominant
/// multipliers coalesce at a ramification, so their mean is used there.
pub fn psi_residual<T: Real>(coef: &Coefficients<T>, lambda: C<T>, opts: &IntegratorOptions<T>) -> Result<T> {
    let sp = crate::monodromy::point(lambda);
    let spc = sp.conj();
    let (m, tc) = trace_pair(coef, lambda, opts)?;
    let (mc, tcc) = trace_pair(coef, lambda.conj(), opts)?;
    let at = solve_multipliers(m.trace, tc, &sp);
    let atc = solve_multipliers(mc.trace, tcc, &spc);
    let tau3 = at.tau[2];
    let mut by_size = atc.tau;
    by_size.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap_or(std::cmp::Ordering::Equal));
    let close = (by_size[0] - by_size[1]).norm() <= T::lit(1e-3) * by_size[0].norm();
    let tau3c = if close { (by_size[0] + by_size[1]) * T::lit(0.5) } else { atc.tau[2] };
    Ok(psi(&sp, tau3, tau3c).norm() / tau3.norm())
}

/// Counts and refines the zeros of ρ in 𝒟ₙ for 1 ≤ n ≤ n_max and adds the
/// conjugate records for negative n.
pub fn locate_ramifications<T: Real>(coef: &Coefficients<T>, n_max: i64, opts: &RamificationOptions<T>) -> Result<RamificationScan<T>> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let per_disk: Vec<(i64, T, Vec<RamificationRecord<T>>)> = (1..=n_max)
        .into_par_iter()
        .map(|n| -> Result<_> {
            let data = contour(coef, n, opts)?;
            if data.rounded != 2 {
                if n >= opts.trusted_from {
                    return Err(Error::CountMismatch {
                        what: format!("zeros of rho in disk {n}"),
                        found: data.winding.as_f64(),
                        expected: 2.0,
                    });
                }
                return Ok((n, data.winding, Vec::new()));
            }
            let center = disk_center::<T>(n);
            let (w1, w2) = two_zeros(&data);
            let mut found = Vec::new();
            // Delves–Lyness estimates are accurate even for coalescing pairs,
            // where Newton on ρ is ill-conditioned; polish only separated zeros.
            let separated = (w1 - w2).norm() > T::lit(1e-2) * disk_radius::<T>();
            for w in [w1, w2] {
                let z = center + w;
                let lam = z * z * z;
                if separated {
                    found.push(newton_rho(coef, lam, opts)?);
                } else {
                    let (f, sc) = rho_complex(coef, lam, &opts.integrator)?;
                    found.push((lam, f.norm() / sc, true));
                }
            }
            found.sort_by(|a, b| a.0.im.partial_cmp(&b.0.im).unwrap_or(std::cmp::Ordering::Equal));
            let mut recs = Vec::new();
            for (k, (lam, res, conv)) in found.into_iter().enumerate() {
                let sign = if k == 0 { Sign::Minus } else { Sign::Plus };
                let psi_res = if lam.im > T::zero() { Some(psi_residual(coef, lam, &opts.integrator)?) } else { None };
                recs.push(RamificationRecord { n, sign, value: lam, residual: res, disk_ok: in_disk(lam, n), converged: conv, psi_residual: psi_res });
            }
            Ok((n, data.winding, recs))
        })
        .collect::<Result<_>>()?;
    let mut records = Vec::new();
    let mut windings = Vec::new();
    for (n, w, recs) in &per_disk {
        windings.push((*n, *w));
        for r in recs {
            records.push(*r);
            records.push(RamificationRecord {
                n: -r.n,
                sign: r.sign.flip(),
                value: r.value.conj(),
                disk_ok: in_disk(r.value.conj(), -r.n),
                psi_residual: None,
                ..*r
            });
        }
    }
    records.sort_by_key(|r| (r.n, r.sign == Sign::Plus));
    let mut n0 = n_max + 1;
    for (n, w, _) in per_disk.iter().rev() {
        if (*w - T::lit(2.0)).abs() < T::lit(0.2) {
            n0 = *n;
        } else {
            break;
        }
    }
    Ok(RamificationScan { records, windings, n0 })
}

/// Per-index comparison with the leading asymptotics of r_n^±.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamificationFitRow<T> {
    pub n: i64,
    /// d_n^± = (r_n^± − r_n^{0,±})·√3/(−4πin).
    pub d_plus: C<T>,
    pub d_minus: C<T>,
    /// Predicted limits p̂₀ ∓ |p̂ₙ|.
    pub expected_plus: T,
    pub expected_minus: T,
    /// max_± |d_n^± − expected|.
    pub residual: T,
    /// max_± |r_n^± / r_n^{0,±} − 1|.
    pub relative_deviation: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamificationFit<T> {
    pub rows: Vec<RamificationFitRow<T>>,
    /// Least-squares slope of log(relative deviation) against log n, or
    /// `None` when every deviation is zero to rounding.
    pub deviation_slope: Option<T>,
    /// The residual over the upper half of the n-range does not exceed the
    /// residual over the lower half.
    pub residual_decreasing: bool,
}

/// Least-squares slope of log y against log x over positive y.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > 0.0 && p.0 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 { None } else { Some(sxy / sxx) }
}

/// Compares located ramifications with r_n^± ≈ r_n^{0,±} − i(4πn/√3)(p̂₀ ∓ |p̂ₙ|)
/// and with the relative law r_n^± = r_n^{0,±}(1 + O(n⁻²)).
pub fn validate_ramification_asymptotics<T: Real>(records: &[RamificationRecord<T>], coef: &Coefficients<T>) -> Result<RamificationFit<T>> {
    let find = |n: i64, s: Sign| records.iter().find(|r| r.n == n && r.sign == s).map(|r| r.value);
    let mut rows = Vec::new();
    let mut n = 1;
    while let (Some(rp), Some(rm)) = (find(n, Sign::Plus), find(n, Sign::Minus)) {
        let r0 = unperturbed_ramification::<T>(n);
        let k = T::lit(3.0).sqrt() / (T::lit(4.0) * T::PI() * T::from_int(n));
        let scale = -i_unit::<T>().inv() * k;
        let d_plus = (rp - r0) * scale;
        let d_minus = (rm - r0) * scale;
        let p0 = coef.p0();
        let pn = coef.p_hat(n).norm();
        let (ep, em) = (p0 - pn, p0 + pn);
        let residual = (d_plus - cr(ep)).norm().max((d_minus - cr(em)).norm());
        let relative_deviation = (rp / r0 - cr(T::one())).norm().max((rm / r0 - cr(T::one())).norm());
        rows.push(RamificationFitRow { n, d_plus, d_minus, expected_plus: ep, expected_minus: em, residual, relative_deviation });
        n += 1;
    }
    if rows.len() < 10 {
        return Err(Error::InsufficientData(format!("need ramifications up to n = 10, have up to n = {}", rows.len())));
    }
    let noise = T::lit(1e-12);
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.relative_deviation > noise).map(|r| (r.n as f64, r.relative_deviation.as_f64())).collect();
    let deviation_slope = if pts.len() * 2 >= rows.len() { loglog_slope(&pts).map(T::lit) } else { None };
    let half = rows.len() / 2;
    let lo = rows[..half].iter().fold(T::zero(), |a, r| a.max(r.residual));
    let hi = rows[half..].iter().fold(T::zero(), |a, r| a.max(r.residual));
    Ok(RamificationFit { rows, deviation_slope, residual_decreasing: hi <= lo.max(noise) })
}

/// One row of the plot grid: ρ, the Lyapunov functions and the 𝔖₃ markers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRow<T> {
    pub lambda: T,
    pub trace: C<T>,
    pub rho: T,
    pub lyapunov: [C<T>; 3],
    /// ρ ≤ 0.
    pub s3_rho: bool,
    /// All Δ_j real within 1e−8 and inside [−1, 1].
    pub s3_lyapunov: bool,
}

/// Evaluates ρ and the Lyapunov functions on an equispaced grid.
pub fn band_grid<T: Real>(coef: &Coefficients<T>, window: (T, T), grid: usize, opts: &IntegratorOptions<T>) -> Result<Vec<GridRow<T>>> {
    check_window(window, grid)?;
    grid_points(window.0, window.1, grid)
        .par_iter()
        .map(|&x| {
            let sp = SpectralPoint::real(x);
            let m = propagate(coef, &sp, opts)?;
            let t = m.trace;
            let tr = solve_multipliers(t, t.conj(), &sp);
            let rho = rho_ab(t.re - T::lit(3.0), t.im);
            let tol = T::lit(1e-8);
            let s3_lyapunov = tr.lyapunov.iter().all(|d| d.im.abs() <= tol * T::one().max(d.norm()) && d.re.abs() <= T::one() + tol);
            Ok(GridRow { lambda: x, trace: t, rho, lyapunov: tr.lyapunov, s3_rho: rho <= T::zero(), s3_lyapunov })
        })
        .collect()
}
