//! Fundamental system of the third-order problem, its monodromy matrix and
//! trace, the diagonalising rescaled system, and the Picard and high-energy
//! approximations of the trace.

use serde::{Deserialize, Serialize};

use crate::coeffs::Coefficients;
use crate::error::{Error, Result};
use crate::linalg::Mat3;
use crate::ode::{integrate, IntegratorOptions};
use crate::quadrature::GaussLegendre;
use crate::scalar::{c, cr, i_unit, omega, omega_pow, Real, C};

/// A spectral parameter with its principal cube root and growth exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint<T> {
    pub lambda: C<T>,
    /// λ^{1/3} with arg λ ∈ (−π/2, 3π/2], so arg z ∈ (−π/6, π/2].
    pub z: C<T>,
    /// z₀ = max_j Re(izω^j) = (y + √3x)/2 for z = x + iy.
    pub z0: T,
}

/// Principal cube root with arg λ ∈ (−π/2, 3π/2].
pub fn principal_cbrt<T: Real>(lambda: C<T>) -> C<T> {
    let r = lambda.norm();
    if r == T::zero() {
        return cr(T::zero());
    }
    let mut theta = lambda.im.atan2(lambda.re);
    if theta <= -T::FRAC_PI_2() {
        theta += T::TAU();
    }
    C::from_polar(r.cbrt(), theta / T::lit(3.0))
}

/// Builds the spectral point for λ.
pub fn point<T: Real>(lambda: C<T>) -> SpectralPoint<T> {
    let z = principal_cbrt(lambda);
    let z0 = (z.im + T::lit(3.0).sqrt() * z.re) * T::lit(0.5);
    SpectralPoint { lambda, z, z0 }
}

impl<T: Real> SpectralPoint<T> {
    pub fn real(lambda: T) -> Self {
        point(cr(lambda))
    }

    pub fn conj(&self) -> Self {
        point(self.lambda.conj())
    }

    pub fn is_real(&self) -> bool {
        self.lambda.im == T::zero()
    }

    /// e^{z₀}, the natural magnitude of monodromy quantities.
    pub fn growth(&self) -> T {
        self.z0.exp()
    }
}

/// Monodromy matrix M(1, λ) = e^{log_scale} · matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monodromy<T> {
    pub lambda: C<T>,
    pub matrix: Mat3<T>,
    pub log_scale: T,
    /// T(λ) = e^{log_scale} · Tr(matrix).
    pub trace: C<T>,
    pub steps: usize,
}

impl<T: Real> Monodromy<T> {
    fn new(lambda: C<T>, g: Mat3<T>, s: T, steps: usize) -> Self {
        let m = g.max_abs();
        let (g, s) = if m > T::zero() && (m < T::lit(1e-2) || m > T::lit(1e2)) { (g.scale_real(m.recip()), s + m.ln()) } else { (g, s) };
        Monodromy { lambda, matrix: g, log_scale: s, trace: g.trace() * s.exp(), steps }
    }

    /// The unscaled matrix; overflows for very large log_scale.
    pub fn full(&self) -> Mat3<T> {
        self.matrix.scale_real(self.log_scale.exp())
    }

    /// T(λ)·e^{−shift}, finite even when T itself overflows.
    pub fn trace_shifted(&self, shift: T) -> C<T> {
        self.matrix.trace() * (self.log_scale - shift).exp()
    }

    /// det M(1, λ).
    pub fn det(&self) -> C<T> {
        let d = self.matrix.det();
        if d.norm() == T::zero() {
            return d;
        }
        (d.ln() + cr(T::lit(3.0) * self.log_scale)).exp()
    }

    /// |det M − 1| relative to the first-order sensitivity ‖M‖·‖adj M‖ of the
    /// determinant to entry perturbations.
    pub fn det_residual(&self) -> T {
        let g = &self.matrix;
        let adj_max = g.inverse().map(|inv| inv.scale(g.det()).max_abs()).unwrap_or(T::zero());
        let sens = g.max_abs() * adj_max;
        let target = (-T::lit(3.0) * self.log_scale).exp();
        (g.det() - cr(target)).norm() / sens.max(target)
    }
}

fn j_matrix<T: Real>() -> Mat3<T> {
    let i = i_unit::<T>();
    let o = cr(T::zero());
    Mat3([[o, o, i], [o, -i, o], [i, o, o]])
}

/// |M*(1, λ̄) J M(1, λ) − J| / e^{z₀(λ)+z₀(λ̄)}, with `at` computed at λ and
/// `at_conj` at λ̄.
pub fn j_residual<T: Real>(at: &Monodromy<T>, at_conj: &Monodromy<T>) -> T {
    let sp = point(at.lambda);
    let spc = point(at_conj.lambda);
    let j = j_matrix::<T>();
    let core = at_conj.matrix.adjoint() * j * at.matrix;
    let s = at.log_scale + at_conj.log_scale;
    let shift = sp.z0 + spc.z0;
    let scaled = core.scale_real((s - shift).exp()) - j.scale_real((-shift).exp());
    scaled.frobenius()
}

/// The constant part P(λ) of the first-order system.
pub fn p_matrix<T: Real>(lambda: C<T>) -> Mat3<T> {
    let o = cr(T::zero());
    let one = cr(T::one());
    Mat3([[o, one, o], [o, o, one], [-i_unit::<T>() * lambda, o, o]])
}

/// The coefficient part Q(t) for values p = p(t), q = q(t).
pub fn q_matrix<T: Real>(p: T, q: T) -> Mat3<T> {
    let o = cr(T::zero());
    Mat3([[o, o, o], [cr(-p), o, o], [c(T::zero(), q), cr(-p), o]])
}

/// Propagates M′ = (P + Q(t))M, M(0) = I over one period.
pub fn propagate<T: Real>(coef: &Coefficients<T>, sp: &SpectralPoint<T>, opts: &IntegratorOptions<T>) -> Result<Monodromy<T>> {
    let lam = sp.lambda;
    let il = i_unit::<T>() * lam;
    let rhs = |t: T, y: &Mat3<T>| {
        let (p, q) = coef.eval_pq(t);
        let a = il - c(T::zero(), q);
        let r = &y.0;
        let mut out = Mat3::zero();
        for j in 0..3 {
            out.0[0][j] = r[1][j];
            out.0[1][j] = r[2][j] - r[0][j] * p;
            out.0[2][j] = -(r[0][j] * a) - r[1][j] * p;
        }
        out
    };
    let res = integrate(rhs, T::one(), sp.z.norm(), opts)?;
    Ok(Monodromy::new(lam, res.matrix, res.log_scale, res.accepted + res.rejected))
}

fn q1<T: Real>() -> Mat3<T> {
    let w = omega::<T>();
    let w2 = w * w;
    let one = cr(T::one());
    let m2 = cr(-T::lit(2.0));
    Mat3([[m2, w2, w], [one, m2 * w2, w], [one, w2, m2 * w]])
}

fn q2<T: Real>() -> Mat3<T> {
    let w = omega::<T>();
    let w2 = w * w;
    let one = cr(T::one());
    Mat3([[one; 3], [w; 3], [w2; 3]])
}

/// Similarity 𝒰 = 𝒵U with 𝒵 = diag(1, iz, (iz)²) and U the unitary
/// discrete Fourier matrix, together with its inverse.
pub fn similarity<T: Real>(z: C<T>) -> (Mat3<T>, Mat3<T>) {
    let s = T::lit(3.0).sqrt().recip();
    let mut u = Mat3::zero();
    for j in 0..3 {
        for k in 0..3 {
            u.0[j][k] = omega_pow::<T>((j * k) as i64) * s;
        }
    }
    let iz = i_unit::<T>() * z;
    let zd = Mat3::diag([cr(T::one()), iz, iz * iz]);
    let zd_inv = Mat3::diag([cr(T::one()), iz.inv(), (iz * iz).inv()]);
    (zd * u, u.adjoint() * zd_inv)
}

/// The rescaled perturbation 𝒬(t, λ) = (pQ₁ + (q/z)Q₂)/(3iz).
pub fn scaled_q<T: Real>(z: C<T>, p: T, q: T) -> Mat3<T> {
    let pre = (i_unit::<T>() * z * T::lit(3.0)).inv();
    (q1::<T>().scale_real(p) + q2::<T>().scale(z.inv() * q)).scale(pre)
}

/// Propagates the diagonalised system 𝓜′ = (izΩ + 𝒬)𝓜 and maps the result
/// back to M(1, λ) = 𝒰𝓜𝒰⁻¹.
pub fn propagate_scaled<T: Real>(coef: &Coefficients<T>, sp: &SpectralPoint<T>, opts: &IntegratorOptions<T>) -> Result<Monodromy<T>> {
    let g = propagate_scaled_raw(coef, sp, opts)?;
    let (u, u_inv) = similarity(sp.z);
    Ok(Monodromy::new(sp.lambda, u * g.matrix * u_inv, g.log_scale, g.steps))
}

/// 𝓜(1, λ) itself, without undoing the similarity.
pub fn propagate_scaled_raw<T: Real>(coef: &Coefficients<T>, sp: &SpectralPoint<T>, opts: &IntegratorOptions<T>) -> Result<Monodromy<T>> {
    if sp.lambda.norm() == T::zero() {
        return Err(Error::ZeroLambda);
    }
    let z = sp.z;
    let iz = i_unit::<T>() * z;
    let diag = [iz, iz * omega::<T>(), iz * omega::<T>().conj()];
    let (q1m, q2m) = (q1::<T>(), q2::<T>());
    let pre = (iz * T::lit(3.0)).inv();
    let zinv = z.inv();
    let rhs = |t: T, y: &Mat3<T>| {
        let (p, q) = coef.eval_pq(t);
        let qq = (q1m.scale_real(p) + q2m.scale(zinv * q)).scale(pre);
        let mut out = qq * *y;
        for (i, d) in diag.iter().enumerate() {
            for j in 0..3 {
                out.0[i][j] = out.0[i][j] + *d * y.0[i][j];
            }
        }
        out
    };
    let res = integrate(rhs, T::one(), z.norm(), opts)?;
    Ok(Monodromy::new(sp.lambda, res.matrix, res.log_scale, res.accepted + res.rejected))
}

/// e^{izω^j} summed: the trace for p = q = 0.
pub fn unperturbed_trace<T: Real>(sp: &SpectralPoint<T>) -> C<T> {
    unperturbed_trace_shifted(sp, T::zero())
}

/// T₀(λ)·e^{−shift}.
pub fn unperturbed_trace_shifted<T: Real>(sp: &SpectralPoint<T>, shift: T) -> C<T> {
    let iz = i_unit::<T>() * sp.z;
    (0..3).fold(cr(T::zero()), |acc, k| acc + (iz * omega_pow::<T>(k) - cr(shift)).exp())
}

/// Number of 64-node panels needed to resolve phases up to √3|z|·len.
fn panels<T: Real>(z: C<T>, len: T) -> usize {
    let ph = (T::lit(3.0).sqrt() * z.norm() * len / T::lit(30.0)).ceil();
    ph.to_usize().unwrap_or(1).max(1)
}

/// First `n` Picard terms 𝓜₀(1, λ), …, 𝓜_{n−1}(1, λ) of the rescaled system
/// by nested Gauss–Legendre quadrature (n ≤ 3).
pub fn picard_terms<T: Real>(coef: &Coefficients<T>, sp: &SpectralPoint<T>, n: usize) -> Result<Vec<Mat3<T>>> {
    if n == 0 || n > 3 {
        return Err(Error::UnsupportedOrder { requested: n, max: 3 });
    }
    if sp.lambda.norm() == T::zero() {
        return Err(Error::ZeroLambda);
    }
    let z = sp.z;
    let iz = i_unit::<T>() * z;
    let w = [iz, iz * omega::<T>(), iz * omega::<T>().conj()];
    let e = |t: T| Mat3::diag([(w[0] * t).exp(), (w[1] * t).exp(), (w[2] * t).exp()]);
    let qs = |s: T| {
        let (p, q) = coef.eval_pq(s);
        scaled_q(z, p, q)
    };
    let gl = GaussLegendre::<T>::new(64);
    // 𝓜₁(t) = ∫₀ᵗ e^{iz(t−s)Ω} 𝒬(s) e^{izsΩ} ds
    let m1 = |t: T| -> Mat3<T> {
        let (xs, ws) = gl.composite(T::zero(), t, panels(z, t));
        let mut acc = Mat3::zero();
        for (s, wt) in xs.into_iter().zip(ws) {
            acc += (e(t - s) * qs(s) * e(s)).scale_real(wt);
        }
        acc
    };
    let mut out = vec![e(T::one())];
    if n >= 2 {
        out.push(m1(T::one()));
    }
    if n >= 3 {
        let (xs, ws) = gl.composite(T::zero(), T::one(), panels(z, T::one()));
        let mut acc = Mat3::zero();
        for (s, wt) in xs.into_iter().zip(ws) {
            acc += (e(T::one() - s) * qs(s) * m1(s)).scale_real(wt);
        }
        out.push(acc);
    }
    Ok(out)
}

/// (Φ₀ + Φ₁/z²)·e^{−z₀}, the two-term high-energy approximation of the
/// trace relative to its natural size.
pub fn trace_asymptotic_shifted<T: Real>(coef: &Coefficients<T>, sp: &SpectralPoint<T>) -> Result<C<T>> {
    if sp.lambda.norm() == T::zero() {
        return Err(Error::ZeroLambda);
    }
    let z = sp.z;
    let iz = i_unit::<T>() * z;
    let shift = cr(sp.z0);
    let p0 = coef.p0();
    let two_thirds_ip0 = c(T::zero(), T::lit(2.0) * p0 / T::lit(3.0));
    let mut phi0 = cr(T::zero());
    for k in 0..3 {
        let wk = omega_pow::<T>(k);
        phi0 = phi0 + (iz * wk + two_thirds_ip0 / (wk * z) - shift).exp();
    }
    // ∫₀¹ φ(s)η(s)ds with ∫₀¹ e^{αs}e^{2πins}ds = (e^α − 1)/(α + 2πin).
    let modes = coef.modes(crate::coeffs::Field::P);
    let d = modes.len() as i64 - 1;
    let mut integral = cr(T::zero());
    for k in 0..3i64 {
        for j in (k + 1)..3 {
            let wk = omega_pow::<T>(k);
            let wj = omega_pow::<T>(j);
            let ek = (iz * wk - shift).exp();
            let ej = (iz * wj - shift).exp();
            let alpha = iz * (wk - wj);
            let pref = omega_pow::<T>(2 * (k + j));
            for n in -d..=d {
                let weight = coef.p_hat(n).norm_sqr();
                if weight == T::zero() {
                    continue;
                }
                let den = alpha + c(T::zero(), T::TAU() * T::from_int(n));
                let val = if den.norm() == T::zero() { ej } else { (ek - ej) / den };
                integral = integral + pref * val * weight;
            }
        }
    }
    let phi1 = integral * (-T::one() / T::lit(9.0));
    Ok(phi0 + phi1 / (z * z))
}

/// Φ₀ + Φ₁/z².
pub fn trace_asymptotic<T: Real>(coef: &Coefficients<T>, sp: &SpectralPoint<T>) -> Result<C<T>> {
    Ok(trace_asymptotic_shifted(coef, sp)? * sp.z0.exp())
}

/// T(λ) and conj(T(conj λ)), the two coefficients of the characteristic
/// cubic. Real λ needs a single propagation.
pub fn trace_pair<T: Real>(coef: &Coefficients<T>, lambda: C<T>, opts: &IntegratorOptions<T>) -> Result<(Monodromy<T>, C<T>)> {
    let sp = point(lambda);
    let m = propagate(coef, &sp, opts)?;
    if lambda.im == T::zero() {
        let t = m.trace;
        return Ok((m, t.conj()));
    }
    let mc = propagate(coef, &sp.conj(), opts)?;
    Ok((m, mc.trace.conj()))
}
