//! Characteristic cubic of the monodromy matrix, its roots (the Floquet
//! multipliers) with branch labels, and the discriminant ρ.

use serde::{Deserialize, Serialize};

use crate::cubic::monic_cubic_roots;
use crate::error::{Error, Result};
use crate::monodromy::SpectralPoint;
use crate::scalar::{cr, i_unit, omega_pow, Real, C};

/// Assignment of roots to the unperturbed branches e^{izω^{j−1}}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchLabels<T> {
    /// Unperturbed value e^{izω^{j−1}} matched to τ_j.
    pub targets: [C<T>; 3],
    /// Relative distance |τ_j − target_j| / max(|τ_j|, |target_j|).
    pub distances: [T; 3],
    /// Total cost of the chosen assignment.
    pub cost: T,
    /// Cost of the best competing assignment.
    pub runner_up: T,
    /// Set when the runner-up is within a factor 2 of the chosen cost.
    pub ambiguous: bool,
}

/// Labeled multipliers (τ₁, τ₂, τ₃) at one λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierTriple<T> {
    pub tau: [C<T>; 3],
    pub labels: BranchLabels<T>,
    /// Δ_j = (τ_j + 1/τ_j)/2.
    pub lyapunov: [C<T>; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Π(τ_i − τ_j)² over the solved multipliers.
    Product,
    /// |T|⁴ − 8 Re T³ + 18|T|² − 27, real λ only.
    TraceIdentity,
    /// a³(a + 4) + b²(108 + 2(a + 18)a + b²) with T = 3 + a + ib, real λ only.
    AbForm,
    /// Discriminant of the cubic from both coefficients, any λ.
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantValue<T> {
    pub rho: C<T>,
    pub route: Route,
    /// Largest pairwise disagreement |ρ_a − ρ_b| / max(1, |ρ_a|, |ρ_b|) among
    /// the routes that were evaluated; zero for a single route.
    pub cross_residual: T,
}

/// Coefficients (−1, T, −T̄(λ̄), 1) of D(τ, λ) in descending powers of τ.
pub fn characteristic_cubic<T: Real>(t_val: C<T>, t_conj_val: C<T>) -> [C<T>; 4] {
    [cr(-T::one()), t_val, -t_conj_val, cr(T::one())]
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn rel_dist<T: Real>(a: C<T>, b: C<T>) -> T {
    let den = a.norm().max(b.norm());
    if den == T::zero() { T::zero() } else { (a - b).norm() / den }
}

/// The unperturbed multipliers e^{izω^{j−1}}, j = 1, 2, 3.
pub fn unperturbed_multipliers<T: Real>(sp: &SpectralPoint<T>) -> [C<T>; 3] {
    let iz = i_unit::<T>() * sp.z;
    [0, 1, 2].map(|k| (iz * omega_pow::<T>(k)).exp())
}

/// Labels three roots by the minimum-cost assignment to the unperturbed
/// multipliers.
pub fn label_roots<T: Real>(roots: [C<T>; 3], sp: &SpectralPoint<T>) -> MultiplierTriple<T> {
    let targets = unperturbed_multipliers(sp);
    let mut costs: Vec<(T, usize)> = PERMS
        .iter()
        .enumerate()
        .map(|(k, p)| ((0..3).fold(T::zero(), |a, j| a + rel_dist(roots[p[j]], targets[j])), k))
        .collect();
    costs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let (cost, best) = costs[0];
    let runner_up = costs[1].0;
    let perm = PERMS[best];
    let tau = [roots[perm[0]], roots[perm[1]], roots[perm[2]]];
    let distances = [0, 1, 2].map(|j| rel_dist(tau[j], targets[j]));
    let half = T::lit(0.5);
    let lyapunov = tau.map(|t| (t + t.inv()) * half);
    MultiplierTriple {
        tau,
        labels: BranchLabels { targets, distances, cost, runner_up, ambiguous: runner_up <= cost * T::lit(2.0) },
        lyapunov,
    }
}

/// Solves D(τ, λ) = 0 and labels the roots.
pub fn solve_multipliers<T: Real>(t_val: C<T>, t_conj_val: C<T>, sp: &SpectralPoint<T>) -> MultiplierTriple<T> {
    // τ³ − Tτ² + T̄(λ̄)τ − 1 = 0
    let roots = monic_cubic_roots(-t_val, t_conj_val, cr(-T::one()));
    label_roots(roots, sp)
}

impl<T: Real> MultiplierTriple<T> {
    /// Relative residuals of τ₁τ₂τ₃ = 1, Σ τ_j = T and Σ τ_iτ_j = T̄(λ̄).
    pub fn vieta_residuals(&self, t_val: C<T>, t_conj_val: C<T>) -> [T; 3] {
        let [a, b, c] = self.tau;
        let prod = a * b * c;
        let r_prod = (prod - cr(T::one())).norm() / T::one().max(a.norm() * b.norm() * c.norm());
        let r_sum = (a + b + c - t_val).norm() / (a.norm() + b.norm() + c.norm()).max(T::min_positive_value());
        let pairs = [a * b, a * c, b * c];
        let mag = pairs.iter().fold(T::zero(), |s, x| s + x.norm()).max(T::min_positive_value());
        let r_pair = (pairs[0] + pairs[1] + pairs[2] - t_conj_val).norm() / mag;
        [r_prod, r_sum, r_pair]
    }

    /// Number of multipliers with |τ| = 1 within `tol`.
    pub fn unimodular_count(&self, tol: T) -> usize {
        self.tau.iter().filter(|t| (t.norm() - T::one()).abs() <= tol).count()
    }
}

fn require_real<T: Real>(lambda: C<T>) -> Result<()> {
    if lambda.im != T::zero() {
        return Err(Error::NonRealLambda(lambda.im.as_f64()));
    }
    Ok(())
}

/// ρ = (τ₁ − τ₂)²(τ₁ − τ₃)²(τ₂ − τ₃)².
pub fn discriminant<T: Real>(triple: &MultiplierTriple<T>) -> DiscriminantValue<T> {
    let [a, b, c] = triple.tau;
    let d = (a - b) * (a - c) * (b - c);
    DiscriminantValue { rho: d * d, route: Route::Product, cross_residual: T::zero() }
}

/// ρ = |T|⁴ − 8 Re T³ + 18|T|² − 27 for real λ.
pub fn discriminant_from_trace<T: Real>(t_val: C<T>, lambda: C<T>) -> Result<DiscriminantValue<T>> {
    require_real(lambda)?;
    let m2 = t_val.norm_sqr();
    let rho = m2 * m2 - T::lit(8.0) * (t_val * t_val * t_val).re + T::lit(18.0) * m2 - T::lit(27.0);
    Ok(DiscriminantValue { rho: cr(rho), route: Route::TraceIdentity, cross_residual: T::zero() })
}

/// ρ in terms of a = Re T − 3, b = Im T, free of cancellation near T = 3.
pub fn discriminant_ab<T: Real>(t_val: C<T>, lambda: C<T>) -> Result<DiscriminantValue<T>> {
    require_real(lambda)?;
    Ok(DiscriminantValue { rho: cr(rho_ab(t_val.re - T::lit(3.0), t_val.im)), route: Route::AbForm, cross_residual: T::zero() })
}

/// a³(a + 4) + b²(108 + 2(a + 18)a + b²).
pub fn rho_ab<T: Real>(a: T, b: T) -> T {
    let b2 = b * b;
    a * a * a * (a + T::lit(4.0)) + b2 * (T::lit(108.0) + T::lit(2.0) * (a + T::lit(18.0)) * a + b2)
}

/// Discriminant of −τ³ + Aτ² − Bτ + 1 with A = T(λ), B = T̄(λ̄); valid for
/// complex λ.
pub fn discriminant_cubic<T: Real>(t_val: C<T>, t_conj_val: C<T>) -> DiscriminantValue<T> {
    let (a, b) = (t_val, t_conj_val);
    let rho = a * a * b * b - (a * a * a + b * b * b) * T::lit(4.0) + a * b * T::lit(18.0) - cr(T::lit(27.0));
    DiscriminantValue { rho, route: Route::Cubic, cross_residual: T::zero() }
}

/// Magnitude scale of the terms in the cubic-coefficient discriminant; the
/// natural denominator for relative ρ residuals.
pub fn discriminant_scale<T: Real>(t_val: C<T>, t_conj_val: C<T>) -> T {
    let (a, b) = (t_val.norm(), t_conj_val.norm());
    a * a * b * b + T::lit(4.0) * (a * a * a + b * b * b) + T::lit(18.0) * a * b + T::lit(27.0)
}

/// Product form cross-checked against the trace identity and the (a, b)
/// form at real λ; the returned value is the product form.
pub fn discriminant_routes<T: Real>(triple: &MultiplierTriple<T>, t_val: C<T>, lambda: C<T>) -> Result<DiscriminantValue<T>> {
    let prod = discriminant(triple);
    let tr = discriminant_from_trace(t_val, lambda)?;
    let ab = discriminant_ab(t_val, lambda)?;
    let vals = [prod.rho, tr.rho, ab.rho];
    let mut worst = T::zero();
    for i in 0..3 {
        for j in (i + 1)..3 {
            let den = T::one().max(vals[i].norm()).max(vals[j].norm());
            worst = worst.max((vals[i] - vals[j]).norm() / den);
        }
    }
    Ok(DiscriminantValue { cross_residual: worst, ..prod })
}

/// ψ(λ) = τ₃(λ) − (conj τ₃(λ̄))²; vanishes at ramifications in the upper
/// half-plane.
pub fn psi<T: Real>(_sp: &SpectralPoint<T>, tau3: C<T>, tau3_conj: C<T>) -> C<T> {
    tau3 - tau3_conj.conj() * tau3_conj.conj()
}
