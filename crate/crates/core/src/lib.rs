//! Spectral data of the third-order periodic operator
//! `H = i∂³ + ip∂ + i∂p + q` on the line: monodromy matrix, multipliers,
//! discriminant, multiplicity-3 bands, ramifications, periodic and
//! antiperiodic eigenvalues, and the small-coupling band law.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the `*64` aliases fix double precision, which is what
//! the numerical tolerances are tuned for.

pub mod coeffs;
pub mod eigenvalues;
pub mod cubic;
pub mod error;
pub mod linalg;
pub mod monodromy;
pub mod multipliers;
pub mod ode;
pub mod quadrature;
pub mod roots;
pub mod scalar;
pub mod small_coupling;
pub mod spectrum_scan;

pub use coeffs::{Coefficients, Field, Kappa};
pub use eigenvalues::{EigenKind, EigenvalueList};
pub use error::{Error, Result};
pub use linalg::Mat3;
pub use monodromy::{point, propagate, propagate_scaled, Monodromy, SpectralPoint};
pub use ode::IntegratorOptions;
pub use scalar::{Real, C};

pub type Complex64 = num_complex::Complex<f64>;
pub type Coefficients64 = Coefficients<f64>;
pub type SpectralPoint64 = SpectralPoint<f64>;
pub type Monodromy64 = Monodromy<f64>;
pub type IntegratorOptions64 = IntegratorOptions<f64>;
