//! Sectorial spectral projections of elliptic operators on the circle.
//!
//! The numerical core is generic over the real scalar (`f32` or `f64`, see
//! [`Real`]); the aliases below fix it to `f64`.
//!
//! - [`linalg`]: dense complex matrices, LU, Schur and Hermitian eigensolvers, norms.
//! - [`contour`]: sector and circle contours with composite Gauss-Legendre rules.
//! - [`symbol1d`]: symbols on `S^1 x R`, their quantization and Sobolev norms.
//! - [`projections`]: Dunford and sectorial projections, oracles, complex powers.
//! - [`topology`]: component indices, spectral flow, Chern numbers.
//! - [`experiments`]: decay-exponent fits and continuity experiments.
//! - [`presets`]: named operators, perturbations and bundles.

pub mod contour;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod presets;
pub mod projections;
pub mod random;
pub mod scalar;
pub mod symbol1d;
pub mod topology;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type CMatrix = linalg::ComplexMatrix<f64>;
pub type Projection = projections::ProjectionResult<f64>;
pub type Symbol = symbol1d::SymbolFunction<f64>;
pub type Operator = symbol1d::DiscretizedOperator<f64>;
pub type Rule = contour::QuadratureRule<f64>;
pub type Bundle = topology::SphereBundleSample<f64>;
