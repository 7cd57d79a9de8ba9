//! Spectral projections: the closed-contour (Dunford) projection, the sectorial
//! projection through the factorized integral, eigen-decomposition oracles,
//! the Riesz transform, APS projections and complex powers.

mod hermitian;
mod oracle;
mod powers;
mod resolvent_sum;

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use hermitian::{aps_projection, riesz_transform};
pub use oracle::{eigen_projection_oracle, Region};
pub use powers::{complex_log, complex_power, wodzicki_residual};

use crate::contour::{quad_nodes, spectrum_clearance, ContourKind, ContourSpec};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, operator_norm_2, schur, ComplexMatrix};
use crate::scalar::{Real, C};
use crate::symbol1d::DiscretizedOperator;

/// Minimum distance between the spectrum and the contour.
pub const MIN_CLEARANCE: f64 = 1e-6;
/// Largest `|trace - rank|` for which a projection counts as resolved.
pub const RESOLVED_TRACE_TOLERANCE: f64 = 0.1;
/// Dimension above which [`Method::Auto`] switches to the Schur path.
pub const SCHUR_THRESHOLD: usize = 96;

/// How the node-wise resolvents are formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// One LU factorization per node.
    Dense,
    /// One Schur decomposition, then a triangular inverse per node.
    Schur,
    /// `Dense` up to [`SCHUR_THRESHOLD`], `Schur` above.
    #[default]
    Auto,
}

impl Method {
    fn resolve(self, n: usize) -> Self {
        match self {
            Method::Auto if n > SCHUR_THRESHOLD => Method::Schur,
            Method::Auto => Method::Dense,
            m => m,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProjectionResult<T> {
    pub p: ComplexMatrix<T>,
    /// `||P^2 - P||_2`.
    pub idempotency_defect: f64,
    /// Rounded real part of the trace.
    pub rank_estimate: usize,
    pub trace: Complex64,
    /// Distance from the spectrum to the contour or region boundary.
    pub contour_clearance: f64,
    /// Quadrature truncation estimate of the rule used; zero for exact oracles.
    pub truncation_error_estimate: f64,
    /// Floating-point error scale of the node sum.
    pub roundoff_estimate: f64,
    /// Eigenvalues of modulus below the arc radius (sector contours only);
    /// they belong to neither sector and are excluded from `P`.
    pub eigenvalues_inside_arc: usize,
}

impl<T: Real> ProjectionResult<T> {
    pub(crate) fn from_matrix(p: ComplexMatrix<T>, clearance: f64, truncation: f64, roundoff: f64) -> Self {
        let trace = p.trace();
        let trace = Complex64::new(trace.re.as_f64(), trace.im.as_f64());
        let idempotency_defect = operator_norm_2(&(&p.matmul(&p) - &p)).as_f64();
        Self {
            p,
            idempotency_defect,
            rank_estimate: trace.re.round().max(0.0) as usize,
            trace,
            contour_clearance: clearance,
            truncation_error_estimate: truncation,
            roundoff_estimate: roundoff,
            eigenvalues_inside_arc: 0,
        }
    }

    /// Trace within [`RESOLVED_TRACE_TOLERANCE`] of the rank estimate.
    pub fn resolved(&self) -> bool {
        (self.trace.re - self.rank_estimate as f64).abs() <= RESOLVED_TRACE_TOLERANCE
            && self.trace.im.abs() <= RESOLVED_TRACE_TOLERANCE
    }

    /// Truncation plus rounding estimate.
    pub fn error_estimate(&self) -> f64 {
        self.truncation_error_estimate + self.roundoff_estimate
    }

    pub fn record(&self, include_matrix: bool) -> ProjectionRecord {
        let matrix = include_matrix.then(|| {
            (0..self.p.dim())
                .map(|i| self.p.row(i).iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect())
                .collect()
        });
        ProjectionRecord {
            dim: self.p.dim(),
            rank_estimate: self.rank_estimate,
            trace: [self.trace.re, self.trace.im],
            resolved: self.resolved(),
            idempotency_defect: self.idempotency_defect,
            contour_clearance: self.contour_clearance,
            truncation_error_estimate: self.truncation_error_estimate,
            roundoff_estimate: self.roundoff_estimate,
            eigenvalues_inside_arc: self.eigenvalues_inside_arc,
            matrix,
        }
    }
}

/// Serializable summary of a [`ProjectionResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionRecord {
    pub dim: usize,
    pub rank_estimate: usize,
    pub trace: [f64; 2],
    pub resolved: bool,
    pub idempotency_defect: f64,
    pub contour_clearance: f64,
    pub truncation_error_estimate: f64,
    pub roundoff_estimate: f64,
    pub eigenvalues_inside_arc: usize,
    /// Row-major `[re, im]` entries when requested.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

fn to_c64<T: Real>(z: C<T>) -> Complex64 {
    Complex64::new(z.re.as_f64(), z.im.as_f64())
}

fn minus_one_over_two_pi_i<T: Real>() -> C<T> {
    // -1 / (2 pi i) = i / (2 pi).
    C::new(T::zero(), T::one() / T::two_pi())
}

/// `P = -(1/2 pi i) sum_i w_i (A - lambda_i)^-1` over a closed circle,
/// projecting onto the generalized eigenspaces inside it.
pub fn bounded_spectral_projection<T: Real>(a: &ComplexMatrix<T>, c: &ContourSpec) -> Result<ProjectionResult<T>> {
    bounded_spectral_projection_with(a, c, Method::Auto)
}

pub fn bounded_spectral_projection_with<T: Real>(
    a: &ComplexMatrix<T>,
    c: &ContourSpec,
    method: Method,
) -> Result<ProjectionResult<T>> {
    c.require(ContourKind::ClosedCircle)?;
    c.validate()?;
    let rule = quad_nodes::<T>(c);
    let n = a.dim();
    let scale = minus_one_over_two_pi_i::<T>();
    let (p, clearance, magnitude) = match method.resolve(n) {
        Method::Schur => {
            let s = schur(a)?;
            let clearance = check_clearance(&s.eigenvalues(), c)?;
            let sum = resolvent_sum::triangular(&s, &rule.nodes, &rule.weights)?;
            let p = s.z.matmul(&sum.sum).matmul(&s.z.adjoint()).scale(scale);
            (p, clearance, sum.magnitude)
        }
        _ => {
            let clearance = check_clearance(&eigenvalues(a)?, c)?;
            let sum = resolvent_sum::dense(a, &rule.nodes, &rule.weights)?;
            (sum.sum.scale(scale), clearance, sum.magnitude)
        }
    };
    let roundoff = roundoff_floor::<T>(n, magnitude, 1.0);
    Ok(ProjectionResult::from_matrix(p, clearance, rule.truncation_error_estimate, roundoff))
}

/// Sectorial projection `P = -(1/2 pi i) A Phi(A)` with
/// `Phi(A) = sum_i w_i lambda_i^-1 (A - lambda_i)^-1` formed first.
pub fn sectorial_projection<T: Real>(a: &ComplexMatrix<T>, c: &ContourSpec) -> Result<ProjectionResult<T>> {
    sectorial_projection_with(a, c, Method::Auto)
}

/// [`sectorial_projection`] of a discretized operator's matrix.
pub fn sectorial_projection_op<T: Real>(a: &DiscretizedOperator<T>, c: &ContourSpec) -> Result<ProjectionResult<T>> {
    sectorial_projection_with(&a.matrix, c, Method::Auto)
}

pub fn sectorial_projection_with<T: Real>(
    a: &ComplexMatrix<T>,
    c: &ContourSpec,
    method: Method,
) -> Result<ProjectionResult<T>> {
    c.require(ContourKind::Sector)?;
    c.validate()?;
    let rule = quad_nodes::<T>(c);
    let coeffs: Vec<C<T>> = rule.nodes.iter().zip(&rule.weights).map(|(&l, &w)| w / l).collect();
    let n = a.dim();
    let scale = minus_one_over_two_pi_i::<T>();
    let (p, values, magnitude) = match method.resolve(n) {
        Method::Schur => {
            let s = schur(a)?;
            let values = s.eigenvalues();
            check_clearance(&values, c)?;
            let sum = resolvent_sum::triangular(&s, &rule.nodes, &coeffs)?;
            // A Phi = Z T Phi_T Z^*.
            let p = s.z.matmul(&s.t.matmul(&sum.sum)).matmul(&s.z.adjoint()).scale(scale);
            (p, values, sum.magnitude)
        }
        _ => {
            let values = eigenvalues(a)?;
            check_clearance(&values, c)?;
            let sum = resolvent_sum::dense(a, &rule.nodes, &coeffs)?;
            (a.matmul(&sum.sum).scale(scale), values, sum.magnitude)
        }
    };
    let clearance = spectrum_clearance(&values, c);
    let norm_a = operator_norm_2(a).as_f64();
    let roundoff = roundoff_floor::<T>(n, magnitude, norm_a.max(1.0));
    let mut result = ProjectionResult::from_matrix(p, clearance, rule.truncation_error_estimate, roundoff);
    result.eigenvalues_inside_arc = values.iter().filter(|z| to_c64(**z).norm() < c.r).count();
    Ok(result)
}

fn check_clearance<T: Real>(values: &[C<T>], c: &ContourSpec) -> Result<f64> {
    let clearance = spectrum_clearance(values, c);
    if clearance <= MIN_CLEARANCE {
        return Err(Error::SpectrumOnContour { clearance });
    }
    Ok(clearance)
}

/// Rounding scale `16 eps n (1/2 pi) sum |c_i| ||R_i||_F * outer`.
fn roundoff_floor<T: Real>(n: usize, magnitude: f64, outer: f64) -> f64 {
    16.0 * T::epsilon().as_f64() * n.max(1) as f64 * magnitude / TAU * outer
}

#[cfg(test)]
mod tests;
