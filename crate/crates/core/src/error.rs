use thiserror::Error;

/// Errors raised by the numerical core.
///
/// Magnitudes are reported as `f64` regardless of the scalar type used for
/// the computation.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("singular matrix: pivot magnitude {pivot_magnitude:e} below threshold")]
    SingularMatrix { pivot_magnitude: f64 },
    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("matrix is not Hermitian (relative defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not positive definite (smallest eigenvalue {min_eig:e})")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("matrix parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("invalid sector angles: {reason}")]
    InvalidAngles { reason: String },
    #[error("invalid contour radii: {reason}")]
    InvalidRadii { reason: String },
    #[error("invalid quadrature resolution: {reason}")]
    InvalidResolution { reason: String },
    #[error("contour of kind `{found}` where `{expected}` is required")]
    WrongContourKind { expected: &'static str, found: &'static str },

    #[error("symbol inversion failed at theta = {theta}, xi = {xi}")]
    SymbolSingular { theta: f64, xi: f64 },
    #[error("symbol evaluates to a non-finite value at theta = {theta}, xi = {xi}")]
    SymbolNonFinite { theta: f64, xi: f64 },
    #[error("invalid symbol or discretization parameter: {reason}")]
    InvalidSymbol { reason: String },

    #[error("spectrum lies on the contour (clearance {clearance:e})")]
    SpectrumOnContour { clearance: f64 },
    #[error("eigenvector matrix too ill-conditioned (condition estimate {condition:e})")]
    TooDefective { condition: f64 },
    #[error("eigenvalue within {distance:e} of the region boundary")]
    EigenvalueOnBoundary { distance: f64 },
    #[error("eigenvalue within {distance:e} of the cut value")]
    EigenvalueAtCut { distance: f64 },
    #[error("eigenvalue on the branch cut ray (angle {angle})")]
    EigenvalueOnCut { angle: f64 },
    #[error("zero eigenvalue (modulus {modulus:e}) has no complex power")]
    EigenvalueZero { modulus: f64 },

    #[error("eigenvalue with real part {real_part:e} on the imaginary axis")]
    EigenvalueOnAxis { real_part: f64 },
    #[error("eigenvalue on the imaginary axis at path parameter t = {t}")]
    EigenvalueOnAxisAt { t: f64 },
    #[error("path endpoint at t = {t} touches the imaginary axis")]
    EndpointOnAxis { t: f64 },
    #[error("invalid matrix path: {reason}")]
    InvalidPath { reason: String },
    #[error("invalid projector family: {reason}")]
    InvalidBundle { reason: String },
    #[error("Chern sum not safely integral (residual {residual})")]
    RoundingUnsafe { residual: f64 },

    #[error("log-log fit needs at least {min_samples} samples spanning {min_decades} decades")]
    InsufficientSpan { min_samples: usize, min_decades: f64 },
    #[error("log-log fit needs positive samples (got x = {x}, y = {y})")]
    NonPositiveSample { x: f64, y: f64 },
    #[error("sampling ray at angle {angle} hits the spectrum (distance {distance:e})")]
    RayHitsSpectrum { angle: f64, distance: f64 },
    #[error("|lambda| up to {lambda_max} exceeds the resolved-mode ceiling {ceiling}")]
    RangeOutsideResolvedRegime { lambda_max: f64, ceiling: f64 },
    #[error("contour clearance lost at epsilon = {epsilon}")]
    ClearanceLost { epsilon: f64 },
    #[error("invalid experiment parameter: {reason}")]
    InvalidExperiment { reason: String },
    #[error("report serialization failed: {0}")]
    Serialization(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
