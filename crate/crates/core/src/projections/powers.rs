use std::f64::consts::TAU;

use num_complex::Complex64;

use super::sectorial_projection;
use crate::contour::{sector_opening, ContourSpec};
use crate::error::{Error, Result};
use crate::linalg::{eig, operator_norm_2, ComplexMatrix};
use crate::scalar::{Real, C};

use super::oracle::MAX_ORACLE_CONDITION;

/// Angular distance below which an eigenvalue counts as lying on the cut.
const CUT_TOLERANCE: f64 = 1e-10;
/// Modulus below which an eigenvalue counts as zero.
const ZERO_TOLERANCE: f64 = 1e-14;
/// Most rule doublings tried by [`wodzicki_residual`].
const MAX_REFINEMENTS: usize = 4;
/// Relative change in `P` at which refinement stops.
const REFINEMENT_TOLERANCE: f64 = 1e-13;

/// `log_alpha(mu) = ln|mu| + i arg(mu)` with `arg(mu)` in `(alpha - 2 pi, alpha)`,
/// the branch cut along the ray `arg = alpha`.
pub fn complex_log(mu: Complex64, alpha: f64) -> Result<Complex64> {
    let modulus = mu.norm();
    if modulus <= ZERO_TOLERANCE {
        return Err(Error::EigenvalueZero { modulus });
    }
    let delta = (alpha - mu.arg()).rem_euclid(TAU);
    if delta < CUT_TOLERANCE || delta > TAU - CUT_TOLERANCE {
        return Err(Error::EigenvalueOnCut { angle: mu.arg() });
    }
    Ok(Complex64::new(modulus.ln(), alpha - delta))
}

/// `A^s = V diag(exp(s log_alpha(lambda_i))) V^-1` for diagonalizable `A`.
pub fn complex_power<T: Real>(a: &ComplexMatrix<T>, s: Complex64, alpha: f64) -> Result<ComplexMatrix<T>> {
    let e = eig(a)?;
    let condition = e.condition_estimate.as_f64();
    if !(condition <= MAX_ORACLE_CONDITION) {
        return Err(Error::TooDefective { condition });
    }
    let mut d = Vec::with_capacity(e.values.len());
    for z in &e.values {
        let mu = Complex64::new(z.re.as_f64(), z.im.as_f64());
        let p = (s * complex_log(mu, alpha)?).exp();
        d.push(C::new(T::lit(p.re), T::lit(p.im)));
    }
    let vinv = e.left_inverse()?;
    Ok(e.right_vectors.matmul(&ComplexMatrix::from_diag(&d)).matmul(&vinv))
}

/// `|| A^s_{alpha2} - A^s_{alpha1} - (1 - e^{2 pi i s}) P A^s_{alpha2} ||_2`
/// with `P` the sectorial projection for `c`. Every eigenvalue must lie
/// outside the arc, otherwise the identity does not hold.
///
/// `||A^s||` can reach `e^{2 pi |Im s|}` times `|lambda|^{Re s}`, which
/// magnifies quadrature error in `P`, so the rule of `c` is doubled until
/// `P` stops changing (at most four times).
///
/// The exit angle is taken as `alpha1 - theta` with
/// `theta = (alpha1 - alpha2) mod 2 pi`, so the `alpha2` power is the one
/// reached by turning the cut clockwise from `alpha1` across the sector.
pub fn wodzicki_residual<T: Real>(
    a: &ComplexMatrix<T>,
    s: Complex64,
    alpha1: f64,
    alpha2: f64,
    c: &ContourSpec,
) -> Result<f64> {
    let theta = sector_opening(alpha1, alpha2);
    let same_ray = |x: f64, y: f64| {
        let d = (x - y).rem_euclid(TAU);
        d.min(TAU - d) < 1e-12
    };
    if !same_ray(c.alpha1, alpha1) || !same_ray(c.alpha2, alpha2) {
        return Err(Error::InvalidAngles {
            reason: format!(
                "contour rays ({}, {}) differ from the power cuts ({alpha1}, {alpha2})",
                c.alpha1, c.alpha2
            ),
        });
    }
    let mut p = sectorial_projection(a, c)?;
    let mut spec = *c;
    for _ in 0..MAX_REFINEMENTS {
        spec = spec.with_resolution(spec.resolution.refined());
        let finer = sectorial_projection(a, &spec)?;
        let change = operator_norm_2(&(&finer.p - &p.p)).as_f64();
        let scale = operator_norm_2(&finer.p).as_f64().max(1.0);
        p = finer;
        if change <= T::tol(REFINEMENT_TOLERANCE).as_f64() * scale {
            break;
        }
    }
    if p.eigenvalues_inside_arc > 0 {
        return Err(Error::InvalidRadii {
            reason: format!(
                "{} eigenvalue(s) of modulus below R = {}; the powers differ on them but P excludes them",
                p.eigenvalues_inside_arc, c.r
            ),
        });
    }
    let a1 = complex_power(a, s, alpha1)?;
    let a2 = complex_power(a, s, alpha1 - theta)?;
    let factor = Complex64::new(1.0, 0.0) - (Complex64::new(0.0, TAU) * s).exp();
    let factor = C::new(T::lit(factor.re), T::lit(factor.im));
    let rhs = p.p.matmul(&a2).scale(factor);
    let residual = &(&a2 - &a1) - &rhs;
    Ok(operator_norm_2(&residual).as_f64())
}
