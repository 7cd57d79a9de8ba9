use num_complex::Complex64;
use num_traits::Zero;

use super::{ProjectionResult, MIN_CLEARANCE};
use crate::contour::ContourSpec;
use crate::error::{Error, Result};
use crate::linalg::{eig, ComplexMatrix};
use crate::scalar::Real;

/// Largest eigenvector condition number the oracle accepts.
pub const MAX_ORACLE_CONDITION: f64 = 1e8;

/// Region of the complex plane selected by an eigen-projection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    /// `Re z > 0`.
    RightHalfPlane,
    /// `Re z < 0`.
    LeftHalfPlane,
    /// `Im z > 0`.
    UpperHalfPlane,
    /// `Re z >= c` on the real line; the boundary is `Re z = c`.
    RealAtLeast(f64),
    /// The region a contour encloses (outer sector or disk).
    Enclosed(ContourSpec),
}

impl Region {
    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Region::RightHalfPlane => z.re > 0.0,
            Region::LeftHalfPlane => z.re < 0.0,
            Region::UpperHalfPlane => z.im > 0.0,
            Region::RealAtLeast(c) => z.re >= c,
            Region::Enclosed(ref spec) => spec.encloses(z),
        }
    }

    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        match *self {
            Region::RightHalfPlane | Region::LeftHalfPlane => z.re.abs(),
            Region::UpperHalfPlane => z.im.abs(),
            Region::RealAtLeast(c) => (z.re - c).abs(),
            Region::Enclosed(ref spec) => spec.distance(z),
        }
    }
}

/// `P = V diag(1_region(lambda_i)) V^-1` from the eigen-decomposition.
pub fn eigen_projection_oracle<T: Real>(a: &ComplexMatrix<T>, region: &Region) -> Result<ProjectionResult<T>> {
    let e = eig(a)?;
    let condition = e.condition_estimate.as_f64();
    if !(condition <= MAX_ORACLE_CONDITION) {
        return Err(Error::TooDefective { condition });
    }
    let mut clearance = f64::INFINITY;
    let mut mask = Vec::with_capacity(e.values.len());
    for z in &e.values {
        let z = Complex64::new(z.re.as_f64(), z.im.as_f64());
        let d = region.boundary_distance(z);
        if d <= MIN_CLEARANCE {
            return Err(Error::EigenvalueOnBoundary { distance: d });
        }
        clearance = clearance.min(d);
        mask.push(region.contains(z));
    }
    let v = &e.right_vectors;
    let vinv = e.left_inverse()?;
    let n = a.dim();
    let mut p = ComplexMatrix::zeros(n);
    for (k, &keep) in mask.iter().enumerate() {
        if !keep {
            continue;
        }
        for i in 0..n {
            let vik = v[(i, k)];
            if vik.is_zero() {
                continue;
            }
            let row = p.row_mut(i);
            for (j, out) in row.iter_mut().enumerate() {
                *out += vik * vinv[(k, j)];
            }
        }
    }
    Ok(ProjectionResult::from_matrix(p, clearance, 0.0, 0.0))
}
