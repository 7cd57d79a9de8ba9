use num_traits::Zero;

use super::{ProjectionResult, MIN_CLEARANCE};
use crate::error::{Error, Result};
use crate::linalg::{eigh, inv_sqrt_hpd, ComplexMatrix};
use crate::scalar::{Real, C};

/// Relative Hermitian defect tolerated on input.
const HERMITIAN_TOLERANCE: f64 = 1e-10;

fn require_hermitian<T: Real>(a: &ComplexMatrix<T>) -> Result<()> {
    let defect = a.hermitian_defect();
    if defect > T::tol(HERMITIAN_TOLERANCE) {
        return Err(Error::NotHermitian { defect: defect.as_f64() });
    }
    Ok(())
}

/// `F = (I + A^2)^{-1/2} A` for Hermitian `A`; spectrum in `(-1, 1)`.
pub fn riesz_transform<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    require_hermitian(a)?;
    let h = a.hermitian_part();
    let mut gram = h.matmul(&h).hermitian_part();
    for i in 0..gram.dim() {
        gram[(i, i)] += T::one();
    }
    let s = inv_sqrt_hpd(&gram)?;
    Ok(s.matmul(&h).hermitian_part())
}

/// Orthogonal projection `1_{[c, inf)}(A)` onto eigenvectors with eigenvalue `>= c`.
pub fn aps_projection<T: Real>(a: &ComplexMatrix<T>, c: f64) -> Result<ProjectionResult<T>> {
    require_hermitian(a)?;
    let e = eigh(a)?;
    let gap = e.values.iter().map(|&l| (l.as_f64() - c).abs()).fold(f64::INFINITY, f64::min);
    if gap <= MIN_CLEARANCE {
        return Err(Error::EigenvalueAtCut { distance: gap });
    }
    let n = a.dim();
    let keep: Vec<usize> = (0..n).filter(|&k| e.values[k].as_f64() >= c).collect();
    let v = &e.vectors;
    let p = ComplexMatrix::from_fn(n, |i, j| {
        keep.iter().fold(C::zero(), |acc, &k| acc + v[(i, k)] * v[(j, k)].conj())
    });
    Ok(ProjectionResult::from_matrix(p.hermitian_part(), gap, 0.0, 0.0))
}
