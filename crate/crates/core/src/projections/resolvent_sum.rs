//! Weighted resolvent sums `sum_i c_i (A - lambda_i)^-1` over quadrature nodes.

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, LuFactors, Schur};
use crate::scalar::{Real, C};

/// Nodes per reduction chunk. Chunks are summed in index order, so the result
/// does not depend on the number of worker threads.
const CHUNK: usize = 16;

/// Sum plus `sum_i |c_i| ||(A - lambda_i)^-1||_F`, the scale of the rounding
/// error committed while forming it.
pub(crate) struct WeightedSum<T> {
    pub sum: ComplexMatrix<T>,
    pub magnitude: f64,
}

fn reduce<T: Real>(parts: Vec<Result<WeightedSum<T>>>, n: usize) -> Result<WeightedSum<T>> {
    let mut total = WeightedSum { sum: ComplexMatrix::zeros(n), magnitude: 0.0 };
    for p in parts {
        let p = p?;
        total.sum += &p.sum;
        total.magnitude += p.magnitude;
    }
    Ok(total)
}

/// Direct LU inverse at each node.
pub(crate) fn dense<T: Real>(a: &ComplexMatrix<T>, nodes: &[C<T>], coeffs: &[C<T>]) -> Result<WeightedSum<T>> {
    let n = a.dim();
    let parts: Vec<Result<WeightedSum<T>>> = nodes
        .par_chunks(CHUNK)
        .zip(coeffs.par_chunks(CHUNK))
        .map(|(ls, cs)| {
            let mut acc = WeightedSum { sum: ComplexMatrix::zeros(n), magnitude: 0.0 };
            for (&l, &c) in ls.iter().zip(cs) {
                let lu = LuFactors::new(&a.shifted(l)).map_err(|_| Error::SpectrumOnContour { clearance: 0.0 })?;
                let r = lu.inverse();
                acc.magnitude += (c.norm() * r.frobenius_norm()).as_f64();
                acc.sum.axpy(c, &r);
            }
            Ok(acc)
        })
        .collect();
    reduce(parts, n)
}

/// Triangular variant on the Schur factor: returns `sum_i c_i (T - lambda_i)^-1`
/// (still in Schur coordinates).
pub(crate) fn triangular<T: Real>(schur: &Schur<T>, nodes: &[C<T>], coeffs: &[C<T>]) -> Result<WeightedSum<T>> {
    let t = &schur.t;
    let n = t.dim();
    let parts: Vec<Result<WeightedSum<T>>> = nodes
        .par_chunks(CHUNK)
        .zip(coeffs.par_chunks(CHUNK))
        .map(|(ls, cs)| {
            let mut acc = WeightedSum { sum: ComplexMatrix::zeros(n), magnitude: 0.0 };
            let mut x = vec![C::zero(); n];
            let mut inv_diag = vec![C::zero(); n];
            let tiny = T::tol(1e-13) * t.max_abs().max(T::one());
            for (&l, &c) in ls.iter().zip(cs) {
                for (i, d) in inv_diag.iter_mut().enumerate() {
                    let u = t[(i, i)] - l;
                    if u.norm() <= tiny {
                        return Err(Error::SpectrumOnContour { clearance: u.norm().as_f64() });
                    }
                    *d = u.inv();
                }
                let mut frob = T::zero();
                // Column j of (T - l)^-1 by back substitution.
                for j in 0..n {
                    x[j] = inv_diag[j];
                    for i in (0..j).rev() {
                        let row = &t.row(i)[i + 1..=j];
                        let s = row.iter().zip(&x[i + 1..=j]).fold(C::<T>::zero(), |s: C<T>, (&u, &v)| s + u * v);
                        x[i] = -s * inv_diag[i];
                    }
                    for i in 0..=j {
                        frob += x[i].norm_sqr();
                        acc.sum[(i, j)] += c * x[i];
                    }
                }
                acc.magnitude += (c.norm() * frob.sqrt()).as_f64();
            }
            Ok(acc)
        })
        .collect();
    reduce(parts, n)
}
