//! General complex eigenproblem: Householder reduction to upper Hessenberg
//! form, then shifted QR sweeps (Givens, Wilkinson shift) to the complex
//! Schur form `A = Z T Z^*`. Eigenvectors come from back-substitution on `T`.

use num_traits::{One, Zero};

use super::{norms::operator_norm_2, ComplexMatrix, LuFactors};
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Sweeps allowed per unit of dimension.
const SWEEPS_PER_DIM: usize = 50;

/// Complex Schur form `A = Z T Z^*`, `T` upper triangular, `Z` unitary.
#[derive(Clone, Debug)]
pub struct Schur<T> {
    pub t: ComplexMatrix<T>,
    pub z: ComplexMatrix<T>,
}

impl<T: Real> Schur<T> {
    pub fn eigenvalues(&self) -> Vec<C<T>> {
        self.t.diagonal()
    }
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    /// Sorted lexicographically by (real, imaginary).
    pub values: Vec<C<T>>,
    /// Unit-norm right eigenvectors as columns, in the order of `values`.
    pub right_vectors: ComplexMatrix<T>,
    /// `1 / sigma_min(V)` for the column-normalized eigenvector matrix;
    /// infinite when `V` is numerically singular.
    pub condition_estimate: T,
}

impl<T: Real> EigenDecomposition<T> {
    /// `V^{-1}`, when the eigenvector matrix is invertible.
    pub fn left_inverse(&self) -> Result<ComplexMatrix<T>> {
        Ok(LuFactors::new(&self.right_vectors)?.inverse())
    }
}

/// Complex Schur decomposition.
pub fn schur<T: Real>(a: &ComplexMatrix<T>) -> Result<Schur<T>> {
    let (t, z) = schur_impl(a, true)?;
    Ok(Schur { t, z: z.expect("schur vectors requested") })
}

/// Eigenvalues only, sorted by (real, imaginary).
pub fn eigenvalues<T: Real>(a: &ComplexMatrix<T>) -> Result<Vec<C<T>>> {
    let (t, _) = schur_impl(a, false)?;
    let mut values = t.diagonal();
    values.sort_by(lex_cmp);
    Ok(values)
}

/// Full eigen-decomposition with condition estimate. Never refuses defective
/// input; the condition estimate reports how far diagonalization is trusted.
pub fn eig<T: Real>(a: &ComplexMatrix<T>) -> Result<EigenDecomposition<T>> {
    let n = a.dim();
    let Schur { t, z } = schur(a)?;
    let x = triangular_eigenvectors(&t);
    let mut v = z.matmul(&x);
    for j in 0..n {
        let norm = (0..n).map(|i| v[(i, j)].norm_sqr()).sum::<T>().sqrt();
        if norm > T::zero() {
            for i in 0..n {
                v[(i, j)] = v[(i, j)] / norm;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag = t.diagonal();
    order.sort_by(|&i, &j| lex_cmp(&diag[i], &diag[j]));
    let values: Vec<C<T>> = order.iter().map(|&i| diag[i]).collect();
    let right_vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);

    let condition_estimate = match LuFactors::new(&right_vectors) {
        Ok(lu) => {
            let inv = lu.inverse();
            if inv.is_finite() {
                operator_norm_2(&inv)
            } else {
                T::infinity()
            }
        }
        Err(_) => T::infinity(),
    };
    Ok(EigenDecomposition { values, right_vectors, condition_estimate })
}

pub(crate) fn lex_cmp<T: Real>(a: &C<T>, b: &C<T>) -> std::cmp::Ordering {
    a.re
        .partial_cmp(&b.re)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
}

fn schur_impl<T: Real>(
    a: &ComplexMatrix<T>,
    want_z: bool,
) -> Result<(ComplexMatrix<T>, Option<ComplexMatrix<T>>)> {
    let n = a.dim();
    let mut h = a.clone();
    let mut z = want_z.then(|| ComplexMatrix::<T>::identity(n));
    hessenberg(&mut h, z.as_mut());
    if n <= 1 {
        return Ok((h, z));
    }

    let eps = T::epsilon();
    let budget = SWEEPS_PER_DIM * n;
    let mut total = 0usize;
    let mut hi = n - 1;
    let mut since_deflation = 0usize;
    let mut rot = Vec::with_capacity(n);

    loop {
        // Deflate negligible subdiagonal entries in the active region.
        for i in 1..=hi {
            let s = (h[(i - 1, i - 1)].l1_norm() + h[(i, i)].l1_norm()).max(T::min_positive_value());
            if h[(i, i - 1)].l1_norm() <= eps * s {
                h[(i, i - 1)] = C::zero();
            }
        }
        while hi > 0 && h[(hi, hi - 1)].is_zero() {
            hi -= 1;
            since_deflation = 0;
        }
        if hi == 0 {
            break;
        }
        let mut lo = hi - 1;
        while lo > 0 && !h[(lo, lo - 1)].is_zero() {
            lo -= 1;
        }

        total += 1;
        since_deflation += 1;
        if total > budget {
            return Err(Error::NoConvergence { iterations: total });
        }

        let shift = if since_deflation % 11 == 10 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + C::new(h[(hi, hi - 1)].norm() * T::lit(0.75), h[(hi, hi - 1)].norm() * T::lit(0.4375))
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        // Explicitly shifted QR step on rows/cols lo..=hi, applied to the
        // full rows and columns so that the final T is the Schur factor.
        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        rot.clear();
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rot.push((c, s));
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + y * s.conj();
                h[(k + 1, j)] = -x * s + y * c;
            }
        }
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let k = lo + idx;
            let rmax = (k + 2).min(hi + 1);
            for i in 0..rmax {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s;
                h[(i, k + 1)] = -x * s.conj() + y * c;
            }
            if let Some(z) = z.as_mut() {
                for i in 0..n {
                    let x = z[(i, k)];
                    let y = z[(i, k + 1)];
                    z[(i, k)] = x * c + y * s;
                    z[(i, k + 1)] = -x * s.conj() + y * c;
                }
            }
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }

    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = C::zero();
        }
    }
    Ok((h, z))
}

/// Rotation `G = [[c, conj(s)], [-s, c]]` with real `c` such that
/// `G [a; b] = [r; 0]`.
fn givens<T: Real>(a: C<T>, b: C<T>) -> (T, C<T>) {
    let an = a.norm();
    let bn = b.norm();
    if bn.is_zero() {
        return (T::one(), C::zero());
    }
    if an.is_zero() {
        return (T::zero(), b / bn);
    }
    let r = an.hypot(bn);
    (an / r, b * a.conj() / (an * r))
}

fn wilkinson_shift<T: Real>(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> C<T> {
    let half = T::lit(0.5);
    let tr = (a + d) * half;
    let disc = ((a - d) * half * ((a - d) * half) + b * c).sqrt();
    let l1 = tr + disc;
    let l2 = tr - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn hessenberg<T: Real>(h: &mut ComplexMatrix<T>, mut z: Option<&mut ComplexMatrix<T>>) {
    let n = h.dim();
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x: Vec<C<T>> = (0..m).map(|i| h[(k + 1 + i, k)]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm.is_zero() {
            continue;
        }
        let phase = if x[0].norm().is_zero() { C::one() } else { x[0] / x[0].norm() };
        let alpha = -phase * norm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm2 = v.iter().map(|z| z.norm_sqr()).sum::<T>();
        if vnorm2.is_zero() {
            continue;
        }
        let tau = T::lit(2.0) / vnorm2;
        let off = k + 1;

        // Left: H <- (I - tau v v^*) H on rows off.., columns k..
        for j in k..n {
            let s = (0..m).fold(C::zero(), |acc, i| acc + v[i].conj() * h[(off + i, j)]) * tau;
            for i in 0..m {
                h[(off + i, j)] -= v[i] * s;
            }
        }
        // Right: H <- H (I - tau v v^*) on all rows, columns off..
        for r in 0..n {
            let row = &mut h.row_mut(r)[off..];
            let s = row.iter().zip(&v).fold(C::zero(), |acc, (&x, &vj)| acc + x * vj) * tau;
            for (x, &vj) in row.iter_mut().zip(&v) {
                *x -= s * vj.conj();
            }
        }
        h[(off, k)] = alpha;
        for i in 1..m {
            h[(off + i, k)] = C::zero();
        }
        if let Some(z) = z.as_deref_mut() {
            for r in 0..n {
                let row = &mut z.row_mut(r)[off..];
                let s = row.iter().zip(&v).fold(C::zero(), |acc, (&x, &vj)| acc + x * vj) * tau;
                for (x, &vj) in row.iter_mut().zip(&v) {
                    *x -= s * vj.conj();
                }
            }
        }
    }
}

/// Eigenvectors of an upper-triangular matrix as columns (unnormalized).
fn triangular_eigenvectors<T: Real>(t: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let n = t.dim();
    let small = (T::epsilon() * t.frobenius_norm()).max(T::min_positive_value());
    let big = T::lit(1e100);
    let mut x = ComplexMatrix::zeros(n);
    let mut col = vec![C::<T>::zero(); n];
    for k in 0..n {
        col.iter_mut().for_each(|c| *c = C::zero());
        col[k] = C::one();
        let lambda = t[(k, k)];
        for i in (0..k).rev() {
            let s = (i + 1..=k).fold(C::<T>::zero(), |acc, j| acc + t[(i, j)] * col[j]);
            let mut d = t[(i, i)] - lambda;
            if d.norm() < small {
                d = C::new(small, T::zero());
            }
            col[i] = -s / d;
            if col[i].norm() > big {
                let scale = T::one() / col[i].norm();
                for c in col.iter_mut().take(k + 1) {
                    *c = *c * scale;
                }
            }
        }
        for i in 0..=k {
            x[(i, k)] = col[i];
        }
    }
    x
}
