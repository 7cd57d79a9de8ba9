//! Hermitian eigensolver: Householder reduction to real symmetric tridiagonal
//! form followed by the implicit QL iteration.

use num_traits::{One, Zero};

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Eigen-decomposition `H = V diag(values) V^*` with orthonormal columns in `V`.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    /// Ascending.
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

/// Eigenvalues and eigenvectors of the Hermitian part of `h`.
pub fn eigh<T: Real>(h: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    let (values, vectors) = decompose(h, true)?;
    Ok(HermitianEigen { values, vectors: vectors.expect("vectors requested") })
}

/// Eigenvalues (ascending) of the Hermitian part of `h`.
pub fn eigvalsh<T: Real>(h: &ComplexMatrix<T>) -> Result<Vec<T>> {
    Ok(decompose(h, false)?.0)
}

fn decompose<T: Real>(
    h: &ComplexMatrix<T>,
    want_vectors: bool,
) -> Result<(Vec<T>, Option<ComplexMatrix<T>>)> {
    let n = h.dim();
    if n == 0 {
        return Ok((vec![], want_vectors.then(|| ComplexMatrix::zeros(0))));
    }
    let mut a = h.hermitian_part();
    let mut q = want_vectors.then(|| ComplexMatrix::<T>::identity(n));

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x: Vec<C<T>> = (0..m).map(|i| a[(k + 1 + i, k)]).collect();
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

        // Trailing block S <- H S H with H = I - tau v v^*.
        let off = k + 1;
        let mut u = vec![C::zero(); m];
        for i in 0..m {
            let row = &a.row(off + i)[off..];
            u[i] = row.iter().zip(&v).fold(C::zero(), |acc, (&s, &vj)| acc + s * vj) * tau;
        }
        let vu = v.iter().zip(&u).fold(C::zero(), |acc, (&vi, &ui)| acc + vi.conj() * ui);
        let kk = vu * (tau * T::lit(0.5));
        let w: Vec<C<T>> = u.iter().zip(&v).map(|(&ui, &vi)| ui - kk * vi).collect();
        for i in 0..m {
            let (vi, wi) = (v[i], w[i]);
            let row = &mut a.row_mut(off + i)[off..];
            for j in 0..m {
                row[j] -= vi * w[j].conj() + wi * v[j].conj();
            }
        }
        a[(off, k)] = alpha;
        a[(k, off)] = alpha.conj();
        for i in 1..m {
            a[(off + i, k)] = C::zero();
            a[(k, off + i)] = C::zero();
        }

        if let Some(q) = q.as_mut() {
            for r in 0..n {
                let row = &mut q.row_mut(r)[off..];
                let t = row.iter().zip(&v).fold(C::zero(), |acc, (&qr, &vj)| acc + qr * vj) * tau;
                for (qr, &vj) in row.iter_mut().zip(&v) {
                    *qr -= t * vj.conj();
                }
            }
        }
    }

    // Unitary diagonal gauge making the subdiagonal real and nonnegative.
    let mut d: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut e = vec![T::zero(); n];
    let mut gauge = vec![C::<T>::one(); n];
    for i in 1..n {
        let s = a[(i, i - 1)];
        let mag = s.norm();
        e[i] = mag;
        gauge[i] = if mag.is_zero() { gauge[i - 1] } else { gauge[i - 1] * (s / mag) };
    }

    let mut z = want_vectors.then(|| {
        let mut z = vec![T::zero(); n * n];
        for i in 0..n {
            z[i * n + i] = T::one();
        }
        z
    });
    tql2(&mut d, &mut e, z.as_deref_mut(), n)?;

    // Ascending sort.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<T> = order.iter().map(|&i| d[i]).collect();

    let vectors = match (q, z) {
        (Some(q), Some(z)) => {
            // V = Q * D * W.
            let dw = ComplexMatrix::from_fn(n, |i, j| gauge[i] * z[i * n + order[j]]);
            Some(q.matmul(&dw))
        }
        _ => None,
    };
    Ok((values, vectors))
}

/// Implicit QL on a real symmetric tridiagonal matrix. `e[i]` holds the
/// subdiagonal entry `(i, i-1)`; `e[0]` is ignored. `z` (row-major n x n)
/// accumulates the rotations when present.
fn tql2<T: Real>(d: &mut [T], e: &mut [T], mut z: Option<&mut [T]>, n: usize) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();

    let eps = T::epsilon();
    let max_iter = 30 * n.max(1);
    let mut f = T::zero();
    let mut tst1 = T::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(Error::NoConvergence { iterations: iter });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (T::lit(2.0) * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        for k in 0..n {
                            let zk = &mut z[k * n..(k + 1) * n];
                            let h = zk[i + 1];
                            zk[i + 1] = s * zk[i] + c * h;
                            zk[i] = c * zk[i] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    Ok(())
}
