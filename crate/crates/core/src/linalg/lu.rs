use num_traits::{One, Zero};

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Relative pivot threshold in double precision; scaled by epsilon for other types.
const PIVOT_THRESHOLD: f64 = 1e-13;

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct LuFactors<T> {
    lu: ComplexMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> LuFactors<T> {
    pub fn new(a: &ComplexMatrix<T>) -> Result<Self> {
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let threshold = T::tol(PIVOT_THRESHOLD) * a.max_abs();

        for k in 0..n {
            let (p, pivot_mag) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_mag <= threshold || pivot_mag.is_zero() {
                return Err(Error::SingularMatrix { pivot_magnitude: pivot_mag.as_f64() });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let inv_pivot = lu[(k, k)].inv();
            let (head, tail) = lu.as_mut_slice().split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..];
            for row in tail.chunks_mut(n) {
                let l = row[k] * inv_pivot;
                row[k] = l;
                if l.is_zero() {
                    continue;
                }
                for (r, &u) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                    *r -= l * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.dim()
    }

    /// Solves `A X = B` for a square right-hand side.
    pub fn solve(&self, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let n = self.dim();
        assert_eq!(b.dim(), n, "solve dimension mismatch");
        // Work on rows: X_i = (Y_i - sum_{k>i} U_ik X_k) / U_ii.
        let mut x = ComplexMatrix::from_fn(n, |i, j| b[(self.perm[i], j)]);
        for i in 0..n {
            let (done, rest) = x.as_mut_slice().split_at_mut(i * n);
            let xi = &mut rest[..n];
            for k in 0..i {
                let l = self.lu[(i, k)];
                if l.is_zero() {
                    continue;
                }
                for (a, &b) in xi.iter_mut().zip(&done[k * n..(k + 1) * n]) {
                    *a -= l * b;
                }
            }
        }
        for i in (0..n).rev() {
            let (head, tail) = x.as_mut_slice().split_at_mut((i + 1) * n);
            let xi = &mut head[i * n..];
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                if u.is_zero() {
                    continue;
                }
                let xk = &tail[(k - i - 1) * n..(k - i) * n];
                for (a, &b) in xi.iter_mut().zip(xk) {
                    *a -= u * b;
                }
            }
            let inv = self.lu[(i, i)].inv();
            for a in xi.iter_mut() {
                *a *= inv;
            }
        }
        x
    }

    pub fn solve_vec(&self, b: &[C<T>]) -> Vec<C<T>> {
        let n = self.dim();
        assert_eq!(b.len(), n, "solve dimension mismatch");
        let mut y: Vec<C<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s = (0..i).fold(C::zero(), |acc, k| acc + self.lu[(i, k)] * y[k]);
            y[i] -= s;
        }
        for i in (0..n).rev() {
            let s = (i + 1..n).fold(C::zero(), |acc, k| acc + self.lu[(i, k)] * y[k]);
            y[i] = (y[i] - s) / self.lu[(i, i)];
        }
        y
    }

    pub fn inverse(&self) -> ComplexMatrix<T> {
        self.solve(&ComplexMatrix::identity(self.dim()))
    }

    pub fn determinant(&self) -> C<T> {
        let mut det = C::one();
        for i in 0..self.dim() {
            det *= self.lu[(i, i)];
        }
        // Sign of the permutation.
        let mut seen = vec![false; self.perm.len()];
        for start in 0..self.perm.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.perm[j];
                len += 1;
            }
            if len % 2 == 0 {
                det = -det;
            }
        }
        det
    }
}

/// Solves `A X = B` by partial-pivoting LU.
pub fn solve<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(LuFactors::new(a)?.solve(b))
}

pub fn inverse<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    Ok(LuFactors::new(a)?.inverse())
}
