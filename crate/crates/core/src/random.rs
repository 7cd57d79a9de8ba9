//! Seeded random matrix generators used by presets and test suites.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, LuFactors};
use crate::scalar::{Real, C};

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Entries i.i.d. complex Gaussian with unit variance per component.
pub fn random_matrix<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(n, |_, _| {
        C::new(T::lit(standard_normal(rng)), T::lit(standard_normal(rng)))
    })
}

pub fn random_hermitian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    random_matrix::<T, R>(n, rng).hermitian_part()
}

/// Hermitian positive definite with spectrum in `[1, 1 + n]`-ish.
pub fn random_hpd<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    let b: ComplexMatrix<T> = random_matrix(n, rng);
    let mut h = b.adjoint().matmul(&b).scale_real(T::one() / T::lit(n.max(1) as f64));
    for i in 0..n {
        h[(i, i)] += C::new(T::one(), T::zero());
    }
    h.hermitian_part()
}

/// Haar-like unitary from Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g: ComplexMatrix<T> = random_matrix(n, rng);
    let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let dot = q.iter().zip(&v).fold(C::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= dot * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        v.iter_mut().for_each(|z| *z = *z / norm);
        cols.push(v);
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

/// `V diag(values) V^{-1}` with `V = I + spread * G / sqrt(n)` for a Gaussian
/// `G`, resampled until `cond(V) <= max_condition`. Returns the matrix and `V`.
pub fn random_diagonalizable<T: Real, R: Rng + ?Sized>(
    values: &[C<T>],
    spread: f64,
    max_condition: f64,
    rng: &mut R,
) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let n = values.len();
    loop {
        let g: ComplexMatrix<T> = random_matrix(n, rng);
        let v = &ComplexMatrix::identity(n) + &g.scale_real(T::lit(spread / (n.max(1) as f64).sqrt()));
        let Ok(lu) = LuFactors::new(&v) else { continue };
        let vinv = lu.inverse();
        let cond = crate::linalg::operator_norm_2(&v) * crate::linalg::operator_norm_2(&vinv);
        if cond.as_f64() > max_condition {
            continue;
        }
        let a = v.matmul(&ComplexMatrix::from_diag(values)).matmul(&vinv);
        return (a, v);
    }
}

/// `n` eigenvalues drawn uniformly from the square `[-half_width, half_width]^2`,
/// rejecting draws closer than `clearance` to the contour or with modulus
/// below `min_modulus`.
pub fn random_spectrum_clear_of<R: Rng + ?Sized>(
    n: usize,
    contour: &crate::contour::ContourSpec,
    half_width: f64,
    clearance: f64,
    min_modulus: f64,
    rng: &mut R,
) -> Vec<num_complex::Complex64> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let z = num_complex::Complex64::new(
            rng.gen_range(-half_width..half_width),
            rng.gen_range(-half_width..half_width),
        );
        if contour.distance(z) >= clearance && z.norm() >= min_modulus {
            out.push(z);
        }
    }
    out
}
