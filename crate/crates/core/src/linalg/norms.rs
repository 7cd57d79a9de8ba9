use super::{eigh, eigvalsh, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Largest singular value, from the top eigenvalue of the Gram matrix.
pub fn operator_norm_2<T: Real>(a: &ComplexMatrix<T>) -> T {
    if a.dim() == 0 {
        return T::zero();
    }
    let scale = a.max_abs();
    if scale.is_zero() {
        return T::zero();
    }
    // Scaling keeps the Gram entries away from overflow/underflow.
    let b = a.scale_real(T::one() / scale);
    let gram = b.adjoint().matmul(&b);
    let top = eigvalsh(&gram)
        .ok()
        .and_then(|v| v.last().copied())
        .unwrap_or_else(|| gram.frobenius_norm());
    top.max(T::zero()).sqrt() * scale
}

/// Schur-test bound `sqrt(max row l1 sum * max column l1 sum)`, always an
/// upper bound for the operator 2-norm.
pub fn schur_bound<T: Real>(k: &ComplexMatrix<T>) -> T {
    let n = k.dim();
    let mut rows = T::zero();
    let mut cols = vec![T::zero(); n];
    for i in 0..n {
        let mut r = T::zero();
        for (j, z) in k.row(i).iter().enumerate() {
            let a = z.norm();
            r = r + a;
            cols[j] = cols[j] + a;
        }
        rows = rows.max(r);
    }
    let c = cols.into_iter().fold(T::zero(), T::max);
    (rows * c).sqrt()
}

/// `H^{-1/2}` for Hermitian positive definite `H`.
pub fn inv_sqrt_hpd<T: Real>(h: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let defect = h.hermitian_defect();
    if defect > T::tol(1e-10) {
        return Err(Error::NotHermitian { defect: defect.as_f64() });
    }
    let e = eigh(h)?;
    let min_eig = e.values.first().copied().unwrap_or_else(T::one);
    if min_eig <= T::zero() {
        return Err(Error::NotPositiveDefinite { min_eig: min_eig.as_f64() });
    }
    let d: Vec<T> = e.values.iter().map(|&l| T::one() / l.sqrt()).collect();
    Ok(spectral_synthesis(&e.vectors, &d))
}

/// `V diag(d) V^*` for unitary `V`.
pub(crate) fn spectral_synthesis<T: Real>(v: &ComplexMatrix<T>, d: &[T]) -> ComplexMatrix<T> {
    let n = v.dim();
    let vd = ComplexMatrix::from_fn(n, |i, j| v[(i, j)] * d[j]);
    let out = vd.matmul(&v.adjoint());
    // Symmetrize away roundoff.
    let mut h = out.hermitian_part();
    for i in 0..n {
        h[(i, i)] = C::new(h[(i, i)].re, T::zero());
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hpd, random_matrix, random_unitary};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;

    #[test]
    fn norm_examples() {
        assert!((operator_norm_2(&M::identity(4)) - 1.0).abs() < 1e-14);
        let d = M::from_diag(&[C::new(3.0, 0.0), C::new(0.0, -4.0)]);
        assert!((operator_norm_2(&d) - 4.0).abs() < 1e-14);
        // Singular values of [[0,2],[0,0]] are {2, 0}.
        let j = M::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!((operator_norm_2(&j) - 2.0).abs() < 1e-14);
        assert_eq!(operator_norm_2(&M::zeros(3)), 0.0);
    }

    #[test]
    fn schur_bound_examples() {
        assert!((schur_bound(&M::identity(5)) - 1.0).abs() < 1e-15);
        let ones = M::from_fn(3, |_, _| C::new(1.0, 0.0));
        // Rank one: ||11^T|| = ||1||^2 = 3.
        assert!((schur_bound(&ones) - 3.0).abs() < 1e-14);
        assert!((operator_norm_2(&ones) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn inv_sqrt_examples() {
        let s = inv_sqrt_hpd(&M::identity(2)).unwrap();
        assert!((&s - &M::identity(2)).max_abs() < 1e-15);
        let s = inv_sqrt_hpd(&M::from_real_diag(&[4.0, 9.0])).unwrap();
        assert!((&s - &M::from_real_diag(&[0.5, 1.0 / 3.0])).max_abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let h = random_hpd(6, &mut rng);
        let s = inv_sqrt_hpd(&h).unwrap();
        let shs = &(&s * &h) * &s;
        assert!(operator_norm_2(&(&shs - &M::identity(6))) < 1e-8);
        assert!(s.hermitian_defect() < 1e-14);
    }

    #[test]
    fn inv_sqrt_errors() {
        let nh = M::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(inv_sqrt_hpd(&nh), Err(Error::NotHermitian { .. })));
        let indef = M::from_real_diag(&[1.0, -2.0]);
        match inv_sqrt_hpd(&indef) {
            Err(Error::NotPositiveDefinite { min_eig }) => assert!((min_eig + 2.0).abs() < 1e-14),
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn schur_bound_dominates_norm(seed in any::<u64>(), n in 1usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k: M = random_matrix(n, &mut rng);
            prop_assert!(schur_bound(&k) + 1e-12 >= operator_norm_2(&k));
        }

        #[test]
        fn norm_submultiplicative_and_unitarily_invariant(seed in any::<u64>(), n in 1usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a: M = random_matrix(n, &mut rng);
            let b: M = random_matrix(n, &mut rng);
            let u: M = random_unitary(n, &mut rng);
            let na = operator_norm_2(&a);
            prop_assert!(operator_norm_2(&(&a * &b)) <= na * operator_norm_2(&b) * (1.0 + 1e-8));
            let rotated = &(&u * &a) * &u.adjoint();
            prop_assert!((operator_norm_2(&rotated) - na).abs() <= 1e-8 * na.max(1.0));
        }
    }
}
