use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::contour::{make_closed_circle, make_sector_contour, Resolution};
use crate::random::{random_diagonalizable, random_hermitian, random_spectrum_clear_of};
use crate::symbol1d::{op_from_symbol, xi};

type M = ComplexMatrix<f64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn right_sector(r: f64) -> ContourSpec {
    make_sector_contour(FRAC_PI_2, -FRAC_PI_2, r, 1e6 * r, Resolution::default()).unwrap()
}

fn circle(center: f64, radius: f64) -> ContourSpec {
    make_closed_circle(c(center, 0.0), radius, Resolution::default()).unwrap()
}

fn jordan_like() -> M {
    M::from_real_rows(&[&[1.0, 1.0], &[0.0, -1.0]]).unwrap()
}

fn assert_close(a: &M, b: &M, tol: f64) {
    let d = operator_norm_2(&(a - b));
    assert!(d <= tol, "difference {d:e} exceeds {tol:e}");
}

#[test]
fn bounded_projection_examples() {
    let a = M::from_real_diag(&[1.0, -1.0]);
    let r = bounded_spectral_projection(&a, &circle(1.0, 0.5)).unwrap();
    assert_close(&r.p, &M::from_real_diag(&[1.0, 0.0]), 1e-10);
    assert!(r.idempotency_defect <= 10.0 * r.truncation_error_estimate.max(1e-15));
    assert_eq!(r.rank_estimate, 1);
    assert!(r.resolved());

    let r = bounded_spectral_projection(&jordan_like(), &circle(1.0, 0.5)).unwrap();
    let oracle = M::from_real_rows(&[&[1.0, 0.5], &[0.0, 0.0]]).unwrap();
    assert_close(&r.p, &oracle, 1e-10);

    let r = bounded_spectral_projection(&jordan_like(), &circle(0.0, 3.0)).unwrap();
    assert_close(&r.p, &M::identity(2), 1e-10);
}

#[test]
fn bounded_projection_errors() {
    let a = M::from_real_diag(&[1.5, -1.0]);
    assert!(matches!(
        bounded_spectral_projection(&a, &circle(1.0, 0.5)),
        Err(Error::SpectrumOnContour { .. })
    ));
    assert!(matches!(
        bounded_spectral_projection(&a, &right_sector(0.5)),
        Err(Error::WrongContourKind { .. })
    ));
    assert!(matches!(sectorial_projection(&a, &circle(1.0, 0.2)), Err(Error::WrongContourKind { .. })));
}

#[test]
fn sectorial_projection_examples() {
    let r = sectorial_projection(&M::from_real_diag(&[1.0, -1.0]), &right_sector(0.5)).unwrap();
    assert_close(&r.p, &M::from_real_diag(&[1.0, 0.0]), 1e-9);
    let r = sectorial_projection(&jordan_like(), &right_sector(0.5)).unwrap();
    assert_close(&r.p, &M::from_real_rows(&[&[1.0, 0.5], &[0.0, 0.0]]).unwrap(), 1e-9);
    assert!(r.idempotency_defect <= 10.0 * r.truncation_error_estimate);
}

#[test]
fn sectorial_projection_of_dtheta_selects_positive_modes() {
    let op = op_from_symbol(&xi::<f64>(), 16).unwrap();
    for method in [Method::Dense, Method::Schur] {
        let r = sectorial_projection_with(&op.matrix, &right_sector(0.5), method).unwrap();
        assert_eq!(r.rank_estimate, 16);
        assert_eq!(r.eigenvalues_inside_arc, 1);
        let oracle = M::from_real_diag(&(-16..=16).map(|k| if k >= 1 { 1.0 } else { 0.0 }).collect::<Vec<_>>());
        assert!((&r.p - &oracle).max_abs() < 1e-9, "{method:?}");
    }
}

#[test]
fn dense_and_schur_paths_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let contour = right_sector(0.5);
    let values = random_spectrum_clear_of(30, &contour, 6.0, 0.5, 1.0, &mut rng);
    let (a, _) = random_diagonalizable::<f64, _>(&values, 0.5, 1e3, &mut rng);
    let d = sectorial_projection_with(&a, &contour, Method::Dense).unwrap();
    let s = sectorial_projection_with(&a, &contour, Method::Schur).unwrap();
    assert_close(&d.p, &s.p, 1e-9);
    let circ = circle(2.0, 1.3);
    let d = bounded_spectral_projection_with(&a, &circ, Method::Dense);
    let s = bounded_spectral_projection_with(&a, &circ, Method::Schur);
    if let (Ok(d), Ok(s)) = (d, s) {
        assert_close(&d.p, &s.p, 1e-9);
    }
}

#[test]
fn oracle_examples() {
    let a = M::from_diag(&[c(0.0, 2.0), c(-3.0, 0.0)]);
    assert!(matches!(
        eigen_projection_oracle(&a, &Region::RightHalfPlane),
        Err(Error::EigenvalueOnBoundary { .. })
    ));
    // -3 sits on the real axis, the boundary of the upper half-plane.
    assert!(matches!(
        eigen_projection_oracle(&a, &Region::UpperHalfPlane),
        Err(Error::EigenvalueOnBoundary { .. })
    ));
    let b = M::from_diag(&[c(0.0, 2.0), c(-3.0, -1.0)]);
    let r = eigen_projection_oracle(&b, &Region::UpperHalfPlane).unwrap();
    assert_close(&r.p, &M::from_real_diag(&[1.0, 0.0]), 1e-14);
    let r = eigen_projection_oracle(&M::from_real_diag(&[1.0, -1.0]), &Region::RightHalfPlane).unwrap();
    assert_close(&r.p, &M::from_real_diag(&[1.0, 0.0]), 1e-14);
    let nilpotent = M::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
    assert!(matches!(
        eigen_projection_oracle(&(&nilpotent + &M::identity(2)), &Region::RightHalfPlane),
        Err(Error::TooDefective { .. })
    ));
}

#[test]
fn oracle_on_random_diagonalizable() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let contour = right_sector(0.5);
    let values = random_spectrum_clear_of(10, &contour, 5.0, 0.5, 1.0, &mut rng);
    let (a, _) = random_diagonalizable::<f64, _>(&values, 0.5, 1e3, &mut rng);
    let r = eigen_projection_oracle(&a, &Region::Enclosed(contour)).unwrap();
    assert!(r.idempotency_defect <= 1e-9);
    assert!(operator_norm_2(&a.commutator(&r.p)) <= 1e-8);
}

#[test]
fn riesz_examples() {
    let f = riesz_transform(&M::from_real_diag(&[1.0, -1.0])).unwrap();
    assert_close(&f, &M::from_real_diag(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]), 1e-15);
    assert_close(&riesz_transform(&M::zeros(3)).unwrap(), &M::zeros(3), 0.0);
    assert!(matches!(riesz_transform(&jordan_like()), Err(Error::NotHermitian { .. })));

    let a = op_from_symbol(&xi::<f64>(), 8).unwrap().matrix.hermitian_part();
    let f = riesz_transform(&a).unwrap();
    let values = crate::linalg::eigvalsh(&f).unwrap();
    let mut expected: Vec<f64> = (-8..=8).map(|k| k as f64 / (1.0 + (k * k) as f64).sqrt()).collect();
    expected.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for (v, e) in values.iter().zip(&expected) {
        assert!((v - e).abs() < 1e-12);
    }
    let region = Region::Enclosed(right_sector(0.5));
    let pa = eigen_projection_oracle(&a, &region).unwrap();
    let pf = eigen_projection_oracle(&f, &region).unwrap();
    assert!((&pa.p - &pf.p).max_abs() < 1e-9);
}

#[test]
fn aps_examples() {
    let r = aps_projection(&M::from_real_diag(&[3.0, -2.0]), 0.0).unwrap();
    assert_close(&r.p, &M::from_real_diag(&[1.0, 0.0]), 1e-15);
    let a = op_from_symbol(&xi::<f64>(), 6).unwrap().matrix.hermitian_part();
    let r = aps_projection(&a, 0.5).unwrap();
    let oracle = M::from_real_diag(&(-6..=6).map(|k| if k >= 1 { 1.0 } else { 0.0 }).collect::<Vec<_>>());
    assert!((&r.p - &oracle).max_abs() < 1e-12);
    assert!(matches!(aps_projection(&a, 1.0), Err(Error::EigenvalueAtCut { .. })));
}

#[test]
fn aps_matches_sectorial_for_gapped_hermitian() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let h = random_hermitian::<f64, _>(12, &mut rng);
    // Open a gap of width 1 around zero.
    let e = crate::linalg::eigh(&h).unwrap();
    let shifted: Vec<f64> = e.values.iter().map(|&l| if l >= 0.0 { l + 0.5 } else { l - 0.5 }).collect();
    let a = crate::linalg::spectral_synthesis(&e.vectors, &shifted);
    let aps = aps_projection(&a, 0.0).unwrap();
    let sec = sectorial_projection(&a, &make_sector_contour(FRAC_PI_2, 3.0 * FRAC_PI_2, 0.25, 2.5e5, Resolution::default()).unwrap())
        .unwrap();
    let d = operator_norm_2(&(&aps.p - &sec.p));
    assert!(d <= 10.0 * sec.truncation_error_estimate, "{d:e}");
}

#[test]
fn complex_power_examples() {
    let a = jordan_like();
    assert_close(&complex_power(&a, c(0.0, 0.0), FRAC_PI_2).unwrap(), &M::identity(2), 1e-12);
    assert_close(&complex_power(&a, c(1.0, 0.0), FRAC_PI_2).unwrap(), &a, 1e-12);
    let one = M::from_real_diag(&[1.0]);
    for alpha in [FRAC_PI_2, 3.0 * FRAC_PI_2] {
        let p = complex_power(&one, c(0.5, 0.0), alpha).unwrap();
        assert!((p[(0, 0)] - 1.0).norm() < 1e-15);
    }
    let minus = M::from_real_diag(&[-1.0]);
    let p = complex_power(&minus, c(0.5, 0.0), FRAC_PI_2).unwrap();
    assert!((p[(0, 0)] - c(0.0, -1.0)).norm() < 1e-15);
    let p = complex_power(&minus, c(0.5, 0.0), 3.0 * FRAC_PI_2).unwrap();
    assert!((p[(0, 0)] - c(0.0, 1.0)).norm() < 1e-15);
    let on_cut = M::from_diag(&[c(0.0, 2.0)]);
    assert!(matches!(complex_power(&on_cut, c(0.5, 0.0), FRAC_PI_2), Err(Error::EigenvalueOnCut { .. })));
    assert!(matches!(complex_power(&M::zeros(1), c(0.5, 0.0), FRAC_PI_2), Err(Error::EigenvalueZero { .. })));
}

#[test]
fn complex_log_branch() {
    for alpha in [-2.0, 0.3, FRAC_PI_2, 4.0] {
        for k in 0..12 {
            let phi = TAU * k as f64 / 12.0 + 0.1;
            let mu = Complex64::from_polar(2.0, phi);
            let l = complex_log(mu, alpha).unwrap();
            assert!(l.im < alpha && l.im > alpha - TAU);
            assert!((l.exp() - mu).norm() < 1e-14);
        }
    }
}

#[test]
fn wodzicki_examples() {
    let a = M::from_real_diag(&[1.0, -1.0]);
    let (a1, a2) = (FRAC_PI_2, 3.0 * FRAC_PI_2);
    let contour = make_sector_contour(a1, a2, 0.5, 5e5, Resolution::default()).unwrap();
    for s in [c(0.0, 0.0), c(1.0, 0.0)] {
        assert!(wodzicki_residual(&a, s, a1, a2, &contour).unwrap() < 1e-8);
    }
    // theta = pi: the sector is the right half-plane and the exit cut is at
    // -pi/2, where 1^(1/2) = e^{-i pi} = -1 and (-1)^(1/2) = -i. Both sides
    // then equal diag(-2, 0).
    let p2 = complex_power(&a, c(0.5, 0.0), a1 - PI).unwrap();
    assert_close(&p2, &M::from_diag(&[c(-1.0, 0.0), c(0.0, -1.0)]), 1e-14);
    assert!(wodzicki_residual(&a, c(0.5, 0.0), a1, a2, &contour).unwrap() < 1e-8);
    let other = make_sector_contour(0.0, 1.0, 0.5, 5e5, Resolution::default()).unwrap();
    assert!(matches!(wodzicki_residual(&a, c(0.5, 0.0), a1, a2, &other), Err(Error::InvalidAngles { .. })));
    // An eigenvalue inside the arc is excluded from P but not from the powers.
    let small = M::from_real_diag(&[0.3, -1.0]);
    assert!(matches!(wodzicki_residual(&small, c(0.5, 0.0), a1, a2, &contour), Err(Error::InvalidRadii { .. })));
}

#[test]
fn single_precision_projection() {
    let a = ComplexMatrix::<f32>::from_real_diag(&[1.0, -1.0]);
    let c32 = make_sector_contour(FRAC_PI_2, -FRAC_PI_2, 0.5, 5e3, Resolution::default()).unwrap();
    let r = sectorial_projection(&a, &c32).unwrap();
    assert!((r.p[(0, 0)].re - 1.0).abs() < 1e-4 && r.p[(1, 1)].norm() < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sectorial_matches_oracle_and_complements(seed in any::<u64>(), n in 2usize..12, alpha1 in -3.0f64..3.0, theta in 1.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Clearance 0.5 at |lambda| = 5 is 10% relative, at the edge of what
        // the default ray panels resolve to 1e-5; one refinement is ample.
        let contour = make_sector_contour(alpha1, alpha1 - theta, 0.5, 5e5, Resolution::default().refined()).unwrap();
        let values = random_spectrum_clear_of(n, &contour, 5.0, 0.5, 1.0, &mut rng);
        let (a, _) = random_diagonalizable::<f64, _>(&values, 0.5, 1e3, &mut rng);
        let p = sectorial_projection(&a, &contour).unwrap();
        let oracle = eigen_projection_oracle(&a, &Region::Enclosed(contour)).unwrap();
        prop_assert!(operator_norm_2(&(&p.p - &oracle.p)) <= 1e-5);
        let q = sectorial_projection(&a, &contour.swapped()).unwrap();
        prop_assert!(operator_norm_2(&(&(&p.p + &q.p) - &M::identity(n))) <= 1e-5);
        prop_assert!(p.idempotency_defect <= (10.0 * p.truncation_error_estimate).max(1e-6));
        let norm_a = operator_norm_2(&a);
        prop_assert!(operator_norm_2(&a.commutator(&p.p)) <= 10.0 * p.truncation_error_estimate * norm_a);
    }

    #[test]
    fn wodzicki_identity_holds(seed in any::<u64>(), n in 1usize..6, sr in -2.0f64..2.0, si in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = c(sr, si);
        prop_assume!(s.norm() <= 2.0);
        let contour = make_sector_contour(FRAC_PI_2, 3.0 * FRAC_PI_2, 0.5, 5e5, Resolution::default()).unwrap();
        let values = random_spectrum_clear_of(n, &contour, 4.0, 0.5, 1.0, &mut rng);
        let (a, _) = random_diagonalizable::<f64, _>(&values, 0.3, 1e2, &mut rng);
        let r = wodzicki_residual(&a, s, FRAC_PI_2, 3.0 * FRAC_PI_2, &contour).unwrap();
        prop_assert!(r <= 1e-6, "residual {}", r);
    }
}
