use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::*;
use crate::contour::{make_sector_contour, Resolution};
use crate::linalg::ComplexMatrix;
use crate::symbol1d::{c_theta_times_xi, constant, op_from_symbol, xi, CutoffFunction, DiscretizedOperator, SymbolFunction};

type M = ComplexMatrix<f64>;

fn decay_params(p: f64, lo: f64, hi: f64) -> ResolventDecayParams {
    ResolventDecayParams {
        ray_angle: FRAC_PI_2,
        s: 0.0,
        p,
        lambda_min: lo,
        lambda_max: hi,
        n_samples: 0,
        slope_tolerance: 0.1,
        min_decades: EXPERIMENT_MIN_DECADES,
    }
}

fn gap(k_max: usize, lo: f64, hi: f64, tol: f64) -> GapParams {
    GapParams {
        k_max,
        ray_angle: FRAC_PI_2,
        s: 0.0,
        lambda_min: lo,
        lambda_max: hi,
        n_samples: 0,
        slope_tolerance: tol,
        padding: 2,
        min_decades: EXPERIMENT_MIN_DECADES,
    }
}

fn imaginary_axis_sector(r: f64) -> crate::contour::ContourSpec {
    make_sector_contour(FRAC_PI_2, -FRAC_PI_2, r, 1e6 * r, Resolution::default()).unwrap()
}

#[test]
fn resolvent_decay_matches_diagonal_formula() {
    let k = 64;
    let a = op_from_symbol(&c_theta_times_xi::<f64>(1.0, 0.0, 0.3), k).unwrap();
    for p in [0.0, 0.5, 1.0] {
        let r = resolvent_decay_experiment(&a, &decay_params(p, 2.0, 16.0)).unwrap();
        for s in &r.samples {
            let oracle = (-(k as i64)..=k as i64)
                .map(|j| (1.0 + (j * j) as f64).powf(0.5 * p) / Complex64::new(j as f64 + 0.3, -s.abscissa).norm())
                .fold(0.0, f64::max);
            assert!((s.value - oracle).abs() <= 1e-10 * oracle, "p = {p}");
        }
        assert_eq!(r.expected_slope, -1.0 + p);
        assert_eq!(r.pass, r.pass_from_record());
    }
    let r = resolvent_decay_experiment(&a, &decay_params(0.0, 2.0, 16.0)).unwrap();
    assert!((r.fitted_slope.unwrap() + 1.0).abs() < 0.1 && r.pass);
}

#[test]
fn resolvent_decay_flat_at_full_gain() {
    let a = op_from_symbol(&xi::<f64>(), 64).unwrap();
    let r = resolvent_decay_experiment(&a, &decay_params(1.0, 1.6, 16.0)).unwrap();
    assert!(r.fitted_slope.unwrap().abs() <= 0.02, "{:?}", r.fitted_slope);
}

#[test]
fn resolvent_decay_preconditions() {
    let a = op_from_symbol(&xi::<f64>(), 16).unwrap();
    assert!(matches!(
        resolvent_decay_experiment(&a, &decay_params(0.0, 2.0, 20.0)),
        Err(Error::RangeOutsideResolvedRegime { .. })
    ));
    let mut on_spectrum = decay_params(0.0, 1.0, 4.0);
    on_spectrum.ray_angle = 0.0;
    assert!(matches!(resolvent_decay_experiment(&a, &on_spectrum), Err(Error::RayHitsSpectrum { .. })));
    assert!(resolvent_decay_experiment(&a, &decay_params(2.0, 1.0, 4.0)).is_err());
}

#[test]
fn parametrix_gap_for_multiplier_is_low_mode() {
    let r = parametrix_gap_experiment(&xi::<f64>(), &CutoffFunction::new(1.0).unwrap(), &gap(16, 2.0, 8.0, 0.15)).unwrap();
    // The gap is (psi(k) - 1) / (k - lambda) on |k| < 2, largest at k = 0.
    for s in &r.samples {
        let oracle = [0i64, 1, -1]
            .iter()
            .map(|&k| {
                let psi = CutoffFunction { rho: 1.0 }.eval(k as f64);
                (1.0 - psi) * (1.0 + (k * k) as f64).sqrt() / Complex64::new(k as f64, -s.abscissa).norm()
            })
            .fold(0.0, f64::max);
        assert!((s.value - oracle).abs() < 1e-10, "{} vs {oracle}", s.value);
    }
    assert!(r.pass, "{r:?}");
}

#[test]
fn parametrix_gap_variable_coefficient_small() {
    let a = c_theta_times_xi::<f64>(2.0, 1.0, 0.0);
    let r = parametrix_gap_experiment(&a, &CutoffFunction::new(1.0).unwrap(), &gap(32, 4.0, 16.0, 0.15)).unwrap();
    assert!(!r.fit_only);
    assert!((r.fitted_slope.unwrap() + 1.0).abs() < 0.25, "{:?}", r.fitted_slope);
}

fn resolvent_pair(a: SymbolFunction<f64>, psi: CutoffFunction) -> impl Fn(C64) -> crate::Result<(SymbolFunction<f64>, SymbolFunction<f64>)> + Sync {
    move |l: C64| {
        let f = a.sum(&constant(-l));
        let g = crate::symbol1d::cutoff_resolvent_symbol(&a, &psi, l)?;
        Ok((f.with_name("a-lambda"), g))
    }
}

type C64 = Complex64;

#[test]
fn composition_of_multipliers_is_exact() {
    let params = CompositionParams { gap: gap(16, 2.0, 8.0, 0.15), fit_only: false };
    let r = composition_gap_experiment("multipliers", resolvent_pair(xi(), CutoffFunction { rho: 1.0 }), &params).unwrap();
    assert!(r.degenerate_zero && r.pass && r.fitted_slope.is_none());
}

#[test]
fn composition_gap_decays() {
    let params = CompositionParams { gap: gap(32, 4.0, 16.0, 0.15), fit_only: false };
    let fam = resolvent_pair(c_theta_times_xi(2.0, 1.0, 0.0), CutoffFunction { rho: 1.0 });
    let r = composition_gap_experiment("resolvent_pair", fam, &params).unwrap();
    assert!(!r.degenerate_zero);
    assert!((r.fitted_slope.unwrap() + 1.0).abs() < 0.25, "{:?}", r.fitted_slope);
}

fn cos_lower(k: usize, eps: f64) -> DiscretizedOperator<f64> {
    let c = SymbolFunction::scalar("cos", 0.0, move |t: f64, _| Complex64::new(eps * t.cos(), 0.0), move |t: f64, _| Complex64::new(eps * t.cos(), 0.0));
    op_from_symbol(&c, k).unwrap()
}

#[test]
fn seminorm_examples() {
    let k = 8;
    let zero = SplitDifference::zero(&op_from_symbol(&xi::<f64>(), k).unwrap());
    let r = seminorm_pc(&zero, 1.0, &[0, 1], 2);
    assert!(r.principal.iter().chain(r.lower.iter().map(|x| &x.1)).all(|&v| v == 0.0));

    let eps = 0.3;
    let principal = SplitDifference::new(Some(xi::<f64>().scaled(Complex64::new(eps, 0.0))), zero.lower.clone()).unwrap();
    let r = seminorm_pc(&principal, 1.0, &[0], 2);
    assert!((r.principal[0] - eps).abs() < 1e-15);
    assert!((r.principal[1] - eps).abs() < 1e-9);
    assert!(r.principal[2].abs() < 1e-6);

    let lower = SplitDifference::new(None, cos_lower(k, eps)).unwrap();
    let r = seminorm_pc(&lower, 1.0, &[0], 2);
    // cos(theta) acts as the tridiagonal Toeplitz matrix with 1/2 off the diagonal.
    let oracle = eps * (PI / (2 * k + 2) as f64).cos();
    assert!((r.lower[0].1 - oracle).abs() < 1e-12);
    assert!((r.default_aggregate() - oracle).abs() < 1e-12);
}

fn perturb_params() -> PerturbationParams {
    PerturbationParams {
        s: 0.0,
        slope_tolerance: 0.1,
        seminorm_j_max: 2,
        seminorm_k: vec![0],
        method: crate::projections::Method::Auto,
        min_decades: EXPERIMENT_MIN_DECADES,
        symmetry_check: true,
    }
}

#[test]
fn perturbation_two_by_two_ratio() {
    let a = DiscretizedOperator::from_matrix(M::from_real_diag(&[1.0, -1.0]), 0, 2, 1.0).unwrap();
    let da = DiscretizedOperator::from_matrix(M::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap(), 0, 2, 0.0).unwrap();
    let da = SplitDifference::new(None, da).unwrap();
    let eps = log_spaced(1e-4, 1e-1, 10);
    let r = perturbation_experiment(&a, &da, &eps, &imaginary_axis_sector(0.5), &perturb_params()).unwrap();
    let first = &r.diagnostics["ratio_table"][0];
    let ratio = first["ratio"].as_f64().unwrap();
    assert!((ratio - 0.5).abs() < 0.005, "{ratio}");
    assert!(r.pass && r.fit_only);
    assert!(r.diagnostics["symmetry"]["symmetric"].as_bool().unwrap());
}

#[test]
fn perturbation_by_zero() {
    let a = op_from_symbol(&c_theta_times_xi::<f64>(1.0, 0.0, 0.3), 8).unwrap();
    let da = SplitDifference::zero(&a);
    let r = perturbation_experiment(&a, &da, &[1e-3, 1e-2, 1e-1], &imaginary_axis_sector(0.15), &perturb_params()).unwrap();
    assert!(r.samples.iter().all(|s| s.value == 0.0));
    assert!(r.degenerate_zero && r.pass);
}

#[test]
fn perturbation_losing_clearance() {
    let a = DiscretizedOperator::from_matrix(M::from_real_diag(&[1.0, -1.0]), 0, 2, 1.0).unwrap();
    // At eps = 1 the eigenvalue 1 - eps/2 sits on the arc of radius 1/2.
    let da = SplitDifference::new(None, a.with_matrix(M::from_real_diag(&[-0.5, 0.0]))).unwrap();
    assert!(matches!(
        perturbation_experiment(&a, &da, &[0.1, 1.0], &imaginary_axis_sector(0.5), &perturb_params()),
        Err(Error::ClearanceLost { epsilon }) if epsilon == 1.0
    ));
}

#[test]
fn boundedness_of_shifted_dtheta() {
    let a = c_theta_times_xi::<f64>(1.0, 0.0, 0.3);
    // The arc of radius 1/2 leaves the eigenvalue 0.3 outside the sector, so
    // P keeps modes k >= 1, where the parametrix is off by 0.3 / k.
    let r = boundedness_check(&a, 16, &CutoffFunction { rho: 0.5 }, &imaginary_axis_sector(0.5), &[-1.0, 0.0, 1.0]).unwrap();
    for e in &r.entries {
        assert!((e.projection_norm - 1.0).abs() < 1e-8, "{e:?}");
        assert!((e.parametrix_difference - 0.3).abs() < 1e-6, "{e:?}");
    }
    assert!(r.bounded && r.parametrix_dominated);
}

#[test]
fn report_serialization() {
    let a = op_from_symbol(&xi::<f64>(), 16).unwrap();
    let r = resolvent_decay_experiment(&a, &decay_params(0.0, 1.0, 4.0)).unwrap();
    let json = r.to_json().unwrap();
    let back: ExperimentReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.pass_from_record(), r.pass);
    let mut csv = Vec::new();
    r.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("abscissa,value\n"));
    assert_eq!(text.lines().count(), r.samples.len() + 1);
}
