use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::random::{random_diagonalizable, random_unitary};

type M = ComplexMatrix<f64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Spectrum with `k` eigenvalues on `Re = 1` and the rest on `Re = -1`.
fn constructed(n: usize, k: usize, rng: &mut ChaCha8Rng) -> M {
    use rand::Rng;
    let values: Vec<Complex64> =
        (0..n).map(|i| c(if i < k { 1.0 } else { -1.0 }, rng.gen_range(-3.0..3.0))).collect();
    random_diagonalizable::<f64, _>(&values, 0.5, 1e3, rng).0
}

#[test]
fn component_index_examples() {
    assert_eq!(component_index(&M::from_real_diag(&[1.0, -1.0])).unwrap(), 1);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..=4 {
        let u: M = random_unitary(4, &mut rng);
        let d = M::from_real_diag(&(0..4).map(|i| if i < k { 1.0 } else { 0.0 }).collect::<Vec<_>>());
        let p = u.matmul(&d).matmul(&u.adjoint());
        let a = &p.scale_real(2.0) - &M::identity(4);
        assert_eq!(component_index(&a).unwrap(), k);
    }
    assert_eq!(component_index(&constructed(5, 3, &mut rng)).unwrap(), 3);
    assert!(matches!(
        component_index(&M::from_diag(&[c(0.0, 1.0), c(1.0, 0.0)])),
        Err(Error::EigenvalueOnAxis { .. })
    ));
}

#[test]
fn path_invariance_examples() {
    let constant = MatrixPath::from_fn(10, |_| M::from_real_diag(&[1.0, -1.0])).unwrap();
    let r = path_component_invariance(&constant).unwrap();
    assert!(r.invariant && r.indices == vec![1; 11]);

    let rotating = MatrixPath::from_fn(10, |t| M::from_diag(&[c((PI * t).cos(), (PI * t).sin()), c(-1.0, 0.0)])).unwrap();
    match path_component_invariance(&rotating) {
        Err(Error::EigenvalueOnAxisAt { t }) => assert!((t - 0.5).abs() < 1e-12),
        other => panic!("{other:?}"),
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let base = constructed(6, 2, &mut rng);
    let walk: Vec<M> = (0..20)
        .scan(base.clone(), |a, _| {
            let step: M = crate::random::random_matrix(6, &mut rng);
            let out = a.clone();
            a.axpy(c(0.01, 0.0), &step);
            Some(out)
        })
        .collect();
    let samples = walk.into_iter().enumerate().map(|(i, a)| (i as f64 / 19.0, a)).collect();
    let path = MatrixPath::new(samples).unwrap();
    assert!(path.max_step() < 0.2);
    assert!(path_component_invariance(&path).unwrap().invariant);
}

#[test]
fn path_validation() {
    let a = M::identity(2);
    assert!(MatrixPath::new(vec![(0.0, a.clone())]).is_err());
    assert!(MatrixPath::new(vec![(0.0, a.clone()), (0.5, a.clone())]).is_err());
    assert!(MatrixPath::new(vec![(0.0, a.clone()), (0.6, a.clone()), (0.6, a.clone()), (1.0, a.clone())]).is_err());
    assert!(matches!(
        MatrixPath::new(vec![(0.0, a.clone()), (1.0, M::identity(3))]),
        Err(Error::DimensionMismatch { .. })
    ));
}

fn crossing_path() -> MatrixPath<f64> {
    MatrixPath::from_fn(40, |t| M::from_real_diag(&[t - 0.5, -1.0])).unwrap()
}

#[test]
fn spectral_flow_examples() {
    let constant = MatrixPath::from_fn(5, |_| M::from_real_diag(&[1.0, -1.0])).unwrap();
    assert_eq!(spectral_flow(&constant).unwrap(), 0);

    let r = spectral_flow_report(&crossing_path()).unwrap();
    assert_eq!(r.spectral_flow, 1);
    // t = 1/2 is a sample; the count changes on the interval after it.
    assert_eq!(r.crossings.len(), 1);
    assert!(r.crossings[0].t_before <= 0.5 && r.crossings[0].t_after > 0.5);

    let loop_path = MatrixPath::from_fn(64, |t| {
        let z = c((2.0 * PI * t).cos(), (2.0 * PI * t).sin());
        M::from_diag(&[z * 2.0, c(-1.0, 0.0)])
    })
    .unwrap();
    assert_eq!(spectral_flow(&loop_path).unwrap(), 0);

    let bad = MatrixPath::from_fn(4, |t| M::from_real_diag(&[t, -1.0])).unwrap();
    assert!(matches!(spectral_flow(&bad), Err(Error::EndpointOnAxis { t }) if t == 0.0));
}

#[test]
fn spectral_flow_concat_and_reverse() {
    let p = crossing_path();
    let back = MatrixPath::from_fn(7, |t| M::from_real_diag(&[0.5 + t, -1.0 + 3.0 * t])).unwrap();
    let joined = p.concat(&back).unwrap();
    assert_eq!(spectral_flow(&joined).unwrap(), spectral_flow(&p).unwrap() + spectral_flow(&back).unwrap());
    assert_eq!(spectral_flow(&p.reversed()).unwrap(), -1);
    assert!(p.concat(&p).is_err());
}

/// `(i / 2 pi) int tr(P [d_theta P, d_phi P]) dtheta dphi` on a midpoint grid
/// with central differences.
fn berry_quadrature(p: impl Fn([f64; 3]) -> M, n: usize) -> f64 {
    let at = |th: f64, ph: f64| p([th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]);
    let (dth, dph) = (PI / n as f64, 2.0 * PI / (2 * n) as f64);
    let h = 1e-5;
    let mut total = c(0.0, 0.0);
    for i in 0..n {
        let th = (i as f64 + 0.5) * dth;
        for j in 0..2 * n {
            let ph = (j as f64 + 0.5) * dph;
            let pt = &(&at(th + h, ph) - &at(th - h, ph)).scale_real(0.5 / h);
            let pp = &(&at(th, ph + h) - &at(th, ph - h)).scale_real(0.5 / h);
            let comm = &pt.matmul(pp) - &pp.matmul(pt);
            total += at(th, ph).matmul(&comm).trace() * dth * dph;
        }
    }
    (c(0.0, 1.0) * total / (2.0 * PI)).re
}

fn sample(preset: BundlePreset, n: usize, level: u32) -> SphereBundleSample<f64> {
    SphereBundleSample::from_fn(level, |v| bundle_preset(preset, n, v).unwrap()).unwrap()
}

#[test]
fn icosphere_counts_and_orientation() {
    for level in 0..4 {
        let g = icosphere(level);
        assert_eq!(g.triangles.len(), 20 * 4usize.pow(level));
        assert_eq!(g.vertices.len(), 10 * 4usize.pow(level) + 2);
        for v in &g.vertices {
            assert!(((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt() - 1.0).abs() < 1e-14);
        }
    }
}

#[test]
fn chern_matches_berry_quadrature() {
    for preset in [BundlePreset::Monopole, BundlePreset::AntiMonopole, BundlePreset::Pullback2] {
        let oracle = berry_quadrature(|v| bundle_preset(preset, 2, v).unwrap(), 120);
        let lattice = chern_number(&sample(preset, 2, 3)).unwrap();
        assert!((oracle - lattice.chern as f64).abs() < 0.02, "{preset}: oracle {oracle}, lattice {lattice:?}");
        assert!(lattice.residual < 1e-8);
    }
    let monopole = chern_number(&sample(BundlePreset::Monopole, 2, 3)).unwrap().chern;
    assert_eq!(monopole.abs(), 1);
    assert_eq!(chern_number(&sample(BundlePreset::Pullback2, 2, 3)).unwrap().chern, 2 * monopole);
    assert_eq!(chern_number(&sample(BundlePreset::Trivial, 2, 3)).unwrap().chern, 0);
    assert_eq!(chern_number(&sample(BundlePreset::MonopoleAntiMonopole, 4, 3)).unwrap().chern, 0);
}

#[test]
fn chern_refinement_and_gauge_invariance() {
    let coarse = chern_number(&sample(BundlePreset::Monopole, 3, 3)).unwrap();
    let fine = chern_number(&sample(BundlePreset::Monopole, 3, 4)).unwrap();
    assert_eq!(coarse.chern, fine.chern);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u: M = random_unitary(3, &mut rng);
    let rotated = SphereBundleSample::from_fn(3, |v| {
        let p = bundle_preset::<f64>(BundlePreset::Monopole, 3, v).unwrap();
        u.matmul(&p).matmul(&u.adjoint()).hermitian_part()
    })
    .unwrap();
    assert_eq!(chern_number(&rotated).unwrap().chern, coarse.chern);
}

#[test]
fn bundle_validation() {
    let grid = icosphere(1);
    let nv = grid.vertices.len();
    let bad = vec![M::from_real_diag(&[0.5, 0.0]); nv];
    assert!(matches!(SphereBundleSample::new(grid.clone(), bad), Err(Error::InvalidBundle { .. })));
    let mut mixed = vec![M::from_real_diag(&[1.0, 0.0]); nv];
    mixed[3] = M::identity(2);
    assert!(SphereBundleSample::new(grid.clone(), mixed).is_err());
    let ok = SphereBundleSample::new(grid, vec![M::from_real_diag(&[1.0, 0.0]); nv]).unwrap();
    assert!(matches!(chern_number(&ok), Err(Error::InvalidBundle { .. })));
}

#[test]
fn obstruction_examples() {
    let r = obstruction_demo::<f64>(BundlePreset::Monopole, 2, 3).unwrap();
    assert!(r.obstructed && r.chern.chern.abs() == 1);
    assert!(r.max_spectrum_defect < 1e-12 && (r.axis_clearance - 1.0).abs() < 1e-12);
    assert_eq!(r.positive_rank, 1);
    let r = obstruction_demo::<f64>(BundlePreset::Trivial, 2, 3).unwrap();
    assert!(!r.obstructed && r.chern.chern == 0);
    let r = obstruction_demo::<f64>(BundlePreset::MonopoleAntiMonopole, 4, 3).unwrap();
    assert!(!r.obstructed && r.positive_rank == 2);
    assert!(obstruction_demo::<f64>(BundlePreset::Monopole, 1, 3).is_err());
    assert_eq!("pullback2".parse::<BundlePreset>().unwrap(), BundlePreset::Pullback2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn index_is_similarity_invariant_and_complementary(seed in any::<u64>(), n in 1usize..8, k_frac in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = ((n + 1) as f64 * k_frac) as usize;
        let a = constructed(n, k.min(n), &mut rng);
        prop_assert_eq!(component_index(&a).unwrap(), k.min(n));
        let (v, _) = random_diagonalizable::<f64, _>(&vec![c(1.0, 0.0); n], 0.5, 1e2, &mut rng);
        let v = &v + &M::identity(n);
        if let Ok(vinv) = crate::linalg::inverse(&v) {
            prop_assert_eq!(component_index(&v.matmul(&a).matmul(&vinv)).unwrap(), k.min(n));
        }
        prop_assert_eq!(component_index(&a).unwrap() + component_index(&a.scale_real(-1.0)).unwrap(), n);
    }
}

#[test]
fn monopole_sign_convention() {
    let r = chern_number(&sample(BundlePreset::Monopole, 2, 3)).unwrap();
    // (i / 2 pi) int tr(P dP ^ dP) with the outward orientation.
    assert_eq!(r.chern, -1);
}
