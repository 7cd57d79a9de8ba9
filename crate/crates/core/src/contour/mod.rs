//! The spectral cut curve (two rays joined by an arc) and closed circles,
//! with composite Gauss-Legendre quadrature and spectral-clearance checks.

mod gauss;

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use gauss::gauss_legendre;
use gauss::push_panel;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, ComplexMatrix};
use crate::scalar::{Real, C};

pub const DEFAULT_PANELS_ARC: usize = 8;
pub const DEFAULT_PANELS_RAY: usize = 24;
pub const DEFAULT_GAUSS_ORDER: usize = 16;
/// Default `lambda_max / R`.
pub const DEFAULT_TRUNCATION_FACTOR: f64 = 1e6;
pub const MAX_GAUSS_ORDER: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContourKind {
    Sector,
    ClosedCircle,
}

impl ContourKind {
    pub fn name(self) -> &'static str {
        match self {
            ContourKind::Sector => "sector",
            ContourKind::ClosedCircle => "closed_circle",
        }
    }
}

/// Panel counts and Gauss order of the composite rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub panels_arc: usize,
    pub panels_ray: usize,
    pub gauss_order: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            panels_arc: DEFAULT_PANELS_ARC,
            panels_ray: DEFAULT_PANELS_RAY,
            gauss_order: DEFAULT_GAUSS_ORDER,
        }
    }
}

impl Resolution {
    pub fn new(panels_arc: usize, panels_ray: usize, gauss_order: usize) -> Self {
        Self { panels_arc, panels_ray, gauss_order }
    }

    /// Same rule with every panel count doubled.
    pub fn refined(self) -> Self {
        Self { panels_arc: 2 * self.panels_arc, panels_ray: 2 * self.panels_ray, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.panels_arc == 0 || self.panels_ray == 0 {
            return Err(Error::InvalidResolution { reason: "panel counts must be at least 1".into() });
        }
        if !(2..=MAX_GAUSS_ORDER).contains(&self.gauss_order) {
            return Err(Error::InvalidResolution {
                reason: format!("gauss_order {} outside [2, {MAX_GAUSS_ORDER}]", self.gauss_order),
            });
        }
        Ok(())
    }
}

/// A sector cut curve or a closed circle, together with its quadrature
/// resolution.
///
/// The sector curve comes in along the ray `arg = alpha1` from infinity to
/// radius `R`, follows the circle `|z| = R` with decreasing angle through
/// `theta = (alpha1 - alpha2) mod 2 pi`, and leaves along `arg = alpha2`.
/// Its outer region is `{|z| > R, 0 < (alpha1 - arg z) mod 2 pi < theta}`.
/// Circles are traversed counterclockwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub kind: ContourKind,
    #[serde(default)]
    pub alpha1: f64,
    #[serde(default)]
    pub alpha2: f64,
    #[serde(rename = "R", default)]
    pub r: f64,
    #[serde(default)]
    pub lambda_max: f64,
    #[serde(default)]
    pub center: [f64; 2],
    #[serde(default)]
    pub radius: f64,
    #[serde(flatten)]
    pub resolution: Resolution,
}

pub fn make_sector_contour(
    alpha1: f64,
    alpha2: f64,
    r: f64,
    lambda_max: f64,
    resolution: Resolution,
) -> Result<ContourSpec> {
    let spec = ContourSpec {
        kind: ContourKind::Sector,
        alpha1,
        alpha2,
        r,
        lambda_max,
        center: [0.0, 0.0],
        radius: 0.0,
        resolution,
    };
    spec.validate()?;
    Ok(spec)
}

/// Sector contour with the default truncation `lambda_max = 1e6 R`.
pub fn sector(alpha1: f64, alpha2: f64, r: f64, resolution: Resolution) -> Result<ContourSpec> {
    make_sector_contour(alpha1, alpha2, r, DEFAULT_TRUNCATION_FACTOR * r, resolution)
}

pub fn make_closed_circle(center: Complex64, radius: f64, resolution: Resolution) -> Result<ContourSpec> {
    let spec = ContourSpec {
        kind: ContourKind::ClosedCircle,
        alpha1: 0.0,
        alpha2: 0.0,
        r: 0.0,
        lambda_max: 0.0,
        center: [center.re, center.im],
        radius,
        resolution,
    };
    spec.validate()?;
    Ok(spec)
}

/// `(alpha1 - alpha2) mod 2 pi`.
pub fn sector_opening(alpha1: f64, alpha2: f64) -> f64 {
    (alpha1 - alpha2).rem_euclid(TAU)
}

impl ContourSpec {
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ContourKind::Sector => {
                if !self.alpha1.is_finite() || !self.alpha2.is_finite() {
                    return Err(Error::InvalidAngles { reason: "angles must be finite".into() });
                }
                let theta = self.theta();
                let tol = 1e-12 * (1.0 + self.alpha1.abs().max(self.alpha2.abs()));
                if theta <= tol || theta >= TAU - tol {
                    return Err(Error::InvalidAngles {
                        reason: format!(
                            "opening (alpha1 - alpha2) mod 2pi = {theta} must lie strictly inside (0, 2pi)"
                        ),
                    });
                }
                if !(self.r > 0.0 && self.r.is_finite()) {
                    return Err(Error::InvalidRadii { reason: format!("R = {} must be positive", self.r) });
                }
                if !(self.lambda_max > self.r && self.lambda_max.is_finite()) {
                    return Err(Error::InvalidRadii {
                        reason: format!("lambda_max = {} must exceed R = {}", self.lambda_max, self.r),
                    });
                }
            }
            ContourKind::ClosedCircle => {
                if !(self.radius > 0.0 && self.radius.is_finite()) {
                    return Err(Error::InvalidRadii {
                        reason: format!("radius = {} must be positive", self.radius),
                    });
                }
                if !(self.center[0].is_finite() && self.center[1].is_finite()) {
                    return Err(Error::InvalidRadii { reason: "center must be finite".into() });
                }
            }
        }
        self.resolution.validate()
    }

    pub fn require(&self, kind: ContourKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::WrongContourKind { expected: kind.name(), found: self.kind.name() })
        }
    }

    /// Opening angle `(alpha1 - alpha2) mod 2 pi` of a sector.
    pub fn theta(&self) -> f64 {
        sector_opening(self.alpha1, self.alpha2)
    }

    /// `alpha1 - theta`, the exit-ray angle measured continuously from `alpha1`.
    pub fn alpha2_effective(&self) -> f64 {
        self.alpha1 - self.theta()
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(self.center[0], self.center[1])
    }

    /// The complementary sector with the two rays exchanged.
    pub fn swapped(&self) -> Self {
        Self { alpha1: self.alpha2, alpha2: self.alpha1, ..*self }
    }

    pub fn with_resolution(&self, resolution: Resolution) -> Self {
        Self { resolution, ..*self }
    }

    /// Whether `z` lies in the region the projection selects: the outer
    /// sector region for a sector, the open disk for a circle.
    pub fn encloses(&self, z: Complex64) -> bool {
        match self.kind {
            ContourKind::Sector => {
                if z.norm() <= self.r {
                    return false;
                }
                let delta = angle_offset(self.alpha1, z);
                delta > 0.0 && delta < self.theta()
            }
            ContourKind::ClosedCircle => (z - self.center()).norm() < self.radius,
        }
    }

    /// Euclidean distance from `z` to the contour point set (rays taken to
    /// infinity).
    pub fn distance(&self, z: Complex64) -> f64 {
        match self.kind {
            ContourKind::Sector => {
                let d_in = ray_distance(z, self.alpha1, self.r);
                let d_out = ray_distance(z, self.alpha2, self.r);
                d_in.min(d_out).min(self.arc_distance(z))
            }
            ContourKind::ClosedCircle => ((z - self.center()).norm() - self.radius).abs(),
        }
    }

    fn arc_distance(&self, z: Complex64) -> f64 {
        let theta = self.theta();
        if z.norm() > 0.0 && angle_offset(self.alpha1, z) <= theta {
            return (z.norm() - self.r).abs();
        }
        let a = Complex64::from_polar(self.r, self.alpha1);
        let b = Complex64::from_polar(self.r, self.alpha2);
        let end = (z - a).norm().min((z - b).norm());
        if z.norm() == 0.0 {
            self.r
        } else {
            end
        }
    }

    /// Number of nodes `quad_nodes` produces.
    pub fn node_count(&self) -> usize {
        let g = self.resolution.gauss_order;
        match self.kind {
            ContourKind::Sector => g * (self.resolution.panels_arc + 2 * (self.resolution.panels_ray + 1)),
            ContourKind::ClosedCircle => g * self.resolution.panels_arc,
        }
    }
}

/// `(alpha - arg z) mod 2 pi` in `[0, 2 pi)`.
pub(crate) fn angle_offset(alpha: f64, z: Complex64) -> f64 {
    let d = (alpha - z.arg()).rem_euclid(TAU);
    if d >= TAU {
        0.0
    } else {
        d
    }
}

/// Distance from `z` to `{ r e^{i alpha} : r >= r0 }`.
fn ray_distance(z: Complex64, alpha: f64, r0: f64) -> f64 {
    let w = z * Complex64::from_polar(1.0, -alpha);
    if w.re >= r0 {
        w.im.abs()
    } else {
        (w - r0).norm()
    }
}

/// Discretization `sum_i w_i f(lambda_i)` of a contour integral of `f`.
#[derive(Clone, Debug)]
pub struct QuadratureRule<T> {
    pub nodes: Vec<C<T>>,
    /// Include `d lambda` with its direction of traversal.
    pub weights: Vec<C<T>>,
    pub truncation_error_estimate: f64,
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule to a scalar integrand.
    pub fn integrate(&self, mut f: impl FnMut(C<T>) -> C<T>) -> C<T> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(C::new(T::zero(), T::zero()), |acc, (&l, &w)| acc + w * f(l))
    }
}

/// Composite Gauss-Legendre rule for the contour.
///
/// On the arc the parameter is the angle; on each ray `r = R/u` with
/// geometric panels on `[R/lambda_max, 1]` followed by one tail panel on
/// `(0, R/lambda_max]`, where the transformed integrand of any `O(r^-2)`
/// function stays bounded.
pub fn quad_nodes<T: Real>(c: &ContourSpec) -> QuadratureRule<T> {
    let res = c.resolution;
    let rule = gauss_legendre(res.gauss_order);
    let mut nodes: Vec<Complex64> = Vec::with_capacity(c.node_count());
    let mut weights: Vec<Complex64> = Vec::with_capacity(c.node_count());
    let truncation;
    match c.kind {
        ContourKind::Sector => {
            let r = c.r;
            let theta = c.theta();
            let alpha1 = c.alpha1;
            let alpha2 = c.alpha2_effective();
            let u_min = r / c.lambda_max;

            // Parameter pairs (u, du) on the ray, ordered from far to near.
            let mut ray = Vec::new();
            push_panel(0.0, u_min, &rule, &mut ray);
            let tail_len = ray.len();
            let ratio = (1.0 / u_min).ln();
            let p = res.panels_ray as f64;
            for k in 0..res.panels_ray {
                let a = u_min * (ratio * k as f64 / p).exp();
                let b = if k + 1 == res.panels_ray { 1.0 } else { u_min * (ratio * (k + 1) as f64 / p).exp() };
                push_panel(a, b, &rule, &mut ray);
            }

            let e1 = Complex64::from_polar(1.0, alpha1);
            for &(u, du) in &ray {
                nodes.push(e1 * (r / u));
                weights.push(e1 * (-r / (u * u) * du));
            }
            let mut arc = Vec::new();
            for k in 0..res.panels_arc {
                let a = theta * k as f64 / res.panels_arc as f64;
                let b = theta * (k + 1) as f64 / res.panels_arc as f64;
                push_panel(a, b, &rule, &mut arc);
            }
            for &(t, dt) in &arc {
                let z = Complex64::from_polar(r, alpha1 - t);
                nodes.push(z);
                weights.push(Complex64::new(0.0, -1.0) * z * dt);
            }
            let e2 = Complex64::from_polar(1.0, alpha2);
            for &(u, du) in ray.iter().rev() {
                nodes.push(e2 * (r / u));
                weights.push(e2 * (r / (u * u) * du));
            }

            // Model integrand |lambda|^-2 over the tail panels of both rays.
            let tail: f64 = ray[..tail_len].iter().map(|&(u, du)| (u / r).powi(2) * r / (u * u) * du).sum();
            truncation = 2.0 * tail;
        }
        ContourKind::ClosedCircle => {
            let center = c.center();
            let rho = c.radius;
            let mut arc = Vec::new();
            for k in 0..res.panels_arc {
                let a = TAU * k as f64 / res.panels_arc as f64;
                let b = TAU * (k + 1) as f64 / res.panels_arc as f64;
                push_panel(a, b, &rule, &mut arc);
            }
            for &(phi, dphi) in &arc {
                let e = Complex64::from_polar(rho, phi);
                nodes.push(center + e);
                weights.push(Complex64::new(0.0, 1.0) * e * dphi);
            }
            // Model-pole error for one interior and one exterior pole.
            let inner = center + 0.5 * rho;
            let outer = center + 2.0 * rho;
            let s_in: Complex64 = nodes.iter().zip(&weights).map(|(&l, &w)| w / (l - inner)).sum();
            let s_out: Complex64 = nodes.iter().zip(&weights).map(|(&l, &w)| w / (l - outer)).sum();
            truncation = (s_in - Complex64::new(0.0, TAU)).norm() + s_out.norm();
        }
    }
    let cast = |z: &Complex64| C::new(T::lit(z.re), T::lit(z.im));
    QuadratureRule {
        nodes: nodes.iter().map(cast).collect(),
        weights: weights.iter().map(cast).collect(),
        truncation_error_estimate: truncation,
    }
}

/// Minimum distance from the spectrum of `a` to the contour.
pub fn validate_contour<T: Real>(a: &ComplexMatrix<T>, c: &ContourSpec) -> Result<f64> {
    let values = eigenvalues(a)?;
    Ok(spectrum_clearance(&values, c))
}

pub fn spectrum_clearance<T: Real>(values: &[C<T>], c: &ContourSpec) -> f64 {
    values
        .iter()
        .map(|z| c.distance(Complex64::new(z.re.as_f64(), z.im.as_f64())))
        .fold(f64::INFINITY, f64::min)
}

/// Scalar value of the sector projection formula,
/// `-(1/2 pi i) a sum_i w_i lambda_i^-1 (a - lambda_i)^-1`.
pub fn scalar_sector_projection(a: Complex64, rule: &QuadratureRule<f64>) -> Complex64 {
    let s = rule.integrate(|l| 1.0 / (l * (a - l)));
    -a * s / Complex64::new(0.0, TAU)
}

/// Scalar value of the closed-contour projection, `-(1/2 pi i) sum_i w_i (a - lambda_i)^-1`.
pub fn scalar_circle_projection(a: Complex64, rule: &QuadratureRule<f64>) -> Complex64 {
    let s = rule.integrate(|l| 1.0 / (a - l));
    -s / Complex64::new(0.0, TAU)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const HALF_PI: f64 = PI / 2.0;

    fn imag_cut(r: f64, lambda_max: f64) -> ContourSpec {
        make_sector_contour(HALF_PI, 3.0 * HALF_PI, r, lambda_max, Resolution::default()).unwrap()
    }

    #[test]
    fn sector_construction_examples() {
        let c = imag_cut(0.5, 1e4);
        assert!((c.theta() - PI).abs() < 1e-15);
        let c = make_sector_contour(HALF_PI, -HALF_PI, 0.5, 1e3, Resolution::default()).unwrap();
        assert!((c.theta() - PI).abs() < 1e-15);
        // The arc passes through +0.5 at angle zero.
        let rule = quad_nodes::<f64>(&c);
        let on_axis = rule.nodes.iter().any(|z| z.norm() > 0.49 && z.norm() < 0.51 && z.arg().abs() < 0.1);
        assert!(on_axis);
        assert!(c.encloses(Complex64::new(1.0, 0.0)));
        assert!(!c.encloses(Complex64::new(-1.0, 0.0)));
        let e = make_sector_contour(1.0, 1.0, 0.5, 10.0, Resolution::default()).unwrap_err();
        assert!(matches!(e, Error::InvalidAngles { .. }));
        let e = make_sector_contour(1.0, 1.0 + TAU, 0.5, 10.0, Resolution::default()).unwrap_err();
        assert!(matches!(e, Error::InvalidAngles { .. }));
    }

    #[test]
    fn radius_and_resolution_errors() {
        let d = Resolution::default();
        assert!(matches!(make_sector_contour(0.0, 1.0, 0.0, 10.0, d), Err(Error::InvalidRadii { .. })));
        assert!(matches!(make_sector_contour(0.0, 1.0, 1.0, 1.0, d), Err(Error::InvalidRadii { .. })));
        assert!(matches!(
            make_sector_contour(0.0, 1.0, 1.0, 10.0, Resolution::new(8, 24, 65)),
            Err(Error::InvalidResolution { .. })
        ));
        assert!(matches!(
            make_closed_circle(Complex64::new(0.0, 0.0), -1.0, d),
            Err(Error::InvalidRadii { .. })
        ));
    }

    #[test]
    fn cauchy_integral_on_unit_circle() {
        let c = make_closed_circle(Complex64::new(0.0, 0.0), 1.0, Resolution::default()).unwrap();
        let rule = quad_nodes::<f64>(&c);
        let s = rule.integrate(|l| 1.0 / l);
        assert!((s - Complex64::new(0.0, TAU)).norm() < 1e-10);
        assert!(rule.truncation_error_estimate < 1e-12);
    }

    #[test]
    fn scalar_projection_selects_right_half_plane() {
        let c = imag_cut(0.5, 1e4);
        let rule = quad_nodes::<f64>(&c);
        let p_in = scalar_sector_projection(Complex64::new(1.0, 0.0), &rule);
        let p_out = scalar_sector_projection(Complex64::new(-1.0, 0.0), &rule);
        assert!((p_in - 1.0).norm() < 1e-6, "P(1) = {p_in}");
        assert!(p_out.norm() < 1e-6, "P(-1) = {p_out}");
    }

    #[test]
    fn nodes_lie_on_contour() {
        let c = imag_cut(0.5, 1e4);
        let rule = quad_nodes::<f64>(&c);
        assert_eq!(rule.len(), c.node_count());
        for z in &rule.nodes {
            assert!(c.distance(*z) <= 1e-12 * z.norm().max(1.0), "{z}");
        }
        let t = rule.truncation_error_estimate;
        assert!((t - 2.0 / 1e4).abs() < 1e-12, "estimate {t}");
    }

    #[test]
    fn distance_examples() {
        let c = imag_cut(0.5, 1e4);
        let a = ComplexMatrix::<f64>::from_real_diag(&[1.0, -1.0]);
        assert!((validate_contour(&a, &c).unwrap() - 0.5).abs() < 1e-12);
        let on_arc = ComplexMatrix::<f64>::from_real_diag(&[0.5]);
        assert!(validate_contour(&on_arc, &c).unwrap() < 1e-12);
        let on_ray = ComplexMatrix::<f64>::from_diag(&[Complex64::new(0.0, 1.0)]);
        assert!(validate_contour(&on_ray, &c).unwrap() < 1e-12);
        // Inside the arc disk and behind the rays.
        assert!((c.distance(Complex64::new(0.0, 0.0)) - 0.5).abs() < 1e-15);
        assert!((c.distance(Complex64::new(0.1, 0.0)) - 0.4).abs() < 1e-15);
        assert!((c.distance(Complex64::new(-3.0, 2.0)) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn config_round_trip() {
        let c = imag_cut(0.25, 1e5);
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("\"R\":0.25") && json.contains("\"gauss_order\":16"));
        let back: ContourSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn refinement_changes_less_than_ten_estimates() {
        let c = make_sector_contour(HALF_PI, 3.0 * HALF_PI, 0.5, 1e4, Resolution::new(4, 12, 12)).unwrap();
        let fine = c.with_resolution(c.resolution.refined());
        for a in [Complex64::new(1.0, 0.3), Complex64::new(-2.0, 1.0), Complex64::new(3.0, -7.0)] {
            let r0 = quad_nodes::<f64>(&c);
            let r1 = quad_nodes::<f64>(&fine);
            let d = (scalar_sector_projection(a, &r0) - scalar_sector_projection(a, &r1)).norm();
            assert!(d < 10.0 * r0.truncation_error_estimate, "a = {a}: {d}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn closed_contour_moments(k in -6i32..=6, radius in 0.1f64..10.0, g in 8usize..=24) {
            let c = make_closed_circle(Complex64::new(0.0, 0.0), radius, Resolution::new(8, 1, g)).unwrap();
            let rule = quad_nodes::<f64>(&c);
            let s = rule.integrate(|l| l.powi(k));
            let expected = if k == -1 { Complex64::new(0.0, TAU) } else { Complex64::new(0.0, 0.0) };
            // Moments are compared relative to the size of the integrand on the contour.
            let scale = radius.powi(k + 1).max(1.0);
            prop_assert!((s - expected).norm() <= 1e-9 * scale, "k={} s={}", k, s);
        }

        #[test]
        fn swapped_sectors_partition_the_plane(
            alpha1 in -PI..PI,
            theta in 0.3f64..(TAU - 0.3),
            re in -20.0f64..20.0,
            im in -20.0f64..20.0,
        ) {
            let r = 0.5;
            let c = make_sector_contour(alpha1, alpha1 - theta, r, 1e6 * r, Resolution::default()).unwrap();
            let a = Complex64::new(re, im);
            // Geometric ray panels resolve poles at a fixed distance relative
            // to |a|; the default rule needs about 20% for 1e-6.
            prop_assume!(c.distance(a) > 0.2 * a.norm().max(1.0) && a.norm() > r + 0.05);
            let p = scalar_sector_projection(a, &quad_nodes(&c));
            let q = scalar_sector_projection(a, &quad_nodes(&c.swapped()));
            prop_assert!((p + q - 1.0).norm() < 1e-6, "p={} q={}", p, q);
            let expected = if c.encloses(a) { 1.0 } else { 0.0 };
            prop_assert!((p - expected).norm() < 1e-6);
        }
    }
}
