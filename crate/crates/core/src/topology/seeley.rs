use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Values closer than this to a cut count as touching it.
const TOUCH_TOLERANCE: f64 = 1e-12;

/// The deformed one-dimensional symbol: `xi` for `|xi| >= 1`, and
/// `exp(-i (1 - xi) pi / 2)` inside, tracing the lower unit half-circle from
/// `-1` through `-i` to `1`.
pub fn seeley_symbol(xi: f64) -> Complex64 {
    if xi.abs() >= 1.0 {
        Complex64::new(xi, 0.0)
    } else {
        Complex64::from_polar(1.0, -(1.0 - xi) * FRAC_PI_2)
    }
}

/// Spectral cut the deformed symbol must avoid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "angle")]
pub enum SpectralCut {
    /// The closed ray `{r e^{i alpha} : r >= 0}`.
    Ray(f64),
    /// Both imaginary half-axes.
    ImaginaryAxis,
}

impl SpectralCut {
    fn rays(&self) -> Vec<f64> {
        match *self {
            SpectralCut::Ray(a) => vec![a],
            SpectralCut::ImaginaryAxis => vec![FRAC_PI_2, 3.0 * FRAC_PI_2],
        }
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        self.rays().into_iter().map(|a| ray_distance(z, a)).fold(f64::INFINITY, f64::min)
    }

    /// Whether the segment `[z0, z1]` meets the cut.
    fn crossed_by(&self, z0: Complex64, z1: Complex64) -> bool {
        self.rays().into_iter().any(|a| {
            let rot = Complex64::from_polar(1.0, -a);
            let (w0, w1) = (z0 * rot, z1 * rot);
            if (w0.im > 0.0) == (w1.im > 0.0) && w0.im != 0.0 && w1.im != 0.0 {
                return false;
            }
            let s = if w0.im == w1.im { 0.0 } else { w0.im / (w0.im - w1.im) };
            w0.re + s * (w1.re - w0.re) >= 0.0
        })
    }
}

fn ray_distance(z: Complex64, angle: f64) -> f64 {
    let w = z * Complex64::from_polar(1.0, -angle);
    if w.re >= 0.0 {
        w.im.abs()
    } else {
        z.norm()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeeleyReport {
    pub cut: SpectralCut,
    /// Smallest distance from a sampled value to the cut.
    pub min_distance: f64,
    pub argmin_xi: f64,
    /// Grid intervals `[xi_i, xi_{i+1}]` whose value segment meets the cut.
    pub crossings: Vec<[f64; 2]>,
    /// Jumps of the symbol across `xi = -1` and `xi = 1`.
    pub seam_jumps: [f64; 2],
    pub passed: bool,
}

/// Checks that [`seeley_symbol`] avoids `cut` on the sorted `grid`.
pub fn seeley_deformation_check(grid: &[f64], cut: SpectralCut) -> SeeleyReport {
    let mut xs = grid.to_vec();
    xs.sort_by(f64::total_cmp);
    let values: Vec<Complex64> = xs.iter().map(|&x| seeley_symbol(x)).collect();
    let (mut min_distance, mut argmin_xi) = (f64::INFINITY, f64::NAN);
    for (&x, &z) in xs.iter().zip(&values) {
        let d = cut.distance(z);
        if d < min_distance {
            (min_distance, argmin_xi) = (d, x);
        }
    }
    let crossings: Vec<[f64; 2]> = xs
        .windows(2)
        .zip(values.windows(2))
        .filter(|(_, v)| cut.crossed_by(v[0], v[1]))
        .map(|(x, _)| [x[0], x[1]])
        .collect();
    let below = |x: f64| seeley_symbol(x - x.abs() * f64::EPSILON * 4.0);
    let above = |x: f64| seeley_symbol(x + x.abs() * f64::EPSILON * 4.0);
    let seam_jumps = [(above(-1.0) - below(-1.0)).norm(), (above(1.0) - below(1.0)).norm()];
    let passed = crossings.is_empty() && min_distance > TOUCH_TOLERANCE && seam_jumps.iter().all(|&j| j < 1e-6);
    SeeleyReport { cut, min_distance, argmin_xi, crossings, seam_jumps, passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..=n).map(|i| -2.0 + 4.0 * i as f64 / n as f64).collect()
    }

    #[test]
    fn symbol_examples() {
        assert_eq!(seeley_symbol(2.0), Complex64::new(2.0, 0.0));
        assert!((seeley_symbol(1.0) - 1.0).norm() < 1e-15);
        assert!((seeley_symbol(0.0) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((SpectralCut::Ray(FRAC_PI_2).distance(seeley_symbol(0.0)) - 1.0).abs() < 1e-15);
        assert!((SpectralCut::Ray(FRAC_PI_2).distance(seeley_symbol(2.0)) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn one_ray_passes_two_rays_fail() {
        for n in [400, 401, 1000] {
            let r = seeley_deformation_check(&grid(n), SpectralCut::Ray(FRAC_PI_2));
            assert!(r.passed, "{r:?}");
            assert!(r.min_distance > 0.9);
            assert!(r.seam_jumps.iter().all(|&j| j < 1e-12));
            let r = seeley_deformation_check(&grid(n), SpectralCut::ImaginaryAxis);
            assert!(!r.passed);
            assert_eq!(r.crossings.len(), 1, "{r:?}");
            assert!(r.crossings[0][0] <= 0.0 && r.crossings[0][1] >= 0.0);
        }
    }

    #[test]
    fn lower_ray_is_hit() {
        let r = seeley_deformation_check(&grid(400), SpectralCut::Ray(-FRAC_PI_2));
        assert!(!r.passed);
        assert!(r.min_distance < 1e-12);
        let r = seeley_deformation_check(&grid(400), SpectralCut::Ray(std::f64::consts::PI));
        assert!(!r.passed);
    }
}
