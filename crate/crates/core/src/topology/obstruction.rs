use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::sphere::{chern_number, ChernResult, SphereBundleSample};
use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, ComplexMatrix};
use crate::projections::aps_projection;
use crate::scalar::{Real, C};

/// Projector families over the sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BundlePreset {
    /// Constant `diag(1, 0, ..., 0)`.
    Trivial,
    /// `(I + xi . sigma) / 2`.
    Monopole,
    /// The monopole pulled back by the reflection `y -> -y`.
    AntiMonopole,
    /// Monopole and anti-monopole as a block direct sum (`N >= 4`).
    MonopoleAntiMonopole,
    /// The monopole pulled back by the map doubling the azimuth.
    Pullback2,
}

impl BundlePreset {
    pub const ALL: [BundlePreset; 5] = [
        BundlePreset::Trivial,
        BundlePreset::Monopole,
        BundlePreset::AntiMonopole,
        BundlePreset::MonopoleAntiMonopole,
        BundlePreset::Pullback2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BundlePreset::Trivial => "trivial",
            BundlePreset::Monopole => "monopole",
            BundlePreset::AntiMonopole => "anti_monopole",
            BundlePreset::MonopoleAntiMonopole => "monopole_anti_monopole",
            BundlePreset::Pullback2 => "pullback2",
        }
    }

    /// Smallest fiber dimension carrying the family.
    pub fn min_fiber_dim(self) -> usize {
        match self {
            BundlePreset::Trivial => 1,
            BundlePreset::MonopoleAntiMonopole => 4,
            _ => 2,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            BundlePreset::Trivial => "constant rank-one projection; Chern number 0",
            BundlePreset::Monopole => "(I + xi.sigma)/2 on C^2; Chern number +-1",
            BundlePreset::AntiMonopole => "monopole composed with a reflection; opposite Chern number",
            BundlePreset::MonopoleAntiMonopole => "monopole (+) anti-monopole on C^4; Chern number 0",
            BundlePreset::Pullback2 => "monopole pulled back by azimuth doubling; twice the monopole",
        }
    }
}

impl fmt::Display for BundlePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BundlePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidBundle { reason: format!("unknown bundle preset `{s}`") })
    }
}

fn monopole<T: Real>(v: [f64; 3]) -> [[C<T>; 2]; 2] {
    let h = |x: f64, y: f64| C::new(T::lit(0.5 * x), T::lit(0.5 * y));
    [[h(1.0 + v[2], 0.0), h(v[0], -v[1])], [h(v[0], v[1]), h(1.0 - v[2], 0.0)]]
}

fn place<T: Real>(p: &mut ComplexMatrix<T>, offset: usize, block: [[C<T>; 2]; 2]) {
    for (i, row) in block.iter().enumerate() {
        for (j, &z) in row.iter().enumerate() {
            p[(offset + i, offset + j)] = z;
        }
    }
}

/// `P(xi)` of `preset` in fiber dimension `n`, padded with a zero block.
pub fn bundle_preset<T: Real>(preset: BundlePreset, n: usize, v: [f64; 3]) -> Result<ComplexMatrix<T>> {
    if n < preset.min_fiber_dim() {
        return Err(Error::InvalidBundle {
            reason: format!("preset `{preset}` needs fiber dimension >= {}", preset.min_fiber_dim()),
        });
    }
    let mut p = ComplexMatrix::zeros(n);
    match preset {
        BundlePreset::Trivial => p[(0, 0)] = C::new(T::one(), T::zero()),
        BundlePreset::Monopole => place(&mut p, 0, monopole(v)),
        BundlePreset::AntiMonopole => place(&mut p, 0, monopole([v[0], -v[1], v[2]])),
        BundlePreset::MonopoleAntiMonopole => {
            place(&mut p, 0, monopole(v));
            place(&mut p, 2, monopole([v[0], -v[1], v[2]]));
        }
        BundlePreset::Pullback2 => {
            let rho2 = v[0] * v[0] + v[1] * v[1];
            let w = if rho2 > 0.0 {
                // (cos 2phi, sin 2phi) sin(theta) from (cos phi, sin phi) sin(theta).
                let rho = rho2.sqrt();
                [(v[0] * v[0] - v[1] * v[1]) / rho, 2.0 * v[0] * v[1] / rho, v[2]]
            } else {
                v
            };
            place(&mut p, 0, monopole(w));
        }
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub preset: BundlePreset,
    pub fiber_dim: usize,
    pub level: u32,
    pub vertices: usize,
    /// Largest distance of an eigenvalue of `a = 2P - I` from `{-1, 1}`.
    pub max_spectrum_defect: f64,
    /// Smallest `|Re lambda|` over the grid.
    pub axis_clearance: f64,
    /// Rank of the positive spectral bundle.
    pub positive_rank: usize,
    pub chern: ChernResult,
    /// A nonzero Chern number rules out any extension of `a` over the ball
    /// whose spectrum avoids the imaginary axis.
    pub obstructed: bool,
}

/// Builds `a(xi) = 2 P(xi) - I`, checks its spectrum is `{-1, 1}`, and
/// computes the Chern number of the bundle `ran P+(a(xi))`.
pub fn obstruction_demo<T: Real>(preset: BundlePreset, n: usize, level: u32) -> Result<ObstructionReport> {
    bundle_preset::<T>(preset, n, [0.0, 0.0, 1.0])?;
    let grid = super::sphere::icosphere(level);
    let mut symbols = Vec::with_capacity(grid.vertices.len());
    let mut max_spectrum_defect = 0.0f64;
    let mut axis_clearance = f64::INFINITY;
    for &v in &grid.vertices {
        let p = bundle_preset::<T>(preset, n, v)?;
        let a = &p.scale_real(T::lit(2.0)) - &ComplexMatrix::identity(n);
        for l in eigvalsh(&a.hermitian_part())? {
            let l = l.as_f64();
            max_spectrum_defect = max_spectrum_defect.max((l.abs() - 1.0).abs());
            axis_clearance = axis_clearance.min(l.abs());
        }
        symbols.push(a);
    }
    let positive = symbols.iter().map(|a| aps_projection(a, 0.0).map(|r| r.p)).collect::<Result<Vec<_>>>()?;
    let bundle = SphereBundleSample::new(grid, positive)?;
    let chern = chern_number(&bundle)?;
    Ok(ObstructionReport {
        preset,
        fiber_dim: n,
        level,
        vertices: bundle.grid().vertices.len(),
        max_spectrum_defect,
        axis_clearance,
        positive_rank: bundle.rank(),
        obstructed: chern.chern != 0,
        chern,
    })
}
