use std::collections::HashMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh, ComplexMatrix, LuFactors};
use crate::scalar::{Real, C};

/// Largest tolerated `||P^2 - P||` and `||P - P*||` per vertex.
const PROJECTOR_TOLERANCE: f64 = 1e-10;
/// Rounding residual at which the Chern sum is no longer trusted.
pub const CHERN_ROUNDING_LIMIT: f64 = 0.05;
/// Smallest subdivision level accepted by [`chern_number`].
pub const MIN_LEVEL: u32 = 3;

/// Subdivided icosahedron on the unit sphere. Triangles are oriented
/// counter-clockwise seen from outside.
#[derive(Clone, Debug)]
pub struct Icosphere {
    pub level: u32,
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn outward(v: &[[f64; 3]], t: [usize; 3]) -> bool {
    let (a, b, c) = (v[t[0]], v[t[1]], v[t[2]]);
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let w = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let n = [u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]];
    n[0] * a[0] + n[1] * a[1] + n[2] * a[2] > 0.0
}

/// Icosahedron refined `level` times by edge midpoints: `20 * 4^level` triangles.
pub fn icosphere(level: u32) -> Icosphere {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<[f64; 3]> = [
        [-1.0, g, 0.0],
        [1.0, g, 0.0],
        [-1.0, -g, 0.0],
        [1.0, -g, 0.0],
        [0.0, -1.0, g],
        [0.0, 1.0, g],
        [0.0, -1.0, -g],
        [0.0, 1.0, -g],
        [g, 0.0, -1.0],
        [g, 0.0, 1.0],
        [-g, 0.0, -1.0],
        [-g, 0.0, 1.0],
    ]
    .into_iter()
    .map(normalize)
    .collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..level {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<[f64; 3]>| {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (vertices[a], vertices[b]);
                vertices.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for [a, b, c] in triangles {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        triangles = next;
    }
    for t in &mut triangles {
        if !outward(&vertices, *t) {
            t.swap(1, 2);
        }
    }
    Icosphere { level, vertices, triangles }
}

/// Hermitian projections `P(xi)` sampled at the vertices of an icosphere.
#[derive(Clone, Debug)]
pub struct SphereBundleSample<T> {
    grid: Icosphere,
    projectors: Vec<ComplexMatrix<T>>,
    rank: usize,
}

impl<T: Real> SphereBundleSample<T> {
    /// Checks idempotency, self-adjointness, common dimension and constant rank.
    pub fn new(grid: Icosphere, projectors: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let invalid = |reason: String| Err(Error::InvalidBundle { reason });
        if projectors.len() != grid.vertices.len() {
            return invalid(format!("{} projectors for {} vertices", projectors.len(), grid.vertices.len()));
        }
        let Some(first) = projectors.first() else {
            return invalid("empty grid".into());
        };
        let n = first.dim();
        let mut rank = None;
        for (i, p) in projectors.iter().enumerate() {
            if p.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: p.dim() });
            }
            let idem = (&p.matmul(p) - p).max_abs().as_f64() * n as f64;
            let herm = (p - &p.adjoint()).max_abs().as_f64() * n as f64;
            if idem > PROJECTOR_TOLERANCE || herm > PROJECTOR_TOLERANCE {
                return invalid(format!("vertex {i}: idempotency {idem:e}, hermiticity {herm:e}"));
            }
            let r = p.trace().re.as_f64().round() as usize;
            match rank {
                None => rank = Some(r),
                Some(k) if k != r => return invalid(format!("rank changes from {k} to {r} at vertex {i}")),
                _ => {}
            }
        }
        Ok(Self { grid, projectors, rank: rank.unwrap_or(0) })
    }

    /// Samples `f` at the vertices of `icosphere(level)`.
    pub fn from_fn(level: u32, f: impl Fn([f64; 3]) -> ComplexMatrix<T> + Sync) -> Result<Self> {
        let grid = icosphere(level);
        let projectors = grid.vertices.par_iter().map(|&v| f(v)).collect();
        Self::new(grid, projectors)
    }

    pub fn grid(&self) -> &Icosphere {
        &self.grid
    }

    pub fn projectors(&self) -> &[ComplexMatrix<T>] {
        &self.projectors
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn fiber_dim(&self) -> usize {
        self.projectors[0].dim()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChernResult {
    pub chern: i64,
    /// Raw plaquette phase sum divided by `2 pi`.
    pub raw: f64,
    /// `|raw - chern|`.
    pub residual: f64,
    pub level: u32,
    pub triangles: usize,
}

/// Orthonormal basis (as columns of an `n x k` block) of the range of `p`.
fn range_basis<T: Real>(p: &ComplexMatrix<T>, rank: usize) -> Result<Vec<Vec<C<T>>>> {
    let e = eigh(p)?;
    let n = p.dim();
    Ok((n - rank..n).map(|j| e.vectors.column(j)).collect())
}

/// `det(U_a^* U_b)` for two frames.
fn link<T: Real>(a: &[Vec<C<T>>], b: &[Vec<C<T>>]) -> Result<Complex64> {
    let k = a.len();
    if k == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let overlap = ComplexMatrix::from_fn(k, |i, j| {
        a[i].iter().zip(&b[j]).fold(C::new(T::zero(), T::zero()), |s, (x, y)| s + x.conj() * *y)
    });
    let d = LuFactors::new(&overlap)
        .map_err(|_| Error::InvalidBundle { reason: "neighbouring fibers are orthogonal; refine the grid".into() })?
        .determinant();
    Ok(Complex64::new(d.re.as_f64(), d.im.as_f64()))
}

/// First Chern number of the range bundle by the lattice field-strength
/// method: each triangle contributes the phase of the product of its link
/// determinants, and the total is `-(1/2 pi)` times the phase sum, matching
/// `(i / 2 pi) int tr(P dP ^ dP)` with the outward orientation.
pub fn chern_number<T: Real>(b: &SphereBundleSample<T>) -> Result<ChernResult> {
    if b.grid.level < MIN_LEVEL {
        return Err(Error::InvalidBundle { reason: format!("subdivision level {} below {MIN_LEVEL}", b.grid.level) });
    }
    let frames = b.projectors.par_iter().map(|p| range_basis(p, b.rank)).collect::<Result<Vec<_>>>()?;
    let phases = b
        .grid
        .triangles
        .par_iter()
        .map(|&[i, j, k]| {
            let u = link(&frames[i], &frames[j])? * link(&frames[j], &frames[k])? * link(&frames[k], &frames[i])?;
            Ok(u.arg())
        })
        .collect::<Result<Vec<f64>>>()?;
    let raw = -phases.iter().sum::<f64>() / TAU;
    let chern = raw.round();
    let residual = (raw - chern).abs();
    if residual >= CHERN_ROUNDING_LIMIT {
        return Err(Error::RoundingUnsafe { residual });
    }
    Ok(ChernResult { chern: chern as i64, raw, residual, level: b.grid.level, triangles: b.grid.triangles.len() })
}
