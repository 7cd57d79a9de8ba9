//! Hyperbolic matrices and their components, matrix paths and spectral flow,
//! the one-ray deformation check and the Chern-number obstruction for the
//! positive spectral bundle over the sphere.

mod obstruction;
mod seeley;
mod sphere;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use obstruction::{bundle_preset, obstruction_demo, BundlePreset, ObstructionReport};
pub use seeley::{seeley_deformation_check, seeley_symbol, SeeleyReport, SpectralCut};
pub use sphere::{chern_number, icosphere, ChernResult, Icosphere, SphereBundleSample, CHERN_ROUNDING_LIMIT, MIN_LEVEL};

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, operator_norm_2, ComplexMatrix};
use crate::scalar::Real;

/// Smallest `|Re lambda|` accepted by [`component_index`].
pub const AXIS_TOLERANCE: f64 = 1e-8;
/// Smallest `|Re lambda|` accepted along a path or at path endpoints.
pub const PATH_AXIS_TOLERANCE: f64 = 1e-6;

fn axis_clearance<T: Real>(a: &ComplexMatrix<T>) -> Result<(usize, f64)> {
    let values = eigenvalues(a)?;
    let positive = values.iter().filter(|z| z.re > T::zero()).count();
    let clearance = values.iter().map(|z| z.re.abs().as_f64()).fold(f64::INFINITY, f64::min);
    Ok((positive, clearance))
}

/// Number of eigenvalues with positive real part, i.e. the rank of `P+(a)`.
pub fn component_index<T: Real>(a: &ComplexMatrix<T>) -> Result<usize> {
    let (k, clearance) = axis_clearance(a)?;
    if clearance <= AXIS_TOLERANCE {
        return Err(Error::EigenvalueOnAxis { real_part: clearance });
    }
    Ok(k)
}

/// Samples `(t, A_t)` of a matrix path on `[0, 1]`.
#[derive(Clone, Debug)]
pub struct MatrixPath<T> {
    samples: Vec<(f64, ComplexMatrix<T>)>,
    max_step: f64,
}

impl<T: Real> MatrixPath<T> {
    /// Requires `t` strictly increasing from 0 to 1 and a common dimension.
    pub fn new(samples: Vec<(f64, ComplexMatrix<T>)>) -> Result<Self> {
        let invalid = |reason: String| Err(Error::InvalidPath { reason });
        if samples.len() < 2 {
            return invalid(format!("{} samples; at least 2 needed", samples.len()));
        }
        let dim = samples[0].1.dim();
        if samples[0].0 != 0.0 || samples[samples.len() - 1].0 != 1.0 {
            return invalid("path must start at t = 0 and end at t = 1".into());
        }
        let mut max_step = 0.0f64;
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return invalid(format!("t not strictly increasing at t = {}", w[1].0));
            }
            if w[1].1.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: w[1].1.dim() });
            }
            max_step = max_step.max(operator_norm_2(&(&w[1].1 - &w[0].1)).as_f64());
        }
        Ok(Self { samples, max_step })
    }

    /// `n + 1` equispaced samples of `f` on `[0, 1]`.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> ComplexMatrix<T>) -> Result<Self> {
        let n = n.max(1);
        Self::new((0..=n).map(|i| if i == n { 1.0 } else { i as f64 / n as f64 }).map(|t| (t, f(t))).collect())
    }

    pub fn samples(&self) -> &[(f64, ComplexMatrix<T>)] {
        &self.samples
    }

    pub fn dim(&self) -> usize {
        self.samples[0].1.dim()
    }

    /// Largest `||A_{t_{i+1}} - A_{t_i}||_2`.
    pub fn max_step(&self) -> f64 {
        self.max_step
    }

    pub fn start(&self) -> &ComplexMatrix<T> {
        &self.samples[0].1
    }

    pub fn end(&self) -> &ComplexMatrix<T> {
        &self.samples[self.samples.len() - 1].1
    }

    /// `t -> 1 - t`.
    pub fn reversed(&self) -> Self {
        let samples = self.samples.iter().rev().map(|(t, a)| (1.0 - t, a.clone())).collect();
        Self { samples, max_step: self.max_step }
    }

    /// Runs `self` on `[0, 1/2]` and `other` on `[1/2, 1]`; the end of `self`
    /// must coincide with the start of `other`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let gap = operator_norm_2(&(self.end() - other.start())).as_f64();
        if gap > 1e-12 * (1.0 + operator_norm_2(self.end()).as_f64()) {
            return Err(Error::InvalidPath { reason: format!("paths do not meet (gap {gap:e})") });
        }
        let mut samples: Vec<_> = self.samples.iter().map(|(t, a)| (0.5 * t, a.clone())).collect();
        samples.extend(other.samples.iter().skip(1).map(|(t, a)| (0.5 + 0.5 * t, a.clone())));
        Self::new(samples)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathInvariance {
    pub invariant: bool,
    pub indices: Vec<usize>,
}

/// Component index of every sample; `invariant` when they all agree.
pub fn path_component_invariance<T: Real>(p: &MatrixPath<T>) -> Result<PathInvariance> {
    let indices = p
        .samples
        .par_iter()
        .map(|(t, a)| {
            let (k, clearance) = axis_clearance(a)?;
            if clearance <= PATH_AXIS_TOLERANCE {
                return Err(Error::EigenvalueOnAxisAt { t: *t });
            }
            Ok(k)
        })
        .collect::<Result<Vec<_>>>()?;
    let invariant = indices.windows(2).all(|w| w[0] == w[1]);
    Ok(PathInvariance { invariant, indices })
}

/// Consecutive samples between which the count of eigenvalues with positive
/// real part changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub t_before: f64,
    pub t_after: f64,
    /// Change in the count of eigenvalues with `Re > 0`.
    pub change: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralFlowReport {
    pub spectral_flow: i64,
    pub start_index: usize,
    pub end_index: usize,
    /// Smallest `|Re lambda|` at each sample.
    pub axis_clearance: Vec<f64>,
    pub crossings: Vec<Crossing>,
}

/// `component_index(A_1) - component_index(A_0)`.
pub fn spectral_flow<T: Real>(p: &MatrixPath<T>) -> Result<i64> {
    Ok(spectral_flow_report(p)?.spectral_flow)
}

/// [`spectral_flow`] with per-sample crossing diagnostics.
pub fn spectral_flow_report<T: Real>(p: &MatrixPath<T>) -> Result<SpectralFlowReport> {
    let per_sample = p.samples.par_iter().map(|(_, a)| axis_clearance(a)).collect::<Result<Vec<_>>>()?;
    let last = per_sample.len() - 1;
    for (i, t) in [(0, 0.0), (last, 1.0)] {
        if per_sample[i].1 <= PATH_AXIS_TOLERANCE {
            return Err(Error::EndpointOnAxis { t });
        }
    }
    let crossings = per_sample
        .windows(2)
        .zip(p.samples.windows(2))
        .filter(|(k, _)| k[0].0 != k[1].0)
        .map(|(k, s)| Crossing { t_before: s[0].0, t_after: s[1].0, change: k[1].0 as i64 - k[0].0 as i64 })
        .collect();
    let (start_index, end_index) = (per_sample[0].0, per_sample[last].0);
    Ok(SpectralFlowReport {
        spectral_flow: end_index as i64 - start_index as i64,
        start_index,
        end_index,
        axis_clearance: per_sample.iter().map(|s| s.1).collect(),
        crossings,
    })
}

#[cfg(test)]
mod tests;
