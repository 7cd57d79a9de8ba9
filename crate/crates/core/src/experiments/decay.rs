use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::fit::{default_sample_count, log_spaced};
use super::{ExperimentKind, ExperimentReport, ReportSpec};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, inverse, ComplexMatrix};
use crate::scalar::{Real, C};
use crate::symbol1d::{cutoff_resolvent_symbol, op_from_symbol, sobolev_matrix_norm, CutoffFunction, DiscretizedOperator, SymbolFunction};

/// Relative distance below which a spectral point counts as on the sampling ray.
const RAY_TOLERANCE: f64 = 1e-6;
/// Minimum abscissa span, in decades, for the fits of these experiments.
pub const EXPERIMENT_MIN_DECADES: f64 = 0.5;

fn default_padding() -> usize {
    2
}

pub(super) fn default_min_decades() -> f64 {
    EXPERIMENT_MIN_DECADES
}

/// Sampling of `|lambda|` along a ray.
fn ray_samples(angle: f64, lo: f64, hi: f64, n: usize) -> Result<Vec<(f64, Complex64)>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidExperiment { reason: format!("lambda range [{lo}, {hi}] must satisfy 0 < min < max") });
    }
    let n = if n == 0 { default_sample_count(lo, hi) } else { n };
    Ok(log_spaced(lo, hi, n).into_iter().map(|r| (r, Complex64::from_polar(r, angle))).collect())
}

/// `(K / 4)^m`, the largest `|lambda|` whose resolvent is resolved at cutoff `K`.
pub fn resolved_ceiling(k_max: usize, order: f64) -> f64 {
    (k_max as f64 / 4.0).powf(order)
}

fn check_ceiling(lambda_max: f64, k_max: usize, order: f64) -> Result<()> {
    let ceiling = resolved_ceiling(k_max, order);
    if lambda_max > ceiling {
        return Err(Error::RangeOutsideResolvedRegime { lambda_max, ceiling });
    }
    Ok(())
}

/// Errors when an eigenvalue of `a` lies on the segment of the ray sampled.
fn check_ray<T: Real>(a: &ComplexMatrix<T>, angle: f64, lo: f64, hi: f64) -> Result<()> {
    let dir = Complex64::from_polar(1.0, angle);
    for z in eigenvalues(a)? {
        let z = Complex64::new(z.re.as_f64(), z.im.as_f64());
        let r = (z * dir.conj()).re.clamp(lo, hi);
        let distance = (z - dir * r).norm();
        if distance <= RAY_TOLERANCE * (1.0 + r) {
            return Err(Error::RayHitsSpectrum { angle, distance });
        }
    }
    Ok(())
}

fn to_c<T: Real>(z: Complex64) -> C<T> {
    C::new(T::lit(z.re), T::lit(z.im))
}

fn resolvent<T: Real>(a: &ComplexMatrix<T>, lambda: Complex64, angle: f64) -> Result<ComplexMatrix<T>> {
    inverse(&a.shifted(to_c(lambda))).map_err(|_| Error::RayHitsSpectrum { angle, distance: 0.0 })
}

/// Centred window of modes `|k| <= k` of a matrix on modes `|k| <= kb`.
fn window<T: Real>(m: &ComplexMatrix<T>, kb: usize, k: usize, n: usize) -> ComplexMatrix<T> {
    m.block(n * (kb - k), n * (2 * k + 1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolventDecayParams {
    pub ray_angle: f64,
    pub s: f64,
    /// Gain in regularity, `0 <= p <= m`.
    pub p: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Zero selects twelve points per decade.
    #[serde(default)]
    pub n_samples: usize,
    pub slope_tolerance: f64,
    #[serde(default = "default_min_decades")]
    pub min_decades: f64,
}

/// `||(A - lambda)^-1||_{s, s+p}` at log-spaced `lambda` on a ray; expected
/// slope `-1 + p/m`.
pub fn resolvent_decay_experiment<T: Real>(
    a: &DiscretizedOperator<T>,
    params: &ResolventDecayParams,
) -> Result<ExperimentReport> {
    let m = a.order;
    if !(m > 0.0) || !(0.0..=m).contains(&params.p) {
        return Err(Error::InvalidExperiment { reason: format!("need order m > 0 and 0 <= p <= m (m = {m}, p = {})", params.p) });
    }
    check_ceiling(params.lambda_max, a.k_max, m)?;
    check_ray(&a.matrix, params.ray_angle, params.lambda_min, params.lambda_max)?;
    let lambdas = ray_samples(params.ray_angle, params.lambda_min, params.lambda_max, params.n_samples)?;
    let samples = lambdas
        .par_iter()
        .map(|&(r, l)| {
            let res = resolvent(&a.matrix, l, params.ray_angle)?;
            Ok((r, sobolev_matrix_norm(&res, a.k_max, a.fiber_dim, params.s, params.s + params.p).as_f64()))
        })
        .collect::<Result<Vec<_>>>()?;
    let preset = a.symbol.clone().unwrap_or_else(|| "matrix".into());
    let spec = ReportSpec {
        kind: ExperimentKind::ResolventDecay,
        preset: &preset,
        parameters: json!({ "operator": preset, "k_max": a.k_max, "order": m, "params": params }),
        expected_slope: -1.0 + params.p / m,
        slope_tolerance: params.slope_tolerance,
        min_decades: params.min_decades,
        fit_only: false,
    };
    ExperimentReport::assemble(spec, samples, 0.0)
}

/// Parameters shared by the parametrix and composition experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapParams {
    pub k_max: usize,
    pub ray_angle: f64,
    pub s: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    #[serde(default)]
    pub n_samples: usize,
    pub slope_tolerance: f64,
    /// Operators are formed on modes `|k| <= padding * K`, then restricted
    /// to `|k| <= K`.
    #[serde(default = "default_padding")]
    pub padding: usize,
    #[serde(default = "default_min_decades")]
    pub min_decades: f64,
}

impl GapParams {
    fn padded(&self) -> Result<usize> {
        if self.k_max < 1 || self.padding < 1 {
            return Err(Error::InvalidExperiment { reason: "K and padding must be at least 1".into() });
        }
        Ok(self.k_max * self.padding)
    }
}

/// `||Op(psi (a_m - lambda)^-1) - (A - lambda)^-1||_{s, s+m}` with `A = Op(a)`;
/// expected slope `-min(1/m, 1)`.
pub fn parametrix_gap_experiment<T: Real>(
    a: &SymbolFunction<T>,
    psi: &CutoffFunction,
    params: &GapParams,
) -> Result<ExperimentReport> {
    let m = a.order();
    if !(m > 0.0) {
        return Err(Error::InvalidExperiment { reason: format!("symbol order {m} must be positive") });
    }
    let kb = params.padded()?;
    check_ceiling(params.lambda_max, kb, m)?;
    let big = op_from_symbol(a, kb)?;
    check_ray(&big.matrix, params.ray_angle, params.lambda_min, params.lambda_max)?;
    let n = a.fiber_dim();
    let lambdas = ray_samples(params.ray_angle, params.lambda_min, params.lambda_max, params.n_samples)?;
    let samples = lambdas
        .par_iter()
        .map(|&(r, l)| {
            let res = resolvent(&big.matrix, l, params.ray_angle)?;
            let g = op_from_symbol(&cutoff_resolvent_symbol(a, psi, to_c(l))?, kb)?;
            let gap = window(&(&g.matrix - &res), kb, params.k_max, n);
            Ok((r, sobolev_matrix_norm(&gap, params.k_max, n, params.s, params.s + m).as_f64()))
        })
        .collect::<Result<Vec<_>>>()?;
    let spec = ReportSpec {
        kind: ExperimentKind::ParametrixGap,
        preset: a.name(),
        parameters: json!({ "operator": a.name(), "order": m, "cutoff": psi, "params": params }),
        expected_slope: -(1.0 / m).min(1.0),
        slope_tolerance: params.slope_tolerance,
        min_decades: params.min_decades,
        fit_only: m != 1.0,
    };
    ExperimentReport::assemble(spec, samples, 0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositionParams {
    pub gap: GapParams,
    /// Expected slope has no independent oracle.
    #[serde(default)]
    pub fit_only: bool,
}

/// `||Op(g) Op(f) - Op(g f)||_{s, s+m-r}` for the pair `(f, g)` returned by
/// `family(lambda)`, `f` of order `r` and `g` of order `-m`; expected slope
/// `-min(1/m, 1)`. A gap that vanishes to rounding at every sample is
/// reported as degenerate-zero.
pub fn composition_gap_experiment<T, F>(label: &str, family: F, params: &CompositionParams) -> Result<ExperimentReport>
where
    T: Real,
    F: Fn(C<T>) -> Result<(SymbolFunction<T>, SymbolFunction<T>)> + Sync,
{
    let gp = &params.gap;
    let kb = gp.padded()?;
    let lambdas = ray_samples(gp.ray_angle, gp.lambda_min, gp.lambda_max, gp.n_samples)?;
    let (f0, g0) = family(to_c(lambdas[0].1))?;
    let (r, m) = (f0.order(), -g0.order());
    if !(m > 0.0) || !(0.0..=m).contains(&r) {
        return Err(Error::InvalidExperiment { reason: format!("need m > 0 and 0 <= r <= m (r = {r}, m = {m})") });
    }
    check_ceiling(gp.lambda_max, kb, m)?;
    let n = f0.fiber_dim();
    let target = gp.s + m - r;
    let rows = lambdas
        .par_iter()
        .map(|&(x, l)| {
            let (f, g) = family(to_c(l))?;
            let opf = op_from_symbol(&f, kb)?;
            let opg = op_from_symbol(&g, kb)?;
            let opgf = op_from_symbol(&g.product(&f), kb)?;
            let prod = opg.matrix.matmul(&opf.matrix);
            let gap = window(&(&prod - &opgf.matrix), kb, gp.k_max, n);
            let scale = window(&prod, kb, gp.k_max, n).frobenius_norm().as_f64();
            Ok((x, sobolev_matrix_norm(&gap, gp.k_max, n, gp.s, target).as_f64(), scale))
        })
        .collect::<Result<Vec<_>>>()?;
    let zero_scale = rows.iter().map(|r| r.2).fold(0.0, f64::max) * 1e3 * T::epsilon().as_f64();
    let samples = rows.into_iter().map(|(x, y, _)| (x, y)).collect();
    let spec = ReportSpec {
        kind: ExperimentKind::CompositionGap,
        preset: label,
        parameters: json!({ "family": label, "f": f0.name(), "g": g0.name(), "r": r, "m": m, "params": params }),
        expected_slope: -(1.0 / m).min(1.0),
        slope_tolerance: gp.slope_tolerance,
        min_decades: gp.min_decades,
        fit_only: params.fit_only,
    };
    ExperimentReport::assemble(spec, samples, zero_scale)
}
