use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{ExperimentKind, ExperimentReport, ReportSpec};
use crate::contour::ContourSpec;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::projections::{sectorial_projection_with, Method, ProjectionResult};
use crate::scalar::{Real, C};
use crate::symbol1d::{op_from_symbol, parametrix_phi0, sobolev_matrix_norm, CutoffFunction, DiscretizedOperator, SymbolFunction};

/// Angles on which the principal-symbol seminorms are sampled.
const SEMINORM_ANGLES: usize = 32;
/// Step of the central differences in the principal-symbol seminorms.
const SEMINORM_STEP: f64 = 1e-3;
/// Largest relative `|y(eps) - y(-eps)|` counted as symmetric.
const SYMMETRY_TOLERANCE: f64 = 0.2;

/// An operator difference split as `Op(sigma_m) + (lower-order part)`.
#[derive(Clone, Debug)]
pub struct SplitDifference<T> {
    /// Principal symbol of order `m`, if any.
    pub principal: Option<SymbolFunction<T>>,
    /// Remainder as a matrix on the same modes as the operator it perturbs.
    pub lower: DiscretizedOperator<T>,
}

impl<T: Real> SplitDifference<T> {
    pub fn new(principal: Option<SymbolFunction<T>>, lower: DiscretizedOperator<T>) -> Result<Self> {
        if let Some(p) = &principal {
            if p.fiber_dim() != lower.fiber_dim {
                return Err(Error::DimensionMismatch { expected: lower.fiber_dim, found: p.fiber_dim() });
            }
            if lower.k_max < 1 {
                return Err(Error::InvalidSymbol { reason: "a principal part needs mode cutoff K >= 1".into() });
            }
        }
        Ok(Self { principal, lower })
    }

    /// The zero difference on the modes of `like`.
    pub fn zero(like: &DiscretizedOperator<T>) -> Self {
        Self { principal: None, lower: like.with_matrix(ComplexMatrix::zeros(like.dim())) }
    }

    /// Full matrix `Op(sigma_m) + lower`.
    pub fn matrix(&self) -> Result<ComplexMatrix<T>> {
        match &self.principal {
            Some(p) => Ok(&op_from_symbol(p, self.lower.k_max)?.matrix + &self.lower.matrix),
            None => Ok(self.lower.matrix.clone()),
        }
    }

    pub fn scaled(&self, eps: f64) -> Self {
        let c = C::new(T::lit(eps), T::zero());
        Self {
            principal: self.principal.as_ref().map(|p| p.scaled(c)),
            lower: self.lower.with_matrix(self.lower.matrix.scale(c)),
        }
    }
}

/// Seminorms of a split difference: `p_j` of the principal symbol and
/// `||lower||_{k+m-1, k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormRecord {
    /// `p_j`, `j = 0..=j_max`: largest Frobenius norm of a derivative
    /// `d_theta^a d_xi^b sigma_m` with `a + b = j` on `|xi| = 1`.
    pub principal: Vec<f64>,
    /// `(k, ||lower||_{k+m-1, k})`.
    pub lower: Vec<(i32, f64)>,
}

impl SeminormRecord {
    /// Largest of `p_j` for `j <= j_max` and of the lower-order norms for
    /// `k` in `ks`.
    pub fn aggregate(&self, j_max: usize, ks: &[i32]) -> f64 {
        let p = self.principal.iter().take(j_max + 1).copied();
        let l = self.lower.iter().filter(|(k, _)| ks.contains(k)).map(|&(_, v)| v);
        p.chain(l).fold(0.0, f64::max)
    }

    /// Default family: `p_j` for `j <= 2` and the `k = 0` lower norm.
    pub fn default_aggregate(&self) -> f64 {
        self.aggregate(2, &[0])
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn principal_seminorm<T: Real>(sigma: &SymbolFunction<T>, j: usize) -> f64 {
    let h = SEMINORM_STEP;
    let n = sigma.fiber_dim();
    let mut buf = vec![C::new(T::zero(), T::zero()); n * n];
    let mut best = 0.0f64;
    for i in 0..SEMINORM_ANGLES {
        let theta = TAU * i as f64 / SEMINORM_ANGLES as f64;
        for xi in [-1.0, 1.0] {
            for a in 0..=j {
                let b = j - a;
                let mut acc = vec![C::new(T::zero(), T::zero()); n * n];
                for u in 0..=a {
                    for v in 0..=b {
                        let w = binomial(a, u) * binomial(b, v) * if (u + v) % 2 == 0 { 1.0 } else { -1.0 };
                        let t = theta + (0.5 * a as f64 - u as f64) * h;
                        let x = xi + (0.5 * b as f64 - v as f64) * h;
                        sigma.principal_into(T::lit(t), T::lit(x), &mut buf);
                        for (o, z) in acc.iter_mut().zip(&buf) {
                            *o += *z * T::lit(w);
                        }
                    }
                }
                let norm = acc.iter().map(|z| z.norm_sqr().as_f64()).sum::<f64>().sqrt() / h.powi(j as i32);
                best = best.max(norm);
            }
        }
    }
    best
}

/// Seminorms of `d` for an operator class of order `m`.
pub fn seminorm_pc<T: Real>(d: &SplitDifference<T>, m: f64, k_list: &[i32], j_max: usize) -> SeminormRecord {
    let principal = match &d.principal {
        Some(sigma) => (0..=j_max).map(|j| principal_seminorm(sigma, j)).collect(),
        None => vec![0.0; j_max + 1],
    };
    let low = &d.lower;
    let lower = k_list
        .iter()
        .map(|&k| {
            let norm = sobolev_matrix_norm(&low.matrix, low.k_max, low.fiber_dim, k as f64 + m - 1.0, k as f64);
            (k, norm.as_f64())
        })
        .collect();
    SeminormRecord { principal, lower }
}

fn default_j_max() -> usize {
    2
}

fn default_k_list() -> Vec<i32> {
    vec![0]
}

fn default_symmetry() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationParams {
    /// Sobolev index of the `(s, s)` norm of the projection difference.
    pub s: f64,
    pub slope_tolerance: f64,
    #[serde(default = "default_j_max")]
    pub seminorm_j_max: usize,
    #[serde(default = "default_k_list")]
    pub seminorm_k: Vec<i32>,
    #[serde(default)]
    pub method: Method,
    #[serde(default = "super::decay::default_min_decades")]
    pub min_decades: f64,
    /// Also sample `-eps` for the two smallest `eps`.
    #[serde(default = "default_symmetry")]
    pub symmetry_check: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct RatioRow {
    epsilon: f64,
    seminorm: f64,
    projection_change: f64,
    ratio: f64,
}

fn project<T: Real>(a: &ComplexMatrix<T>, c: &ContourSpec, method: Method, epsilon: f64) -> Result<ProjectionResult<T>> {
    sectorial_projection_with(a, c, method).map_err(|e| match e {
        Error::SpectrumOnContour { .. } => Error::ClearanceLost { epsilon },
        other => other,
    })
}

/// `y = ||P(A + eps dA) - P(A)||_{s,s}` against `x` = aggregated seminorm of
/// `eps dA`, with a log-log fit of `y` against `x`.
///
/// The expected slope 1 is linear response, a desk-scale refinement of the
/// continuity of the projection; the report is marked fit-only.
pub fn perturbation_experiment<T: Real>(
    a: &DiscretizedOperator<T>,
    da: &SplitDifference<T>,
    epsilons: &[f64],
    c: &ContourSpec,
    params: &PerturbationParams,
) -> Result<ExperimentReport> {
    if da.lower.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: da.lower.dim() });
    }
    let mut eps = epsilons.to_vec();
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    if eps.is_empty() || eps[0] <= 0.0 {
        return Err(Error::InvalidExperiment { reason: "epsilons must be positive".into() });
    }
    let dm = da.matrix()?;
    let m = a.order;
    let base = project(&a.matrix, c, params.method, 0.0)?;
    let unit = seminorm_pc(da, m, &params.seminorm_k, params.seminorm_j_max).aggregate(params.seminorm_j_max, &params.seminorm_k);
    let change = |e: f64| -> Result<f64> {
        let mut shifted = a.matrix.clone();
        shifted.axpy(C::new(T::lit(e), T::zero()), &dm);
        let p = project(&shifted, c, params.method, e)?;
        Ok(sobolev_matrix_norm(&(&p.p - &base.p), a.k_max, a.fiber_dim, params.s, params.s).as_f64())
    };
    let ys = eps.par_iter().map(|&e| change(e)).collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = eps
        .iter()
        .map(|&e| seminorm_pc(&da.scaled(e), m, &params.seminorm_k, params.seminorm_j_max).aggregate(params.seminorm_j_max, &params.seminorm_k))
        .collect();
    let by_epsilon = unit == 0.0;
    let abscissae = if by_epsilon { eps.clone() } else { xs.clone() };
    let rows: Vec<RatioRow> = eps
        .iter()
        .zip(&xs)
        .zip(&ys)
        .map(|((&epsilon, &seminorm), &y)| RatioRow {
            epsilon,
            seminorm,
            projection_change: y,
            ratio: if seminorm > 0.0 { y / seminorm } else { f64::NAN },
        })
        .collect();
    let preset = a.symbol.clone().unwrap_or_else(|| "matrix".into());
    let spec = ReportSpec {
        kind: ExperimentKind::Perturbation,
        preset: &preset,
        parameters: json!({
            "operator": preset,
            "k_max": a.k_max,
            "order": m,
            "contour": c,
            "epsilons": eps,
            "perturbation_principal": da.principal.as_ref().map(|p| p.name().to_string()),
            "perturbation_lower": da.lower.symbol,
            "params": params,
        }),
        expected_slope: 1.0,
        slope_tolerance: params.slope_tolerance,
        min_decades: params.min_decades,
        fit_only: true,
    };
    let zero_scale = 1e-13 * base.p.frobenius_norm().as_f64().max(1.0);
    let mut report = ExperimentReport::assemble(spec, abscissae.into_iter().zip(ys.iter().copied()).collect(), zero_scale)?;
    report.notes.push(
        "slope 1 (linear response) is a desk-scale refinement of the continuity of the projection, not an asserted law"
            .into(),
    );
    if by_epsilon {
        report.notes.push("zero seminorm: abscissa is epsilon".into());
    }
    report.diagnostic("abscissa", if by_epsilon { "epsilon" } else { "aggregated_seminorm" });
    report.diagnostic("ratio_table", &rows);
    report.diagnostic("base_truncation_error_estimate", base.truncation_error_estimate);
    if params.symmetry_check {
        let checks = eps
            .iter()
            .take(2)
            .zip(&ys)
            .map(|(&e, &y)| Ok((e, y, change(-e)?)))
            .collect::<Result<Vec<_>>>()?;
        let defect = checks
            .iter()
            .map(|&(_, y, ym)| if y > zero_scale { (y - ym).abs() / y } else { (y - ym).abs() })
            .fold(0.0, f64::max);
        report.diagnostic("symmetry", json!({
            "samples": checks.iter().map(|&(e, y, ym)| json!({"epsilon": e, "y_plus": y, "y_minus": ym})).collect::<Vec<_>>(),
            "max_relative_defect": defect,
            "symmetric": defect <= SYMMETRY_TOLERANCE,
        }));
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundednessEntry {
    pub s: f64,
    /// `||P||_{s,s}`.
    pub projection_norm: f64,
    /// `||P - (-1/2 pi i) A Phi_0||_{s,s}`.
    pub parametrix_difference: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundednessRecord {
    pub operator: String,
    pub k_max: usize,
    pub cutoff: CutoffFunction,
    pub truncation_error_estimate: f64,
    pub entries: Vec<BoundednessEntry>,
    /// Every projection norm is finite.
    pub bounded: bool,
    /// The parametrix difference never exceeds the projection norm.
    pub parametrix_dominated: bool,
}

/// `||P||_{s,s}` and the distance from `P` to its first parametrix
/// approximation `(-1/2 pi i) A Phi_0` for each `s`.
pub fn boundedness_check<T: Real>(
    a: &SymbolFunction<T>,
    k_max: usize,
    psi: &CutoffFunction,
    c: &ContourSpec,
    s_list: &[f64],
) -> Result<BoundednessRecord> {
    let op = op_from_symbol(a, k_max)?;
    let p = sectorial_projection_with(&op.matrix, c, Method::Auto)?;
    let phi0 = parametrix_phi0(a, psi, c, k_max)?;
    let scale = C::new(T::zero(), T::one() / T::two_pi());
    let approx = op.matrix.matmul(&phi0.matrix).scale(scale);
    let diff = &p.p - &approx;
    let n = op.fiber_dim;
    let entries: Vec<BoundednessEntry> = s_list
        .iter()
        .map(|&s| {
            let projection_norm = sobolev_matrix_norm(&p.p, k_max, n, s, s).as_f64();
            let parametrix_difference = sobolev_matrix_norm(&diff, k_max, n, s, s).as_f64();
            BoundednessEntry { s, projection_norm, parametrix_difference, ratio: parametrix_difference / projection_norm }
        })
        .collect();
    Ok(BoundednessRecord {
        operator: a.name().to_string(),
        k_max,
        cutoff: *psi,
        truncation_error_estimate: p.truncation_error_estimate,
        bounded: entries.iter().all(|e| e.projection_norm.is_finite()),
        parametrix_dominated: entries.iter().all(|e| e.parametrix_difference <= e.projection_norm),
        entries,
    })
}
