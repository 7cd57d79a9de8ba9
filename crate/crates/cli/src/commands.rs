use std::f64::consts::{FRAC_PI_2, TAU};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value as Json};

use sectoral_core::contour::{make_closed_circle, make_sector_contour, ContourSpec, Resolution};
use sectoral_core::experiments::{
    composition_gap_experiment, log_spaced, parametrix_gap_experiment, perturbation_experiment,
    resolvent_decay_experiment, CompositionParams, ExperimentReport, GapParams, PerturbationParams,
    ResolventDecayParams, EXPERIMENT_MIN_DECADES,
};
use sectoral_core::linalg::io::from_text;
use sectoral_core::presets::{CompositionPreset, OperatorPreset, PerturbationPreset};
use sectoral_core::projections::{
    bounded_spectral_projection_with, sectorial_projection_with, wodzicki_residual, Method,
};
use sectoral_core::symbol1d::{auto_rho, CutoffFunction, SymbolFunction};
use sectoral_core::topology::{obstruction_demo, spectral_flow_report, BundlePreset, MatrixPath};
use sectoral_core::CMatrix;

use crate::config::Settings;
use crate::error::{CliError, CliResult, Context};

/// Default arc radius; the library never picks one.
const DEFAULT_R: f64 = 0.5;
/// Default arc radius for wodzicki, below the smallest eigenvalue modulus
/// of its default preset.
const DEFAULT_R_WODZICKI: f64 = 0.15;
/// Largest cutoff radius tried when `experiment.rho` is unset.
const RHO_SEARCH_MAX: usize = 16;
/// Where the `crossing` path meets the imaginary axis; irrational so no
/// uniform sample lands on it.
const CROSSING_T: f64 = 0.447_213_595_499_957_9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Project,
    Perturb,
    ResolventDecay,
    Parametrix,
    ComposeGap,
    Obstruction,
    Wodzicki,
    SpectralFlow,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Project => "project",
            Command::Perturb => "perturb",
            Command::ResolventDecay => "resolvent-decay",
            Command::Parametrix => "parametrix",
            Command::ComposeGap => "compose-gap",
            Command::Obstruction => "obstruction",
            Command::Wodzicki => "wodzicki",
            Command::SpectralFlow => "spectral-flow",
        }
    }

    /// The key a bare `--preset` flag sets.
    pub fn preset_key(self) -> &'static str {
        match self {
            Command::ComposeGap => "experiment.composition",
            Command::Obstruction => "experiment.bundle",
            Command::SpectralFlow => "experiment.path",
            _ => "operator.preset",
        }
    }

    fn default_preset(self) -> &'static str {
        match self {
            Command::Project => "dtheta",
            Command::Perturb => "var_coeff_shifted",
            Command::ResolventDecay => "dtheta_shifted",
            Command::Parametrix => "var_coeff",
            Command::ComposeGap => "resolvent_pair",
            Command::Obstruction => "monopole",
            Command::Wodzicki => "dtheta_shifted",
            Command::SpectralFlow => "crossing",
        }
    }

    fn default_k(self) -> usize {
        match self {
            Command::Project | Command::Wodzicki => 16,
            Command::ResolventDecay => 256,
            Command::Parametrix | Command::ComposeGap => 128,
            _ => 64,
        }
    }
}

/// Tabular companion of a report.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub struct Outcome {
    pub preset: String,
    pub pass: bool,
    pub report: Json,
    pub table: Table,
}

fn to_json<S: Serialize>(value: &S) -> CliResult<Json> {
    serde_json::to_value(value).map_err(|e| CliError::Serialize(e.to_string()))
}

/// One row per scalar top-level field.
fn scalar_table(report: &Json) -> Table {
    let rows = report
        .as_object()
        .map(|m| {
            m.iter()
                .filter(|(_, v)| !(v.is_object() || v.is_array()))
                .map(|(k, v)| vec![k.clone(), v.as_str().map_or_else(|| v.to_string(), str::to_string)])
                .collect()
        })
        .unwrap_or_default();
    Table { header: vec!["quantity".into(), "value".into()], rows }
}

fn experiment_outcome(preset: &str, r: ExperimentReport) -> CliResult<Outcome> {
    let rows = r.samples.iter().map(|s| vec![s.abscissa.to_string(), s.value.to_string()]).collect();
    Ok(Outcome {
        preset: preset.to_string(),
        pass: r.pass,
        report: to_json(&r)?,
        table: Table { header: vec!["abscissa".into(), "value".into()], rows },
    })
}

fn resolution(s: &Settings) -> Resolution {
    let d = Resolution::default();
    Resolution::new(
        s.usize_or("contour.panels_arc", d.panels_arc),
        s.usize_or("contour.panels_ray", d.panels_ray),
        s.usize_or("contour.gauss_order", d.gauss_order),
    )
}

fn contour(s: &Settings) -> CliResult<ContourSpec> {
    contour_with_r(s, DEFAULT_R)
}

fn contour_with_r(s: &Settings, default_r: f64) -> CliResult<ContourSpec> {
    let kind = s.str("contour.kind").unwrap_or("imag");
    let res = resolution(s);
    let spec = match kind {
        "imag" | "sector" => {
            let (a1, a2) = if kind == "imag" {
                for k in ["contour.alpha1", "contour.alpha2"] {
                    if s.contains(k) {
                        return Err(CliError::invalid(k, "the imag contour fixes its rays; use kind = \"sector\""));
                    }
                }
                (FRAC_PI_2, 3.0 * FRAC_PI_2)
            } else {
                let get = |k: &str| s.f64(k).ok_or_else(|| CliError::invalid(k, "required for a sector contour"));
                (get("contour.alpha1")?, get("contour.alpha2")?)
            };
            let r = s.f64_or("contour.R", default_r);
            let lambda_max = s.f64_or("contour.lambda_max", 1e6 * r);
            make_sector_contour(a1, a2, r, lambda_max, res).context(|| format!("contour (alpha1 {a1}, alpha2 {a2}, R {r})"))?
        }
        "circle" => {
            let center = Complex64::new(s.f64_or("contour.center_re", 0.0), s.f64_or("contour.center_im", 0.0));
            let radius = s.f64("contour.radius").ok_or_else(|| CliError::invalid("contour.radius", "required for a circle"))?;
            make_closed_circle(center, radius, res).context(|| format!("circle contour (center {center}, radius {radius})"))?
        }
        other => return Err(CliError::invalid("contour.kind", format!("unknown contour kind `{other}`"))),
    };
    Ok(spec)
}

fn operator_preset(s: &Settings, cmd: Command) -> CliResult<OperatorPreset> {
    s.parse("operator.preset", cmd.default_preset())
}

fn k_max(s: &Settings, cmd: Command) -> CliResult<usize> {
    let k = s.usize_or("operator.K", cmd.default_k());
    if k == 0 {
        return Err(CliError::invalid("operator.K", "must be at least 1"));
    }
    Ok(k)
}

fn seed(s: &Settings) -> u64 {
    s.u64("seed").unwrap_or(0)
}

fn read_matrix(key: &str, path: &str) -> CliResult<CMatrix> {
    let text = std::fs::read_to_string(Path::new(path)).map_err(|e| CliError::invalid(key, format!("cannot read {path}: {e}")))?;
    from_text(&text).context(|| format!("{key} = {path}"))
}

/// The matrix named by `operator.matrix`, or the preset operator.
fn matrix_or_preset(s: &Settings, cmd: Command) -> CliResult<(String, CMatrix)> {
    if let Some(path) = s.str("operator.matrix") {
        if s.contains("operator.preset") {
            return Err(CliError::invalid("operator.matrix", "give either operator.matrix or operator.preset"));
        }
        let stem = Path::new(path).file_stem().and_then(|x| x.to_str()).unwrap_or("matrix").to_string();
        return Ok((stem, read_matrix("operator.matrix", path)?));
    }
    let preset = operator_preset(s, cmd)?;
    let k = k_max(s, cmd)?;
    let op = preset.operator::<f64>(k, seed(s)).context(|| format!("operator {preset} at K = {k}"))?;
    Ok((preset.name().to_string(), op.matrix))
}

fn symbol(preset: OperatorPreset) -> CliResult<SymbolFunction<f64>> {
    preset
        .symbol()
        .ok_or_else(|| CliError::invalid("operator.preset", format!("`{preset}` is a plain matrix, not a symbol")))
}

fn cutoff(s: &Settings, a: Option<&SymbolFunction<f64>>) -> CliResult<CutoffFunction> {
    let rho = match (s.f64("experiment.rho"), a) {
        (Some(rho), _) => rho,
        (None, Some(a)) => {
            let c = contour(s)?;
            auto_rho(a, &c, RHO_SEARCH_MAX).context(|| "cutoff radius search".to_string())? as f64
        }
        (None, None) => 1.0,
    };
    CutoffFunction::new(rho).context(|| format!("experiment.rho = {rho}"))
}

fn method(s: &Settings) -> CliResult<Method> {
    match s.str("contour.method").unwrap_or("auto") {
        "auto" => Ok(Method::Auto),
        "dense" => Ok(Method::Dense),
        "schur" => Ok(Method::Schur),
        other => Err(CliError::invalid("contour.method", format!("unknown method `{other}`"))),
    }
}

fn gap_params(s: &Settings, cmd: Command) -> CliResult<GapParams> {
    Ok(GapParams {
        k_max: k_max(s, cmd)?,
        ray_angle: s.f64_or("experiment.ray_angle", FRAC_PI_2),
        s: s.f64_or("experiment.s", 0.0),
        lambda_min: s.f64_or("experiment.lambda_min", 10.0),
        lambda_max: s.f64_or("experiment.lambda_max", 50.0),
        n_samples: s.usize_or("experiment.n_samples", 0),
        slope_tolerance: s.f64_or("experiment.slope_tolerance", 0.15),
        padding: s.usize_or("experiment.padding", 2),
        min_decades: s.f64_or("experiment.min_decades", EXPERIMENT_MIN_DECADES),
    })
}

pub fn run(cmd: Command, s: &Settings) -> CliResult<Outcome> {
    match cmd {
        Command::Project => project(s),
        Command::Perturb => perturb(s),
        Command::ResolventDecay => resolvent_decay(s),
        Command::Parametrix => parametrix(s),
        Command::ComposeGap => compose_gap(s),
        Command::Obstruction => obstruction(s),
        Command::Wodzicki => wodzicki(s),
        Command::SpectralFlow => spectral_flow(s),
    }
}

fn project(s: &Settings) -> CliResult<Outcome> {
    let cmd = Command::Project;
    let (preset, a) = matrix_or_preset(s, cmd)?;
    let c = contour(s)?;
    let m = method(s)?;
    let p = if s.str("contour.kind") == Some("circle") {
        bounded_spectral_projection_with(&a, &c, m)
    } else {
        sectorial_projection_with(&a, &c, m)
    }
    .context(|| format!("projection of {preset}"))?;
    let idempotent = p.idempotency_defect <= (10.0 * p.error_estimate()).max(1e-6);
    let pass = p.resolved() && idempotent;
    let mut report = to_json(&p.record(s.bool_or("experiment.include_matrix", false)))?;
    report["contour"] = to_json(&c)?;
    report["pass"] = json!(pass);
    Ok(Outcome { preset, pass, table: scalar_table(&report), report })
}

fn resolvent_decay(s: &Settings) -> CliResult<Outcome> {
    let cmd = Command::ResolventDecay;
    let preset = operator_preset(s, cmd)?;
    let k = k_max(s, cmd)?;
    let a = preset.operator::<f64>(k, seed(s)).context(|| format!("operator {preset} at K = {k}"))?;
    let params = ResolventDecayParams {
        ray_angle: s.f64_or("experiment.ray_angle", FRAC_PI_2),
        s: s.f64_or("experiment.s", 0.0),
        p: s.f64_or("experiment.p", 0.0),
        lambda_min: s.f64_or("experiment.lambda_min", 10.0),
        lambda_max: s.f64_or("experiment.lambda_max", 60.0),
        n_samples: s.usize_or("experiment.n_samples", 0),
        slope_tolerance: s.f64_or("experiment.slope_tolerance", 0.1),
        min_decades: s.f64_or("experiment.min_decades", EXPERIMENT_MIN_DECADES),
    };
    let r = resolvent_decay_experiment(&a, &params).context(|| format!("resolvent decay of {preset}"))?;
    experiment_outcome(preset.name(), r)
}

fn parametrix(s: &Settings) -> CliResult<Outcome> {
    let cmd = Command::Parametrix;
    let preset = operator_preset(s, cmd)?;
    let a = symbol(preset)?;
    let psi = cutoff(s, Some(&a))?;
    let r = parametrix_gap_experiment(&a, &psi, &gap_params(s, cmd)?).context(|| format!("parametrix gap of {preset}"))?;
    experiment_outcome(preset.name(), r)
}

fn compose_gap(s: &Settings) -> CliResult<Outcome> {
    let cmd = Command::ComposeGap;
    let family: CompositionPreset = s.parse("experiment.composition", cmd.default_preset())?;
    let psi = cutoff(s, None)?;
    let params = CompositionParams {
        gap: gap_params(s, cmd)?,
        fit_only: s.bool_or("experiment.fit_only", family.fit_only()),
    };
    let r = composition_gap_experiment(family.name(), |l: Complex64| family.pair(&psi, l), &params)
        .context(|| format!("composition gap of {family}"))?;
    experiment_outcome(family.name(), r)
}

fn perturb(s: &Settings) -> CliResult<Outcome> {
    let cmd = Command::Perturb;
    let preset = operator_preset(s, cmd)?;
    let k = k_max(s, cmd)?;
    let a = preset.operator::<f64>(k, seed(s)).context(|| format!("operator {preset} at K = {k}"))?;
    let pert: PerturbationPreset = s.parse("experiment.perturbation", "cos_lower")?;
    let da = pert.split(&a).context(|| format!("perturbation {pert} of {preset}"))?;
    let lo = s.f64_or("experiment.epsilon_min", 1e-4);
    let hi = s.f64_or("experiment.epsilon_max", 1e-1);
    if !(lo > 0.0 && hi > lo) {
        return Err(CliError::invalid("experiment.epsilon_min", format!("need 0 < epsilon_min < epsilon_max, got {lo} and {hi}")));
    }
    let n = s.usize_or("experiment.n_epsilon", 13);
    let params = PerturbationParams {
        s: s.f64_or("experiment.s", 0.0),
        slope_tolerance: s.f64_or("experiment.slope_tolerance", 0.1),
        seminorm_j_max: s.usize_or("experiment.seminorm_j_max", 2),
        seminorm_k: vec![0],
        method: method(s)?,
        min_decades: s.f64_or("experiment.min_decades", EXPERIMENT_MIN_DECADES),
        symmetry_check: s.bool_or("experiment.symmetry_check", true),
    };
    let c = contour(s)?;
    let r = perturbation_experiment(&a, &da, &log_spaced(lo, hi, n), &c, &params)
        .context(|| format!("perturbation of {preset} by {pert}"))?;
    experiment_outcome(preset.name(), r)
}

fn obstruction(s: &Settings) -> CliResult<Outcome> {
    let cmd = Command::Obstruction;
    let bundle: BundlePreset = s.parse("experiment.bundle", cmd.default_preset())?;
    let n = s.usize_or("experiment.fiber_dim", bundle.min_fiber_dim());
    let level = s.usize_or("experiment.level", 4) as u32;
    let r = obstruction_demo::<f64>(bundle, n, level).context(|| format!("obstruction of {bundle} (fiber {n}, level {level})"))?;
    let pass = s.int("experiment.expected_chern").map_or(true, |want| want == r.chern.chern);
    let mut report = to_json(&r)?;
    report["pass"] = json!(pass);
    Ok(Outcome { preset: bundle.name().to_string(), pass, table: scalar_table(&report), report })
}

fn wodzicki(s: &Settings) -> CliResult<Outcome> {
    let cmd = Command::Wodzicki;
    let (preset, a) = matrix_or_preset(s, cmd)?;
    let c = contour_with_r(s, DEFAULT_R_WODZICKI)?;
    if s.str("contour.kind") == Some("circle") {
        return Err(CliError::invalid("contour.kind", "wodzicki needs a sector contour"));
    }
    let power = Complex64::new(s.f64_or("experiment.s", 0.5), s.f64_or("experiment.s_imag", 0.0));
    let tol = s.f64_or("experiment.tolerance", 1e-6);
    let residual =
        wodzicki_residual(&a, power, c.alpha1, c.alpha2, &c).context(|| format!("power difference of {preset} at s = {power}"))?;
    let pass = residual <= tol;
    let report = json!({
        "preset": preset,
        "dim": a.dim(),
        "s": [power.re, power.im],
        "alpha1": c.alpha1,
        "alpha2": c.alpha2,
        "residual": residual,
        "tolerance": tol,
        "pass": pass,
        "contour": to_json(&c)?,
    });
    Ok(Outcome { preset, pass, table: scalar_table(&report), report })
}

fn path(s: &Settings, name: &str, n: usize) -> CliResult<MatrixPath<f64>> {
    let built = match name {
        "crossing" => MatrixPath::from_fn(n, |t| CMatrix::from_real_diag(&[t - CROSSING_T, -1.0])),
        "loop" => MatrixPath::from_fn(n, |t| {
            CMatrix::from_diag(&[Complex64::from_polar(2.0, TAU * t), Complex64::new(-1.0, 0.0)])
        }),
        "linear" => {
            let get = |k: &str| {
                s.str(k).ok_or_else(|| CliError::invalid(k, "required for a linear path")).and_then(|p| read_matrix(k, p))
            };
            let (a0, a1) = (get("experiment.path_start")?, get("experiment.path_end")?);
            if a0.dim() != a1.dim() {
                return Err(CliError::invalid("experiment.path_end", "endpoint dimensions differ"));
            }
            MatrixPath::from_fn(n, |t| &a0.scale_real(1.0 - t) + &a1.scale_real(t))
        }
        other => return Err(CliError::invalid("experiment.path", format!("unknown path `{other}`"))),
    };
    built.context(|| format!("path {name} with {n} samples"))
}

fn spectral_flow(s: &Settings) -> CliResult<Outcome> {
    let cmd = Command::SpectralFlow;
    let name = s.str("experiment.path").unwrap_or(cmd.default_preset()).to_string();
    let n = s.usize_or("experiment.path_samples", 64);
    let p = path(s, &name, n)?;
    let r = spectral_flow_report(&p).context(|| format!("spectral flow along {name}"))?;
    let pass = s.int("experiment.expected_flow").map_or(true, |want| want == r.spectral_flow);
    let rows = r
        .crossings
        .iter()
        .map(|c| vec![c.t_before.to_string(), c.t_after.to_string(), c.change.to_string()])
        .collect();
    let mut report = to_json(&r)?;
    report["path"] = json!(name);
    report["samples"] = json!(n);
    report["pass"] = json!(pass);
    Ok(Outcome {
        preset: name,
        pass,
        report,
        table: Table { header: vec!["t_before".into(), "t_after".into(), "change".into()], rows },
    })
}
