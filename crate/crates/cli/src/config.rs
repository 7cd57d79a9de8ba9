//! Run configuration: a TOML file with sections, overridden by command-line
//! flags. Every key is validated before anything is computed.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{Map, Value as Json};
use toml::Value;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Float,
    Int,
    Signed,
    Str,
    Bool,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Float => "a number",
            Kind::Int => "a non-negative integer",
            Kind::Signed => "an integer",
            Kind::Str => "a string",
            Kind::Bool => "a boolean",
        }
    }
}

pub struct KeyDoc {
    pub key: &'static str,
    pub kind: Kind,
    pub doc: &'static str,
}

const fn key(key: &'static str, kind: Kind, doc: &'static str) -> KeyDoc {
    KeyDoc { key, kind, doc }
}

/// Every accepted key, as `section.name` (top-level keys have no section).
pub const KEYS: &[KeyDoc] = &[
    key("seed", Kind::Int, "seed for random presets (default 0)"),
    key("out", Kind::Str, "output directory (default ./reports; SECTORAL_OUT wins)"),
    key("operator.preset", Kind::Str, "operator preset, see list-presets"),
    key("operator.K", Kind::Int, "mode cutoff: modes |k| <= K"),
    key("operator.matrix", Kind::Str, "matrix text file used instead of a preset (project, wodzicki)"),
    key("contour.kind", Kind::Str, "sector | imag | circle (default imag: rays at pi/2 and 3 pi/2)"),
    key("contour.alpha1", Kind::Float, "incoming ray angle of a sector"),
    key("contour.alpha2", Kind::Float, "outgoing ray angle of a sector"),
    key("contour.R", Kind::Float, "arc radius of a sector (default 0.5, wodzicki 0.15)"),
    key("contour.lambda_max", Kind::Float, "ray truncation radius (default 1e6 R)"),
    key("contour.center_re", Kind::Float, "circle center, real part"),
    key("contour.center_im", Kind::Float, "circle center, imaginary part"),
    key("contour.radius", Kind::Float, "circle radius"),
    key("contour.panels_arc", Kind::Int, "Gauss panels on the arc or circle"),
    key("contour.panels_ray", Kind::Int, "Gauss panels per ray"),
    key("contour.gauss_order", Kind::Int, "Gauss-Legendre order per panel"),
    key("contour.method", Kind::Str, "dense | schur | auto resolvent evaluation"),
    key("experiment.s", Kind::Float, "Sobolev index, or the real part of the power for wodzicki"),
    key("experiment.s_imag", Kind::Float, "imaginary part of the power (wodzicki)"),
    key("experiment.p", Kind::Float, "resolvent-decay weight exponent"),
    key("experiment.ray_angle", Kind::Float, "angle of the sampling ray for lambda (default pi/2)"),
    key("experiment.lambda_min", Kind::Float, "smallest sampled |lambda|"),
    key("experiment.lambda_max", Kind::Float, "largest sampled |lambda|"),
    key("experiment.n_samples", Kind::Int, "number of sampled |lambda| (0 = 12 per decade)"),
    key("experiment.slope_tolerance", Kind::Float, "allowed deviation of the fitted slope"),
    key("experiment.min_decades", Kind::Float, "smallest abscissa span accepted by the fit"),
    key("experiment.padding", Kind::Int, "mode padding factor of the gap experiments (default 2)"),
    key("experiment.rho", Kind::Float, "cutoff radius; default is the smallest admissible integer"),
    key("experiment.composition", Kind::Str, "composition family, see list-presets"),
    key("experiment.fit_only", Kind::Bool, "report the fitted slope without judging it"),
    key("experiment.perturbation", Kind::Str, "perturbation preset, see list-presets"),
    key("experiment.epsilon_min", Kind::Float, "smallest perturbation size (default 1e-4)"),
    key("experiment.epsilon_max", Kind::Float, "largest perturbation size (default 1e-1)"),
    key("experiment.n_epsilon", Kind::Int, "number of perturbation sizes (default 13)"),
    key("experiment.seminorm_j_max", Kind::Int, "highest symbol derivative order in the seminorm"),
    key("experiment.symmetry_check", Kind::Bool, "also run -epsilon and compare"),
    key("experiment.bundle", Kind::Str, "bundle preset for obstruction"),
    key("experiment.fiber_dim", Kind::Int, "fiber dimension of the bundle"),
    key("experiment.level", Kind::Int, "icosphere subdivision level (default 4)"),
    key("experiment.expected_chern", Kind::Signed, "fail unless the Chern number has this value"),
    key("experiment.path", Kind::Str, "crossing | loop | linear"),
    key("experiment.path_samples", Kind::Int, "samples along the path (default 64)"),
    key("experiment.path_start", Kind::Str, "matrix file at t = 0 (linear path)"),
    key("experiment.path_end", Kind::Str, "matrix file at t = 1 (linear path)"),
    key("experiment.expected_flow", Kind::Signed, "fail unless the spectral flow has this value"),
    key("experiment.tolerance", Kind::Float, "residual tolerance (wodzicki, default 1e-6)"),
    key("experiment.include_matrix", Kind::Bool, "embed the projection matrix in the report"),
];

fn key_doc(name: &str) -> Option<&'static KeyDoc> {
    KEYS.iter().find(|k| k.key == name)
}

/// Rendered key table for `--help`.
pub fn key_help() -> String {
    let mut out = String::from("Config keys (TOML sections; override with --set section.key=value):\n");
    for k in KEYS {
        out.push_str(&format!("  {:<28} {}\n", k.key, k.doc));
    }
    out
}

/// Validated flat key-value settings.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, Value>,
}

impl Settings {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> CliResult<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::invalid("config", e.message()))?;
        let mut settings = Settings::default();
        for (name, value) in table {
            match value {
                Value::Table(inner) => {
                    for (k, v) in inner {
                        settings.insert(&format!("{name}.{k}"), v)?;
                    }
                }
                v => settings.insert(&name, v)?,
            }
        }
        Ok(settings)
    }

    /// Inserts after checking the key exists and the value has its type.
    pub fn insert(&mut self, name: &str, value: Value) -> CliResult<()> {
        let doc = key_doc(name).ok_or_else(|| CliError::invalid(name, "unknown key"))?;
        let ok = match (doc.kind, &value) {
            (Kind::Float, Value::Float(x)) => x.is_finite(),
            (Kind::Float, Value::Integer(_)) => true,
            (Kind::Int, Value::Integer(i)) => *i >= 0,
            (Kind::Signed, Value::Integer(_)) => true,
            (Kind::Str, Value::String(_)) => true,
            (Kind::Bool, Value::Boolean(_)) => true,
            _ => false,
        };
        if !ok {
            return Err(CliError::invalid(name, format!("expected {}, found `{value}`", doc.kind.name())));
        }
        self.values.insert(name.to_string(), value);
        Ok(())
    }

    /// Parses `section.key=value`; bare words are taken as strings.
    pub fn insert_assignment(&mut self, assignment: &str) -> CliResult<()> {
        let (name, raw) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::invalid(assignment, "expected section.key=value"))?;
        let (name, raw) = (name.trim(), raw.trim());
        let value = format!("v = {raw}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.to_string()));
        self.insert(name, value)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    pub fn f64(&self, name: &str) -> Option<f64> {
        match self.values.get(name)? {
            Value::Float(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn f64_or(&self, name: &str, default: f64) -> f64 {
        self.f64(name).unwrap_or(default)
    }

    pub fn u64(&self, name: &str) -> Option<u64> {
        match self.values.get(name)? {
            Value::Integer(i) => Some(*i as u64),
            _ => None,
        }
    }

    pub fn usize_or(&self, name: &str, default: usize) -> usize {
        self.u64(name).map_or(default, |v| v as usize)
    }

    pub fn int(&self, name: &str) -> Option<i64> {
        match self.values.get(name)? {
            Value::Integer(i) => Some(*i),
            _ => None,
        }
    }

    pub fn str(&self, name: &str) -> Option<&str> {
        self.values.get(name)?.as_str()
    }

    pub fn bool_or(&self, name: &str, default: bool) -> bool {
        self.values.get(name).and_then(Value::as_bool).unwrap_or(default)
    }

    /// Parses a string key with `FromStr`, naming the key on failure.
    pub fn parse<P: std::str::FromStr>(&self, name: &str, default: &str) -> CliResult<P>
    where
        P::Err: std::fmt::Display,
    {
        let raw = self.str(name).unwrap_or(default);
        raw.parse().map_err(|e: P::Err| CliError::invalid(name, e.to_string()))
    }

    /// Explicit settings as JSON, for the report header, leaving out keys
    /// that do not affect the result.
    pub fn to_json_without(&self, skip: &[&str]) -> Json {
        let mut map = Map::new();
        for (k, v) in self.values.iter().filter(|(k, _)| !skip.contains(&k.as_str())) {
            let j = match v {
                Value::Float(x) => Json::from(*x),
                Value::Integer(i) => Json::from(*i),
                Value::Boolean(b) => Json::from(*b),
                other => Json::from(other.as_str().unwrap_or_default()),
            };
            map.insert(k.clone(), j);
        }
        Json::Object(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_types() {
        let s = Settings::from_toml("seed = 3\n[operator]\npreset = \"dtheta\"\nK = 16\n[contour]\nR = 1\n").unwrap();
        assert_eq!(s.u64("seed"), Some(3));
        assert_eq!(s.str("operator.preset"), Some("dtheta"));
        assert_eq!(s.usize_or("operator.K", 0), 16);
        assert_eq!(s.f64("contour.R"), Some(1.0));
    }

    #[test]
    fn unknown_key_is_named() {
        let err = Settings::from_toml("[contour]\nradius_typo = 1.0\n").unwrap_err();
        match err {
            CliError::ConfigInvalid { key, .. } => assert_eq!(key, "contour.radius_typo"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn wrong_type_is_rejected() {
        let err = Settings::from_toml("[operator]\nK = \"sixteen\"\n").unwrap_err();
        assert!(matches!(err, CliError::ConfigInvalid { ref key, .. } if key == "operator.K"));
        assert!(Settings::from_toml("[operator]\nK = -1\n").is_err());
    }

    #[test]
    fn assignments_override() {
        let mut s = Settings::from_toml("[contour]\nR = 1\n").unwrap();
        s.insert_assignment("contour.R=0.25").unwrap();
        s.insert_assignment("operator.preset=pauli").unwrap();
        assert_eq!(s.f64("contour.R"), Some(0.25));
        assert_eq!(s.str("operator.preset"), Some("pauli"));
        assert!(s.insert_assignment("contour.R").is_err());
    }

    #[test]
    fn every_key_is_documented_in_help() {
        let help = key_help();
        assert!(KEYS.iter().all(|k| help.contains(k.key)));
    }
}
