//! `sectoral`: run one projection experiment and write its JSON and CSV
//! reports.
//!
//! Exit status is 0 when the run passes, 2 when it completes but fails its
//! check, and 1 on any error.

mod commands;
mod config;
mod error;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Command;
use config::Settings;
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "sectoral", version, about = "Sectorial spectral projections and their experiments")]
#[command(after_long_help = config::key_help())]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Sectorial (or circle) projection of an operator or matrix.
    Project(RunArgs),
    /// Projection change under growing perturbations.
    Perturb(RunArgs),
    /// Decay of the weighted resolvent along a ray.
    ResolventDecay(RunArgs),
    /// Gap between the cutoff parametrix and the resolvent.
    Parametrix(RunArgs),
    /// Gap between the quantized product and the product of quantizations.
    ComposeGap(RunArgs),
    /// Chern number of the positive spectral bundle of a sphere family.
    Obstruction(RunArgs),
    /// Difference of complex powers across a sector.
    Wodzicki(RunArgs),
    /// Spectral flow along a matrix path.
    SpectralFlow(RunArgs),
    /// Print every named preset.
    ListPresets,
}

#[derive(Args)]
#[command(after_long_help = config::key_help())]
struct RunArgs {
    /// TOML config file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Operator, composition, bundle or path preset, depending on the command.
    #[arg(long)]
    preset: Option<String>,
    /// Mode cutoff (operator.K).
    #[arg(long = "K", id = "k")]
    k: Option<u64>,
    /// Contour kind (contour.kind): imag, sector or circle.
    #[arg(long)]
    contour: Option<String>,
    /// Arc radius (contour.R).
    #[arg(long = "R", id = "r")]
    r: Option<f64>,
    /// Seed for random presets.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; SECTORAL_OUT takes precedence.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Any config key, as section.key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl RunArgs {
    fn settings(&self, cmd: Command) -> CliResult<Settings> {
        let mut s = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        if let Some(p) = &self.preset {
            s.insert(cmd.preset_key(), toml::Value::String(p.clone()))?;
        }
        if let Some(k) = self.k {
            s.insert("operator.K", toml::Value::Integer(int(k, "operator.K")?))?;
        }
        if let Some(c) = &self.contour {
            s.insert("contour.kind", toml::Value::String(c.clone()))?;
        }
        if let Some(r) = self.r {
            s.insert("contour.R", toml::Value::Float(r))?;
        }
        if let Some(seed) = self.seed {
            s.insert("seed", toml::Value::Integer(int(seed, "seed")?))?;
        }
        if let Some(out) = &self.out {
            s.insert("out", toml::Value::String(out.display().to_string()))?;
        }
        for a in &self.set {
            s.insert_assignment(a)?;
        }
        Ok(s)
    }
}

fn int(v: u64, key: &str) -> CliResult<i64> {
    i64::try_from(v).map_err(|_| CliError::invalid(key, "too large"))
}

fn out_dir(s: &Settings) -> PathBuf {
    match std::env::var_os("SECTORAL_OUT") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from(s.str("out").unwrap_or("reports")),
    }
}

fn run(cmd: Command, args: &RunArgs) -> CliResult<bool> {
    let settings = args.settings(cmd)?;
    let outcome = commands::run(cmd, &settings)?;
    let now = chrono::Utc::now();
    let envelope = output::envelope(cmd, &settings, &outcome, &now.to_rfc3339());
    let stamp = now.format("%Y%m%dT%H%M%S%.3fZ").to_string();
    let (json, csv) = output::write(&out_dir(&settings), cmd, &outcome, &envelope, &stamp)?;
    // A closed stdout (e.g. piped into head) is not an error.
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{} {}: {}", if outcome.pass { "PASS" } else { "FAIL" }, cmd.name(), outcome.preset);
    let _ = writeln!(stdout, "  {}\n  {}", json.display(), csv.display());
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let (cmd, args) = match &cli.command {
        Sub::ListPresets => {
            print!("{}", sectoral_core::presets::list_presets());
            return ExitCode::SUCCESS;
        }
        Sub::Project(a) => (Command::Project, a),
        Sub::Perturb(a) => (Command::Perturb, a),
        Sub::ResolventDecay(a) => (Command::ResolventDecay, a),
        Sub::Parametrix(a) => (Command::Parametrix, a),
        Sub::ComposeGap(a) => (Command::ComposeGap, a),
        Sub::Obstruction(a) => (Command::Obstruction, a),
        Sub::Wodzicki(a) => (Command::Wodzicki, a),
        Sub::SpectralFlow(a) => (Command::SpectralFlow, a),
    };
    match run(cmd, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
