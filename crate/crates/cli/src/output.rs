use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value as Json};

use crate::commands::{Command, Outcome};
use crate::config::Settings;
use crate::error::{CliError, CliResult};

/// Bumped whenever a report field changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

/// Wall-clock field; the only part of a report that varies between runs.
pub const TIMESTAMP_FIELD: &str = "timestamp";

pub fn envelope(cmd: Command, settings: &Settings, outcome: &Outcome, timestamp: &str) -> Json {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": cmd.name(),
        "preset": outcome.preset,
        (TIMESTAMP_FIELD): timestamp,
        "settings": settings.to_json_without(&["out"]),
        "pass": outcome.pass,
        "report": outcome.report,
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Writes `<kind>-<preset>-<timestamp>.json` and `.csv` into `dir`.
pub fn write(dir: &Path, cmd: Command, outcome: &Outcome, envelope: &Json, stamp: &str) -> CliResult<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let stem = format!("{}-{}-{stamp}", cmd.name(), outcome.preset);
    let json_path = dir.join(format!("{stem}.json"));
    let csv_path = dir.join(format!("{stem}.csv"));

    let text = serde_json::to_string_pretty(envelope).map_err(|e| CliError::Serialize(e.to_string()))?;
    fs::write(&json_path, text + "\n").map_err(io_err(&json_path))?;

    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| CliError::Serialize(e.to_string()))?;
    let csv_err = |e: csv::Error| CliError::Serialize(e.to_string());
    w.write_record(&outcome.table.header).map_err(csv_err)?;
    for row in &outcome.table.rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(&csv_path))?;
    Ok((json_path, csv_path))
}
