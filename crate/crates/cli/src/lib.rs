//! `fanowave`: reproduction runs for few-photon transport through a
//! waveguide with a partially transmitting element.
//!
//! Every run writes its CSV files plus a `manifest.json` holding the fully
//! resolved configuration, headline results, and the only timestamp of the
//! run, so data files are byte-identical across repeated runs.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod presets;

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::json;

pub use config::{Experiment, RunConfig};
pub use error::CliError;

/// Base document for `name`, which is either an experiment or a preset.
pub fn base_config(name: &str) -> Result<RunConfig, CliError> {
    if let Some(e) = Experiment::from_name(name) {
        return Ok(RunConfig::default_for(e));
    }
    presets::preset(name).ok_or_else(|| {
        let exps: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
        CliError::config(format!(
            "unknown experiment or preset `{name}`; experiments: {}; presets: {}",
            exps.join(", "),
            presets::NAMES.join(", ")
        ))
    })
}

/// Resolves the full configuration for one invocation.
pub fn resolve(
    name: &str,
    file: Option<&Path>,
    sets: &[String],
    out: Option<&Path>,
) -> Result<RunConfig, CliError> {
    let base = serde_json::to_value(base_config(name)?).expect("config serialises");
    config::resolve(base, file, sets, out)
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub files: Vec<String>,
    pub results: serde_json::Value,
}

/// Runs the configured experiment and writes its files and manifest.
pub fn execute(name: &str, cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let report = experiments::run(cfg)?;
    let dir = &cfg.output_dir;
    let mut files = Vec::new();
    for (file, text) in &report.files {
        output::write_atomic(dir, file, text.as_bytes())?;
        files.push(file.clone());
    }
    let created = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "name": name,
        "created_unix": created,
        "config": cfg,
        "files": files,
        "results": report.results,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    output::write_atomic(dir, "manifest.json", text.as_bytes())?;
    files.push("manifest.json".into());
    Ok(RunSummary {
        output_dir: dir.clone(),
        files,
        results: report.results,
    })
}
