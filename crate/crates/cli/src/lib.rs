//! Driver for `gravloc` runs: configuration, subcommands, reproducible
//! outputs and the run manifest.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::Path;

use serde_json::Value;

pub use config::{Command, Overrides, Precision, RunConfig};
pub use error::CliError;

use output::{Manifest, OutputDir};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: u8,
    pub error: Option<String>,
    pub summary: Option<Value>,
}

/// Executes `cfg`, writing artifacts and `manifest.json` into `cfg.out`.
/// The manifest is written whether or not the run succeeds.
pub fn run(cfg: &RunConfig) -> RunOutcome {
    let started = output::unix_seconds();
    let out = match OutputDir::create(&cfg.out) {
        Ok(o) => o,
        Err(e) => return RunOutcome { exit_code: e.exit_code(), error: Some(e.to_string()), summary: None },
    };
    let result = commands::execute(cfg, &out);
    let (exit_code, error, summary) = match result {
        Ok(s) => (0, None, Some(s)),
        Err(e) => (e.exit_code(), Some(e.to_string()), None),
    };
    let finished = output::unix_seconds();
    let manifest = Manifest {
        tool: "gravloc",
        tool_version: VERSION,
        core_version: gravloc::VERSION,
        command: cfg.command.name().to_string(),
        config_hash: cfg.hash(),
        config: cfg.canonical.clone(),
        status: if exit_code == 0 { "ok" } else { "failed" },
        failed: exit_code != 0,
        exit_code,
        error: error.clone(),
        started_unix: started,
        finished_unix: finished,
        elapsed_seconds: finished - started,
        threads: rayon::current_num_threads(),
        artifacts: output::list_artifacts(out.root()),
        summary: summary.clone(),
    };
    if let Err(e) = output::write_json(&out.path(output::MANIFEST), &manifest) {
        return RunOutcome { exit_code: e.exit_code(), error: Some(e.to_string()), summary };
    }
    RunOutcome { exit_code, error, summary }
}

/// Manifest for a run whose configuration could not be built.
pub fn write_config_failure(dir: &Path, command: Command, text: &str, err: &CliError) -> Result<(), CliError> {
    let out = OutputDir::create(dir)?;
    let now = output::unix_seconds();
    let manifest = Manifest {
        tool: "gravloc",
        tool_version: VERSION,
        core_version: gravloc::VERSION,
        command: command.name().to_string(),
        config_hash: String::new(),
        config: text.to_string(),
        status: "failed",
        failed: true,
        exit_code: err.exit_code(),
        error: Some(err.to_string()),
        started_unix: now,
        finished_unix: now,
        elapsed_seconds: 0.0,
        threads: rayon::current_num_threads(),
        artifacts: Vec::new(),
        summary: None,
    };
    output::write_json(&out.path(output::MANIFEST), &manifest)
}
