//! Output directory handling: CSV series, deterministic summary JSON and
//! the run manifest.

use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

pub const SUMMARY: &str = "summary.json";
pub const MANIFEST: &str = "manifest.json";

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(io(root))?;
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn subdir(&self, name: &str) -> Result<PathBuf, CliError> {
        let p = self.root.join(name);
        fs::create_dir_all(&p).map_err(io(&p))?;
        Ok(p)
    }

    pub fn csv(&self, name: &str) -> Result<csv::Writer<File>, CliError> {
        let p = self.path(name);
        let f = File::create(&p).map_err(io(&p))?;
        Ok(csv::Writer::from_writer(f))
    }

    pub fn json(&self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        write_json(&self.path(name), value)
    }
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Numerical(format!("cannot serialize {}: {e}", path.display())))?;
    text.push('\n');
    let mut f = File::create(path).map_err(io(path))?;
    f.write_all(text.as_bytes()).map_err(io(path))
}

/// Files under `root`, relative and sorted.
pub fn list_artifacts(root: &Path) -> Vec<String> {
    fn walk(base: &Path, dir: &Path, out: &mut Vec<String>) {
        let Ok(entries) = fs::read_dir(dir) else { return };
        for e in entries.flatten() {
            let p = e.path();
            if p.is_dir() {
                walk(base, &p, out);
            } else if let Ok(rel) = p.strip_prefix(base) {
                out.push(rel.display().to_string());
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out.retain(|p| p != MANIFEST);
    out.sort();
    out
}

pub fn unix_seconds() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub core_version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub config: String,
    pub status: &'static str,
    pub failed: bool,
    pub exit_code: u8,
    pub error: Option<String>,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub elapsed_seconds: f64,
    pub threads: usize,
    pub artifacts: Vec<String>,
    pub summary: Option<Value>,
}
