//! Flat key=value run configuration with command-line overrides.

use std::path::PathBuf;
use std::str::FromStr;

use gravloc::dynamics::PropagatorConfig;
use gravloc::kv::KeyValues;
use gravloc::localization::{LocalizationConfig, Path};
use gravloc::units::PhysicalScenario;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Estimate,
    Potential,
    Spectrum,
    Threshold,
    Evolve,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Estimate => "estimate",
            Command::Potential => "potential",
            Command::Spectrum => "spectrum",
            Command::Threshold => "threshold",
            Command::Evolve => "evolve",
            Command::Sweep => "sweep",
        }
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "estimate" => Command::Estimate,
            "potential" => Command::Potential,
            "spectrum" => Command::Spectrum,
            "threshold" => Command::Threshold,
            "evolve" => Command::Evolve,
            "sweep" => Command::Sweep,
            other => return Err(CliError::Config(format!("unknown mode `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F32,
    F64,
}

impl FromStr for Precision {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "f32" => Ok(Precision::F32),
            "f64" => Ok(Precision::F64),
            other => Err(CliError::Config(format!("precision must be f32 or f64, got `{other}`"))),
        }
    }
}

const KEYS: &[&str] = &[
    "mode",
    "mass_g",
    "radius_cm",
    "width_cm",
    "G",
    "hbar",
    "k_B",
    "kappa",
    "lambda0",
    "extent",
    "points",
    "dt",
    "time",
    "snapshot_every",
    "mask_width",
    "mask_strength",
    "path",
    "precision",
    "out",
    "seed",
    "samples",
    "u_min",
    "u_max",
    "u_points",
    "oracle",
    "e_min",
    "e_max",
    "density_g_cm3",
    "sweep_mode",
    "sweep_kappas",
    "dump_snapshots",
];

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub kappa: Option<f64>,
    pub grid: Option<usize>,
    pub dt: Option<f64>,
    pub time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub scenario: Option<PhysicalScenario>,
    pub kappa: Option<f64>,
    pub lambda0: f64,
    pub extent: f64,
    pub points: usize,
    pub dt: f64,
    pub time: f64,
    pub snapshot_every: usize,
    pub mask_width: f64,
    pub mask_strength: f64,
    pub path: Path,
    pub precision: Precision,
    pub out: PathBuf,
    pub seed: u64,
    pub samples: usize,
    pub u_range: (f64, f64),
    pub u_points: usize,
    pub oracle: bool,
    pub e_min: f64,
    pub e_max: Option<f64>,
    pub density: f64,
    pub sweep_mode: Command,
    pub sweep_kappas: Vec<f64>,
    pub dump_snapshots: bool,
    /// The merged key=value text the run was built from.
    pub canonical: String,
}

fn get<T: FromStr>(kv: &KeyValues, key: &str, default: T) -> Result<T, CliError> {
    Ok(kv.get(key)?.unwrap_or(default))
}

impl RunConfig {
    /// Merges `text` (may be empty) with `overrides` for `command`.
    pub fn build(command: Command, text: &str, overrides: &Overrides) -> Result<Self, CliError> {
        let mut kv = KeyValues::parse(text)?;
        if let Some(unknown) = kv.keys().find(|k| !KEYS.contains(k)) {
            return Err(CliError::Config(format!("unknown configuration key `{unknown}`")));
        }
        if let Some(mode) = kv.get_str("mode") {
            let mode: Command = mode.parse()?;
            if mode != command {
                return Err(CliError::Config(format!(
                    "configuration is for `{}` but `{}` was requested",
                    mode.name(),
                    command.name()
                )));
            }
        }
        kv.set("mode", command.name());
        if let Some(out) = &overrides.out {
            kv.set("out", out.display().to_string());
        }
        if let Some(seed) = overrides.seed {
            kv.set("seed", seed.to_string());
        }
        if let Some(kappa) = overrides.kappa {
            kv.set("kappa", kappa.to_string());
        }
        if let Some(points) = overrides.grid {
            kv.set("points", points.to_string());
        }
        if let Some(dt) = overrides.dt {
            kv.set("dt", dt.to_string());
        }
        if let Some(time) = overrides.time {
            kv.set("time", time.to_string());
        }

        let has_scenario = ["mass_g", "radius_cm", "width_cm"].iter().any(|k| kv.contains(k));
        let scenario = if has_scenario { Some(PhysicalScenario::from_key_values(&kv)?) } else { None };
        let sweep_kappas = match kv.get_str("sweep_kappas") {
            None => Vec::new(),
            Some(list) => list
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Config(format!("invalid sweep_kappas list `{list}`")))?,
        };
        let desk = LocalizationConfig::desk();
        let cfg = Self {
            command,
            scenario,
            kappa: kv.get("kappa")?,
            lambda0: get(&kv, "lambda0", desk.lambda0)?,
            extent: get(&kv, "extent", desk.extent)?,
            points: get(&kv, "points", desk.points)?,
            dt: get(&kv, "dt", desk.propagator.dt)?,
            time: get(&kv, "time", desk.total_time)?,
            snapshot_every: get(&kv, "snapshot_every", desk.propagator.steps_per_snapshot)?,
            mask_width: get(&kv, "mask_width", 0.0)?,
            mask_strength: get(&kv, "mask_strength", 0.0)?,
            path: kv.get_str("path").unwrap_or("factored").parse()?,
            precision: kv.get_str("precision").unwrap_or("f64").parse()?,
            out: PathBuf::from(kv.get_str("out").unwrap_or("out")),
            seed: get(&kv, "seed", 0)?,
            samples: get(&kv, "samples", 200_000)?,
            u_range: (get(&kv, "u_min", 0.0)?, get(&kv, "u_max", 6.0)?),
            u_points: get(&kv, "u_points", 121)?,
            oracle: get(&kv, "oracle", true)?,
            e_min: get(&kv, "e_min", -0.6)?,
            e_max: kv.get("e_max")?,
            density: get(&kv, "density_g_cm3", 1.0)?,
            sweep_mode: kv.get_str("sweep_mode").unwrap_or("spectrum").parse()?,
            sweep_kappas,
            dump_snapshots: get(&kv, "dump_snapshots", true)?,
            canonical: kv.to_canonical_string(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let need_kappa = matches!(self.command, Command::Spectrum | Command::Evolve);
        if need_kappa && self.kappa.is_none() && self.scenario.is_none() {
            return Err(CliError::Config(format!(
                "`{}` needs `kappa` or a physical scenario (mass_g, radius_cm, width_cm)",
                self.command.name()
            )));
        }
        if let Some(k) = self.kappa {
            if !(k.is_finite() && k > 0.0) {
                return Err(CliError::Config(format!("kappa must be positive, got {k}")));
            }
        }
        if self.u_points < 2 || !(self.u_range.0 >= 0.0 && self.u_range.1 > self.u_range.0) {
            return Err(CliError::Config("potential range needs 0 <= u_min < u_max and u_points >= 2".into()));
        }
        if self.command == Command::Sweep {
            if self.sweep_kappas.is_empty() {
                return Err(CliError::Config("`sweep` needs a non-empty `sweep_kappas` list".into()));
            }
            if !matches!(self.sweep_mode, Command::Spectrum | Command::Evolve) {
                return Err(CliError::Config("`sweep_mode` must be spectrum or evolve".into()));
            }
            if self.sweep_kappas.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
                return Err(CliError::Config("every sweep kappa must be positive".into()));
            }
        }
        self.localization(1.0)?.validate()?;
        if matches!(self.command, Command::Evolve) || self.sweep_mode == Command::Evolve {
            gravloc::dynamics::Grid::new(self.extent, self.points)?;
            if !(self.lambda0 > 0.0 && self.lambda0 < self.extent / 8.0) {
                return Err(CliError::Config(format!(
                    "lambda0 = {} must lie in (0, extent / 8 = {})",
                    self.lambda0,
                    self.extent / 8.0
                )));
            }
        }
        Ok(())
    }

    /// Coupling given directly or derived from the physical scenario.
    pub fn resolved_kappa(&self) -> Result<f64, CliError> {
        match (self.kappa, &self.scenario) {
            (Some(k), _) => Ok(k),
            (None, Some(s)) => Ok(s.scale()?.kappa),
            (None, None) => Err(CliError::Config("no kappa and no physical scenario".into())),
        }
    }

    pub fn localization(&self, kappa: f64) -> Result<LocalizationConfig, CliError> {
        Ok(LocalizationConfig {
            kappa,
            lambda0: self.lambda0,
            extent: self.extent,
            points: self.points,
            total_time: self.time,
            propagator: PropagatorConfig {
                dt: self.dt,
                steps_per_snapshot: self.snapshot_every,
                mask_width: self.mask_width,
                mask_strength: self.mask_strength,
            },
            path: self.path,
        })
    }

    /// SHA-256 of the canonical configuration text, leaving out `out` so
    /// that the same run written to two places hashes the same.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for line in self.canonical.lines().filter(|l| !l.starts_with("out=")) {
            h.update(line.as_bytes());
            h.update(b"\n");
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The same configuration for one member of a sweep.
    pub fn sweep_member(&self, kappa: f64, index: usize) -> Self {
        let mut kv = KeyValues::parse(&self.canonical).expect("canonical text parses");
        let out = self.out.join(format!("run_{index:03}"));
        kv.set("mode", self.sweep_mode.name());
        kv.set("kappa", kappa.to_string());
        kv.set("out", out.display().to_string());
        Self {
            command: self.sweep_mode,
            kappa: Some(kappa),
            out,
            canonical: kv.to_canonical_string(),
            ..self.clone()
        }
    }
}
