//! One function per subcommand. Each writes its artifacts into the output
//! directory and returns the summary document.

use gravloc::estimates::{self, MonteCarloEstimate};
use gravloc::localization::{run_localization, Snapshot, SnapshotData};
use gravloc::potential::{dv_scaled, oracle::v_oracle, v_scaled, CONTACT};
use gravloc::reduction::Branch;
use gravloc::spectrum::{
    self, hydrogenic_energy, radial_shoot, radial_wavefunction, threshold_kappa, ShootingOptions,
};
use gravloc::units::{PhysicalScenario, ScaledScenario};
use gravloc::Real;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, Precision, RunConfig};
use crate::error::CliError;
use crate::output::{self, OutputDir};

fn to_value(v: &impl Serialize) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Numerical(format!("cannot serialize summary: {e}")))
}

pub fn execute(cfg: &RunConfig, out: &OutputDir) -> Result<Value, CliError> {
    let body = match cfg.command {
        Command::Estimate => estimate(cfg, out)?,
        Command::Potential => potential(cfg, out)?,
        Command::Spectrum => spectrum(cfg, out)?,
        Command::Threshold => threshold(cfg, out)?,
        Command::Evolve => match cfg.precision {
            Precision::F64 => evolve::<f64>(cfg, out)?,
            Precision::F32 => evolve::<f32>(cfg, out)?,
        },
        Command::Sweep => sweep(cfg, out)?,
    };
    let summary = json!({
        "command": cfg.command.name(),
        "config_hash": cfg.hash(),
        "results": body,
    });
    out.json(output::SUMMARY, &summary)?;
    Ok(summary)
}

#[derive(Serialize)]
struct MonteCarloCheck {
    seed: u64,
    estimate: MonteCarloEstimate,
    quadrature: f64,
    z_score: f64,
}

fn estimate(cfg: &RunConfig, _out: &OutputDir) -> Result<Value, CliError> {
    let s = cfg.scenario.unwrap_or_else(PhysicalScenario::reference);
    let report = estimates::report(&s)?;
    let scaled: ScaledScenario = s.scale()?;
    let monte_carlo = if cfg.samples >= 2 {
        let mc = estimates::monte_carlo_potential(&s, cfg.samples, cfg.seed)?;
        let z = (mc.mean - report.potential_expect) / mc.std_error;
        Some(MonteCarloCheck { seed: cfg.seed, estimate: mc, quadrature: report.potential_expect, z_score: z })
    } else {
        None
    };
    to_value(&json!({
        "scenario": s,
        "scaled": scaled,
        "report": report,
        "monte_carlo": monte_carlo,
    }))
}

#[derive(Serialize)]
struct PotentialRow {
    u: f64,
    v: f64,
    dv: f64,
    oracle: Option<f64>,
}

fn potential(cfg: &RunConfig, out: &OutputDir) -> Result<Value, CliError> {
    let (a, b) = cfg.u_range;
    let rows: Vec<PotentialRow> = (0..cfg.u_points)
        .into_par_iter()
        .map(|i| {
            let u = a + (b - a) * i as f64 / (cfg.u_points - 1) as f64;
            Ok(PotentialRow {
                u,
                v: v_scaled(u)?,
                dv: dv_scaled(u)?,
                oracle: if cfg.oracle { Some(v_oracle(u)?) } else { None },
            })
        })
        .collect::<Result<_, gravloc::Error>>()?;
    let mut w = out.csv("potential.csv")?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::Io { path: "potential.csv".into(), source: e })?;
    let max_dev = rows.iter().filter_map(|r| r.oracle.map(|o| (o - r.v).abs())).fold(None, |m: Option<f64>, d| {
        Some(m.map_or(d, |m| m.max(d)))
    });
    Ok(json!({
        "points": rows.len(),
        "u_range": [a, b],
        "v_at_zero": v_scaled(0.0f64)?,
        "v_at_contact": v_scaled(CONTACT)?,
        "max_oracle_deviation": max_dev,
    }))
}

#[derive(Serialize)]
struct LevelRow {
    nodes: usize,
    principal: usize,
    energy: f64,
    hydrogenic: f64,
    relative_deviation: f64,
    mean_separation: f64,
    self_localized: bool,
}

/// Upper end of the default energy window: about the 20th hydrogenic level,
/// kept inside `[-0.05, -2.5e-4]` so the wall stays within reach.
fn default_e_max(kappa: f64) -> f64 {
    -(kappa / (16.0 * 20.5 * 20.5)).clamp(2.5e-4, 0.05)
}

fn spectrum(cfg: &RunConfig, out: &OutputDir) -> Result<Value, CliError> {
    let kappa = cfg.resolved_kappa()?;
    let opts = ShootingOptions::default();
    let e_max = cfg.e_max.unwrap_or_else(|| default_e_max(kappa));
    let levels = radial_shoot(kappa, (cfg.e_min, e_max), &opts)?;
    let rows: Vec<LevelRow> = levels
        .levels
        .par_iter()
        .map(|l| {
            let state = radial_wavefunction(kappa, l.energy, &opts)?;
            let hyd = hydrogenic_energy(kappa, l.principal);
            Ok(LevelRow {
                nodes: l.nodes,
                principal: l.principal,
                energy: l.energy,
                hydrogenic: hyd,
                relative_deviation: l.energy / hyd - 1.0,
                mean_separation: state.mean_separation,
                self_localized: state.mean_separation < CONTACT,
            })
        })
        .collect::<Result<_, gravloc::Error>>()?;
    let mut w = out.csv("spectrum.csv")?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::Io { path: "spectrum.csv".into(), source: e })?;

    if let Some(ground) = levels.levels.first() {
        let state = radial_wavefunction(kappa, ground.energy, &opts)?;
        let mut w = out.csv("ground_state.csv")?;
        w.write_record(["u", "value"])?;
        let stride = (state.values.len() / 4000).max(1);
        for (i, y) in state.values.iter().enumerate().step_by(stride) {
            w.write_record([state.radius(i).to_string(), y.to_string()])?;
        }
        w.flush().map_err(|e| CliError::Io { path: "ground_state.csv".into(), source: e })?;
    }

    Ok(json!({
        "kappa": kappa,
        "e_range": [cfg.e_min, e_max],
        "u_max": levels.u_max,
        "step": levels.step,
        "hydrogenic_offset": levels.hydrogenic_offset,
        "level_count": rows.len(),
        "self_localized_count": rows.iter().take_while(|r| r.self_localized).count(),
        "ground_energy": rows.first().map(|r| r.energy),
        "levels": rows,
    }))
}

fn threshold(cfg: &RunConfig, _out: &OutputDir) -> Result<Value, CliError> {
    let t = threshold_kappa(&ShootingOptions::default())?;
    let constants = cfg.scenario.map(|s| s.constants).unwrap_or_default();
    let mass = estimates::threshold_mass(cfg.density, t.kappa_star, &constants)?;
    let protons = estimates::threshold_mass_protons(cfg.density, t.kappa_star, &constants)?;
    Ok(json!({
        "criterion": "ground-state mean separation inside contact distance 2R",
        "kappa_star": t.kappa_star,
        "ground_energy": t.energy,
        "mean_separation": t.mean_separation,
        "density_g_cm3": cfg.density,
        "threshold_mass_g": mass,
        "threshold_mass_protons": protons,
        "self_localized_above": spectrum::self_localized_count(1.01 * t.kappa_star, &ShootingOptions::default())?,
        "self_localized_below": spectrum::self_localized_count(0.99 * t.kappa_star, &ShootingOptions::default())?,
    }))
}

const MODEL_NOTE: &str = "1D analog: scalar coordinates x, y coupled by the radial profile v(|x - y|); \
                          not the 3D system, whose reduced density matrix is six-dimensional";

fn evolve<T: Real>(cfg: &RunConfig, out: &OutputDir) -> Result<Value, CliError> {
    let kappa = cfg.resolved_kappa()?;
    let loc = cfg.localization(kappa)?;
    let total = loc.total_steps();
    let expected = total.div_ceil(loc.propagator.steps_per_snapshot) + 1;
    let snap_dir = if cfg.dump_snapshots { Some(out.subdir("snapshots")?) } else { None };

    let mut series = out.csv("entropy.csv")?;
    let mut index = 0usize;
    let mut final_branches: Vec<Branch> = Vec::new();
    let result = run_localization::<T>(&loc, |snap: &Snapshot, data: &SnapshotData<'_, T>| {
        let to_gravloc = |e: CliError| gravloc::Error::Data(e.to_string());
        series.serialize(snap).map_err(|e| gravloc::Error::Data(e.to_string()))?;
        series.flush().map_err(|e| gravloc::Error::Data(e.to_string()))?;
        if let Some(dir) = &snap_dir {
            dump_snapshot(dir, index, data).map_err(to_gravloc)?;
        }
        index += 1;
        if index == expected {
            final_branches = data.rho.branches(4);
        }
        Ok(())
    });
    let snaps = result?;
    let first = snaps.first().ok_or_else(|| CliError::Numerical("no snapshots".into()))?;
    let last = snaps.last().expect("non-empty");
    Ok(json!({
        "model": MODEL_NOTE,
        "kappa": kappa,
        "lambda0": loc.lambda0,
        "extent": loc.extent,
        "points": loc.points,
        "dt": loc.propagator.dt,
        "total_time": last.time,
        "path": loc.path,
        "precision": cfg.precision,
        "snapshots": snaps.len(),
        "entropy_initial": first.entropy,
        "entropy_final": last.entropy,
        "entropy_max": snaps.iter().map(|s| s.entropy).fold(f64::MIN, f64::max),
        "purity_final": last.purity,
        "coherence_length_initial": first.coherence_length,
        "coherence_length_final": last.coherence_length,
        "coherence_shrink": first.coherence_length / last.coherence_length,
        "diagonal_width_initial": first.diagonal_width,
        "diagonal_width_final": last.diagonal_width,
        "diagonal_shrink": first.diagonal_width / last.diagonal_width,
        "energy_mean": last.energy_mean,
        "energy_std": last.energy_std,
        "bound_dominance": last.energy_mean.abs() / last.energy_std,
        "energy_drift": (last.energy_mean / first.energy_mean - 1.0).abs(),
        "centre_width_ratio_final": last.centre_width_ratio,
        "retained_final": last.retained,
        "density_valid_every_snapshot": snaps.iter().all(Snapshot::density_valid),
        "final_branches": final_branches,
    }))
}

fn dump_snapshot<T: Real>(dir: &std::path::Path, index: usize, data: &SnapshotData<'_, T>) -> Result<(), CliError> {
    let rho = data.rho;
    let grid = rho.grid();
    let io = |p: &std::path::Path| {
        let p = p.display().to_string();
        move |e: std::io::Error| CliError::Io { path: p, source: e }
    };

    let p = dir.join(format!("snap_{index:04}_density.csv"));
    let mut w = csv::Writer::from_path(&p)?;
    w.write_record(["x", "rho_xx"])?;
    for (x, d) in grid.coordinates().iter().zip(rho.diagonal()) {
        w.write_record([x.as_f64().to_string(), d.as_f64().to_string()])?;
    }
    w.flush().map_err(io(&p))?;

    let p = dir.join(format!("snap_{index:04}_coherence.csv"));
    let mut w = csv::Writer::from_path(&p)?;
    w.write_record(["s", "c"])?;
    for (s, c) in rho.coherence_profile() {
        w.write_record([s.to_string(), c.to_string()])?;
    }
    w.flush().map_err(io(&p))?;

    let p = dir.join(format!("snap_{index:04}_eigenvalues.csv"));
    let mut w = csv::Writer::from_path(&p)?;
    w.write_record(["rank", "eigenvalue"])?;
    for (k, e) in rho.eigenvalues().iter().rev().take(64).enumerate() {
        w.write_record([k.to_string(), e.to_string()])?;
    }
    w.flush().map_err(io(&p))?;

    if let Some(phi) = data.relative {
        let p = dir.join(format!("snap_{index:04}_relative.csv"));
        let mut w = csv::Writer::from_path(&p)?;
        w.write_record(["r", "abs", "phase"])?;
        for (r, a) in phi.grid().coordinates().iter().zip(phi.data()) {
            w.write_record([r.as_f64().to_string(), a.norm().as_f64().to_string(), a.arg().as_f64().to_string()])?;
        }
        w.flush().map_err(io(&p))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepEntry {
    kappa: f64,
    directory: String,
    exit_code: u8,
    error: Option<String>,
    summary: Option<Value>,
}

fn sweep(cfg: &RunConfig, out: &OutputDir) -> Result<Value, CliError> {
    let entries: Vec<SweepEntry> = cfg
        .sweep_kappas
        .par_iter()
        .enumerate()
        .map(|(i, &kappa)| {
            let member = cfg.sweep_member(kappa, i);
            let outcome = crate::run(&member);
            SweepEntry {
                kappa,
                directory: member.out.strip_prefix(out.root()).unwrap_or(&member.out).display().to_string(),
                exit_code: outcome.exit_code,
                error: outcome.error,
                summary: outcome.summary.map(|s| s["results"].clone()),
            }
        })
        .collect();
    let failed = entries.iter().filter(|e| e.exit_code != 0).count();
    let value = json!({ "sweep_mode": cfg.sweep_mode.name(), "runs": entries });
    if failed > 0 {
        out.json(output::SUMMARY, &json!({ "command": "sweep", "config_hash": cfg.hash(), "results": value }))?;
        return Err(CliError::Numerical(format!("{failed} of {} sweep runs failed", cfg.sweep_kappas.len())));
    }
    Ok(value)
}
