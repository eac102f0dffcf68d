//! End-to-end entropic localization run: evolve the product-Gaussian
//! meta-state, trace out the partner at each snapshot, and record the
//! reduced-state diagnostics.

use serde::{Deserialize, Serialize};

use crate::dynamics::{init_gaussian_meta, ComplexField, FactoredEvolution, Grid, Hamiltonian, PropagatorConfig, SplitStep};
use crate::error::{Error, Result};
use crate::potential::MetaBall;
use crate::reduction::{entropy_of, partial_trace, DensityMatrix};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Path {
    /// `Phi(x - y)` propagated in 1D, closed-form centre factor.
    Factored,
    /// Direct propagation of `Xi(x, y)` on the 2D grid.
    Full,
}

impl std::str::FromStr for Path {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "factored" => Ok(Path::Factored),
            "full" | "2d" => Ok(Path::Full),
            other => Err(Error::Config(format!("unknown evolution path `{other}` (factored | full)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationConfig {
    pub kappa: f64,
    pub lambda0: f64,
    pub extent: f64,
    pub points: usize,
    pub total_time: f64,
    pub propagator: PropagatorConfig,
    pub path: Path,
}

impl LocalizationConfig {
    /// kappa = 25, lambda0 = 10 on a 128-wide box of 512 points, to t = 40.
    pub fn desk() -> Self {
        Self {
            kappa: 25.0,
            lambda0: 10.0,
            extent: 128.0,
            points: 512,
            total_time: 40.0,
            propagator: PropagatorConfig { dt: 0.05, steps_per_snapshot: 100, ..Default::default() },
            path: Path::Factored,
        }
    }

    pub fn total_steps(&self) -> usize {
        (self.total_time / self.propagator.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.propagator.validate()?;
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(Error::Config(format!("kappa must be positive, got {}", self.kappa)));
        }
        if !(self.total_time.is_finite() && self.total_time >= 0.0) {
            return Err(Error::Config(format!("total time must be non-negative, got {}", self.total_time)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub entropy: f64,
    pub purity: f64,
    pub coherence_length: f64,
    pub coherence_decayed: bool,
    pub diagonal_width: f64,
    pub energy_mean: f64,
    pub energy_std: f64,
    pub norm: f64,
    pub swap_residual: f64,
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
    pub trace: f64,
    /// Share of the factored state inside the physical box (1 on the full path).
    pub retained: f64,
    /// Centre-factor width relative to its initial value.
    pub centre_width_ratio: f64,
}

impl Snapshot {
    /// Hermitian to 1e-12, PSD to -1e-10, unit trace to 1e-10.
    pub fn density_valid(&self) -> bool {
        self.hermiticity < 1e-12 && self.min_eigenvalue > -1e-10 && (self.trace - 1.0).abs() < 1e-10
    }
}

fn snapshot<T: Real>(
    time: f64,
    xi: &ComplexField<T>,
    ham: &Hamiltonian<T>,
    retained: f64,
    centre_width_ratio: f64,
) -> Result<(Snapshot, DensityMatrix<T>)> {
    let rho = partial_trace(xi)?;
    let eigenvalues = rho.eigenvalues();
    let coherence = rho.coherence_length();
    let energy = ham.energy_stats(xi)?;
    let snap = Snapshot {
        time,
        entropy: entropy_of(&eigenvalues),
        purity: rho.purity(),
        coherence_length: coherence.length,
        coherence_decayed: coherence.decayed,
        diagonal_width: rho.diagonal_width(),
        energy_mean: energy.mean.as_f64(),
        energy_std: energy.std.as_f64(),
        norm: xi.norm_sq().as_f64(),
        swap_residual: xi.swap_residual().as_f64(),
        hermiticity: rho.hermiticity_residual(),
        min_eigenvalue: eigenvalues.first().copied().unwrap_or(0.0),
        trace: rho.trace(),
        retained,
        centre_width_ratio,
    };
    Ok((snap, rho))
}

/// What an observer sees at each snapshot besides the scalar diagnostics.
pub struct SnapshotData<'a, T: Real> {
    pub rho: &'a DensityMatrix<T>,
    /// `Phi(r)` on the relative grid (factored path only).
    pub relative: Option<&'a ComplexField<T>>,
}

/// Runs `cfg` and returns one snapshot at `t = 0`, one every
/// `steps_per_snapshot` steps and one at the end. `observe` is called at
/// each snapshot.
pub fn run_localization<T: Real>(
    cfg: &LocalizationConfig,
    mut observe: impl FnMut(&Snapshot, &SnapshotData<'_, T>) -> Result<()>,
) -> Result<Vec<Snapshot>> {
    cfg.validate()?;
    let grid = Grid::new(T::lit(cfg.extent), cfg.points)?;
    let meta = Hamiltonian::meta(grid, &MetaBall, T::lit(cfg.kappa))?;
    let total = cfg.total_steps();
    let every = cfg.propagator.steps_per_snapshot;
    let mut out = Vec::new();
    let mut done = 0;

    match cfg.path {
        Path::Factored => {
            let mut fac = FactoredEvolution::gaussian_meta(cfg.lambda0, &grid, &MetaBall, &cfg.propagator, cfg.kappa)?;
            loop {
                let (xi, retained) = fac.reconstruct(&grid)?;
                let ratio = fac.centre().width_ratio(fac.time());
                let (snap, rho) = snapshot(fac.time(), &xi, &meta, retained, ratio)?;
                observe(&snap, &SnapshotData { rho: &rho, relative: Some(fac.relative()) })?;
                out.push(snap);
                if done == total {
                    break;
                }
                let n = every.min(total - done);
                fac.advance(n)?;
                done += n;
            }
        }
        Path::Full => {
            let mut xi = init_gaussian_meta(cfg.lambda0, &grid)?;
            let prop = SplitStep::new(meta.clone(), &cfg.propagator)?;
            let centre = crate::dynamics::CentreGaussian { lambda0: cfg.lambda0, kappa: cfg.kappa };
            loop {
                let time = done as f64 * cfg.propagator.dt;
                let (snap, rho) = snapshot(time, &xi, &meta, 1.0, centre.width_ratio(time))?;
                observe(&snap, &SnapshotData { rho: &rho, relative: None })?;
                out.push(snap);
                if done == total {
                    break;
                }
                let n = every.min(total - done);
                prop.run(&mut xi, n)?;
                done += n;
            }
        }
    }
    Ok(out)
}
