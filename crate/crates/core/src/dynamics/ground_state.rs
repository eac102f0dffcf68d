//! Imaginary-time relaxation of the relative motion onto its lowest state.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::field::ComplexField;
use super::grid::Grid;
use super::hamiltonian::Hamiltonian;
use super::propagator::SplitStep;
use crate::error::{Error, Result};
use crate::potential::{RadialPotential, CONTACT};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// s-wave of the 3D relative motion: `u(r) = r R(r)` extended as an odd
    /// function, so `u(0) = 0`.
    Radial,
    /// Even ground state of the 1D analog on the full line.
    FullLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxOptions {
    /// Imaginary-time step of the coarse stage; a fine stage uses `dt / 5`.
    pub dt: f64,
    /// Steps between convergence checks.
    pub sweep_steps: usize,
    /// Converged when `|Delta e|` per sweep falls below this.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self { dt: 0.05, sweep_steps: 20, tolerance: 1e-10, max_sweeps: 200_000 }
    }
}

#[derive(Debug, Clone)]
pub enum GroundState<T: Real> {
    Bound {
        energy: T,
        /// Normalized to one on the full grid.
        state: ComplexField<T>,
        /// `<|r|>`, the mean separation of the two bodies.
        mean_separation: T,
        sweeps: usize,
    },
    /// No negative-energy state exists on this grid.
    Unbound { energy: T },
}

impl<T: Real> GroundState<T> {
    pub fn energy(&self) -> T {
        match self {
            GroundState::Bound { energy, .. } | GroundState::Unbound { energy } => *energy,
        }
    }

    pub fn is_bound(&self) -> bool {
        matches!(self, GroundState::Bound { .. })
    }

    /// Bound with mean separation inside contact distance.
    pub fn is_self_localized(&self) -> bool {
        match self {
            GroundState::Bound { mean_separation, .. } => mean_separation.as_f64() < CONTACT,
            GroundState::Unbound { .. } => false,
        }
    }
}

fn symmetrize<T: Real>(f: &mut ComplexField<T>, odd: bool) {
    let g = *f.grid();
    let d = f.data().to_vec();
    let half = T::lit(0.5);
    for (i, a) in f.data_mut().iter_mut().enumerate() {
        let m = d[g.mirror(i)];
        *a = if odd { (d[i] - m) * half } else { (d[i] + m) * half };
    }
}

/// Lowest state of `-(1/kappa) d2/dr2 + v(|r|)` on `grid` in the requested
/// parity sector, by imaginary-time split-step relaxation with a Rayleigh
/// quotient energy.
pub fn imaginary_time_ground_state<T: Real>(
    v: &dyn RadialPotential<T>,
    kappa: f64,
    grid: Grid<T>,
    mode: Mode,
    opts: &RelaxOptions,
) -> Result<GroundState<T>> {
    if opts.sweep_steps == 0 || opts.tolerance.is_nan() || opts.tolerance <= 0.0 {
        return Err(Error::Config("sweep steps and tolerance must be positive".into()));
    }
    let ham = Hamiltonian::relative(grid, v, T::lit(kappa))?;
    let width = T::lit((grid.extent().as_f64() / 16.0).min(2.0));
    let odd = mode == Mode::Radial;
    let mut psi = ComplexField::from_fn_1d(grid, |r| {
        let g = (-(r * r) / (T::lit(2.0) * width * width)).exp();
        Complex::new(if odd { r * g } else { g }, T::zero())
    });
    psi.normalize()?;

    let mut sweeps = 0;
    let mut energy = ham.energy(&psi)?;
    for dt in [opts.dt, opts.dt / 5.0] {
        let prop = SplitStep::imaginary(ham.clone(), dt)?;
        let mut converged = false;
        while sweeps < opts.max_sweeps {
            prop.run(&mut psi, opts.sweep_steps)?;
            symmetrize(&mut psi, odd);
            psi.normalize().map_err(|_| Error::Numerical("relaxed state vanished".into()))?;
            sweeps += 1;
            let e = ham.energy(&psi)?;
            let change = (e - energy).abs().as_f64();
            energy = e;
            if change < opts.tolerance {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!("imaginary-time relaxation did not converge in {sweeps} sweeps")));
        }
    }

    if energy >= T::zero() {
        return Ok(GroundState::Unbound { energy });
    }
    let h = grid.spacing();
    let mean_separation = grid
        .coordinates()
        .iter()
        .zip(psi.data())
        .fold(T::zero(), |s, (&r, a)| s + r.abs() * a.norm_sqr())
        * h;
    Ok(GroundState::Bound { energy, state: psi, mean_separation, sweeps })
}
