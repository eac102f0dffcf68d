//! Time evolution of the meta-wavefunction in scaled units.

mod factored;
mod field;
mod grid;
mod ground_state;
mod hamiltonian;
mod propagator;
mod spectral;

pub use factored::{CentreGaussian, FactoredEvolution};
pub use field::{gaussian_1d, ComplexField, Dim};
pub use grid::Grid;
pub use ground_state::{imaginary_time_ground_state, GroundState, Mode, RelaxOptions};
pub use hamiltonian::{EnergyStats, Hamiltonian};
pub use propagator::{default_dt, mask_profile, PropagatorConfig, SplitStep};
pub use spectral::Spectral;

use num_complex::Complex;

use crate::error::Result;
use crate::scalar::Real;

/// Unentangled product start `Psi(x) Psi(y)` with `Psi ~ exp(-x^2 / lambda0^2)`,
/// i.e. `exp(-(x - y)^2 / (2 lambda0^2)) exp(-(x + y)^2 / (2 lambda0^2))`.
pub fn init_gaussian_meta<T: Real>(lambda0: f64, grid: &Grid<T>) -> Result<ComplexField<T>> {
    factored::check_width(lambda0, grid)?;
    let l2 = T::lit(lambda0 * lambda0);
    let mut xi = ComplexField::from_fn_2d(*grid, |x, y| Complex::new((-(x * x + y * y) / l2).exp(), T::zero()));
    xi.normalize()?;
    Ok(xi)
}
