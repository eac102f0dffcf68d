//! Nonunitary Newtonian gravity for the centre of mass of a uniform ball.
//!
//! The physical body and its hidden gravitational partner share one
//! meta-wavefunction `Xi(x, y)` evolving under kinetic terms and the halved
//! mutual potential of two interpenetrating balls. Tracing out the partner
//! yields the physical density matrix, whose entropy grows and whose
//! coherences shrink as the relative motion dephases.
//!
//! Modules:
//! - [`units`]: CGS scenario and the single coupling `kappa = G M^3 R / hbar^2`.
//! - [`potential`]: the meta-ball potential and an independent quadrature oracle.
//! - [`estimates`]: closed-form localization length, time, branch count, entropy.
//! - [`dynamics`]: split-step propagation of the 2D field and of the factored form.
//! - [`spectrum`]: s-wave levels by shooting and the self-localization threshold.
//! - [`reduction`]: partial trace, von Neumann entropy, coherence length.
//! - [`localization`]: the evolve-and-reduce pipeline behind a localization run.
//!
//! Grid numerics are generic over [`Real`] (`f32` or `f64`).

pub mod dynamics;
pub mod error;
pub mod estimates;
pub mod kv;
pub mod localization;
pub mod potential;
pub mod quadrature;
pub mod reduction;
pub mod scalar;
pub mod spectrum;
pub mod units;

pub use error::{Error, Result};
pub use scalar::Real;

use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;

pub type Grid64 = dynamics::Grid<f64>;
pub type Grid32 = dynamics::Grid<f32>;
pub type Field64 = dynamics::ComplexField<f64>;
pub type Field32 = dynamics::ComplexField<f32>;
pub type Hamiltonian64 = dynamics::Hamiltonian<f64>;
pub type Hamiltonian32 = dynamics::Hamiltonian<f32>;
pub type SplitStep64 = dynamics::SplitStep<f64>;
pub type SplitStep32 = dynamics::SplitStep<f32>;
pub type DensityMatrix64 = reduction::DensityMatrix<f64>;
pub type DensityMatrix32 = reduction::DensityMatrix<f32>;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
