//! Strang-split spectral propagation:
//! `exp(-i V dt/2) F^-1 exp(-i c |k|^2 dt) F exp(-i V dt/2)`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{ComplexField, Dim};
use super::hamiltonian::Hamiltonian;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagatorConfig {
    pub dt: f64,
    pub steps_per_snapshot: usize,
    /// Width of the absorbing band at each edge, as a fraction of the extent.
    pub mask_width: f64,
    /// Amplitude removed per step at the very edge, in `[0, 1]`.
    pub mask_strength: f64,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self { dt: 0.01, steps_per_snapshot: 100, mask_width: 0.0, mask_strength: 0.0 }
    }
}

impl PropagatorConfig {
    pub fn with_dt(dt: f64) -> Self {
        Self { dt, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(0.0..0.25).contains(&self.mask_width) {
            return Err(Error::Config(format!("mask width must lie in [0, 0.25), got {}", self.mask_width)));
        }
        if !(0.0..=1.0).contains(&self.mask_strength) {
            return Err(Error::Config(format!("mask strength must lie in [0, 1], got {}", self.mask_strength)));
        }
        if self.steps_per_snapshot == 0 {
            return Err(Error::Config("steps per snapshot must be at least 1".into()));
        }
        Ok(())
    }

    pub fn mask_enabled(&self) -> bool {
        self.mask_width > 0.0 && self.mask_strength > 0.0
    }
}

/// Largest `dt` keeping the kinetic phase at the grid corner within `pi/4`.
pub fn default_dt<T: Real>(ham: &Hamiltonian<T>) -> f64 {
    std::f64::consts::FRAC_PI_4 / ham.max_kinetic().as_f64()
}

/// Cosine-ramp edge taper: 1 in the interior, `1 - strength` at the edge.
pub fn mask_profile<T: Real>(grid: &super::grid::Grid<T>, width: f64, strength: f64) -> Vec<T> {
    let half = 0.5 * grid.extent().as_f64();
    let band = width * grid.extent().as_f64();
    grid.coordinates()
        .into_iter()
        .map(|x| {
            let depth = x.as_f64().abs() - (half - band);
            if band <= 0.0 || depth <= 0.0 {
                T::one()
            } else {
                let s = (std::f64::consts::FRAC_PI_2 * (depth / band).min(1.0)).sin();
                T::lit(1.0 - strength * s * s)
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SplitStep<T: Real> {
    ham: Hamiltonian<T>,
    dt: T,
    imaginary: bool,
    half_potential: Vec<Complex<T>>,
    kinetic: Vec<Complex<T>>,
    mask: Option<Vec<T>>,
}

impl<T: Real> SplitStep<T> {
    /// Real-time propagator. Fails if the kinetic phase per step exceeds
    /// `pi` at the grid corner.
    pub fn new(ham: Hamiltonian<T>, cfg: &PropagatorConfig) -> Result<Self> {
        cfg.validate()?;
        let phase = ham.max_kinetic().as_f64() * cfg.dt;
        if phase > std::f64::consts::PI {
            return Err(Error::Config(format!(
                "dt = {} gives kinetic phase {phase:.3} > pi at the grid corner; use dt <= {:.4e}",
                cfg.dt,
                std::f64::consts::PI / ham.max_kinetic().as_f64()
            )));
        }
        let mask = cfg.mask_enabled().then(|| {
            let m = mask_profile(ham.grid(), cfg.mask_width, cfg.mask_strength);
            match ham.dim() {
                Dim::One => m,
                Dim::Two => m.iter().flat_map(|&a| m.iter().map(move |&b| a * b)).collect(),
            }
        });
        Ok(Self::build(ham, T::lit(cfg.dt), false, mask))
    }

    /// Imaginary-time propagator `exp(-H tau)` (not norm preserving).
    pub fn imaginary(ham: Hamiltonian<T>, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        Ok(Self::build(ham, T::lit(dt), true, None))
    }

    fn build(ham: Hamiltonian<T>, dt: T, imaginary: bool, mask: Option<Vec<T>>) -> Self {
        let half = dt * T::lit(0.5);
        let factor = |e: T, tau: T| {
            if imaginary {
                Complex::new((-e * tau).exp(), T::zero())
            } else {
                Complex::from_polar(T::one(), -e * tau)
            }
        };
        let half_potential = ham.potential().iter().map(|&v| factor(v, half)).collect();
        let kinetic = ham.kinetic_symbol().into_iter().map(|e| factor(e, dt)).collect();
        Self { ham, dt, imaginary, half_potential, kinetic, mask }
    }

    /// The propagator for `-dt` (exact inverse of [`step`](Self::step) when
    /// no mask is active).
    pub fn reversed(&self) -> Result<Self> {
        if self.imaginary || self.mask.is_some() {
            return Err(Error::Config("only unmasked real-time steps are reversible".into()));
        }
        Ok(Self {
            ham: self.ham.clone(),
            dt: -self.dt,
            imaginary: false,
            half_potential: self.half_potential.iter().map(|c| c.conj()).collect(),
            kinetic: self.kinetic.iter().map(|c| c.conj()).collect(),
            mask: None,
        })
    }

    pub fn hamiltonian(&self) -> &Hamiltonian<T> {
        &self.ham
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn step(&self, field: &mut ComplexField<T>) -> Result<()> {
        if field.dim() != self.ham.dim() || field.grid() != self.ham.grid() {
            return Err(Error::Data("field and propagator live on different grids".into()));
        }
        let dim = field.dim();
        let spectral = self.ham.spectral();
        let data = field.data_mut();
        let mul = |d: &mut [Complex<T>], f: &[Complex<T>]| {
            d.par_iter_mut().zip(f.par_iter()).for_each(|(a, &b)| *a = *a * b);
        };
        mul(data, &self.half_potential);
        match dim {
            Dim::One => {
                spectral.forward_1d(data);
                mul(data, &self.kinetic);
                spectral.inverse_1d(data);
            }
            Dim::Two => {
                spectral.forward_2d(data);
                mul(data, &self.kinetic);
                spectral.inverse_2d(data);
            }
        }
        mul(data, &self.half_potential);
        if let Some(mask) = &self.mask {
            data.par_iter_mut().zip(mask.par_iter()).for_each(|(a, &m)| *a = *a * m);
        }
        Ok(())
    }

    pub fn run(&self, field: &mut ComplexField<T>, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step(field)?;
        }
        Ok(())
    }
}
