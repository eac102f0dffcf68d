use num_complex::Complex;
use rayon::prelude::*;

use super::field::{ComplexField, Dim};
use super::grid::Grid;
use super::spectral::Spectral;
use crate::error::{Error, Result};
use crate::potential::RadialPotential;
use crate::scalar::Real;

/// `H = -c * Laplacian + V`, with `V` sampled on the grid nodes.
#[derive(Debug, Clone)]
pub struct Hamiltonian<T: Real> {
    grid: Grid<T>,
    dim: Dim,
    kinetic_coeff: T,
    potential: Vec<T>,
    spectral: Spectral<T>,
}

/// Mean and spread of an observable.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EnergyStats<T> {
    pub mean: T,
    pub std: T,
}

impl<T: Real> EnergyStats<T> {
    /// `|<H>| / std`.
    pub fn bound_dominance(&self) -> T {
        self.mean.abs() / self.std
    }
}

fn check_kappa<T: Real>(kappa: T) -> Result<()> {
    if kappa.is_finite() && kappa > T::zero() {
        Ok(())
    } else {
        Err(Error::Domain(format!("kappa must be positive, got {kappa}")))
    }
}

impl<T: Real> Hamiltonian<T> {
    pub fn new(grid: Grid<T>, dim: Dim, kinetic_coeff: T, potential: Vec<T>) -> Result<Self> {
        let len = grid.points().pow(dim.rank() as u32);
        if potential.len() != len {
            return Err(Error::Data(format!("potential has {} samples, grid needs {len}", potential.len())));
        }
        if !(kinetic_coeff.is_finite() && kinetic_coeff >= T::zero()) {
            return Err(Error::Config(format!("kinetic coefficient must be non-negative, got {kinetic_coeff}")));
        }
        Ok(Self { grid, dim, kinetic_coeff, potential, spectral: Spectral::new(grid.points()) })
    }

    /// Scaled meta-Hamiltonian on the `(x, y)` plane:
    /// `-(1/(2 kappa)) (d2/dx2 + d2/dy2) + v(|x - y|)`.
    pub fn meta(grid: Grid<T>, v: &dyn RadialPotential<T>, kappa: T) -> Result<Self> {
        check_kappa(kappa)?;
        let xs = grid.coordinates();
        let n = grid.points();
        let mut pot = vec![T::zero(); n * n];
        pot.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, p) in row.iter_mut().enumerate() {
                *p = v.value((xs[i] - xs[j]).abs());
            }
        });
        Self::new(grid, Dim::Two, (T::lit(2.0) * kappa).recip(), pot)
    }

    /// Relative-coordinate Hamiltonian `-(1/kappa) d2/dr2 + v(|r|)` (reduced
    /// scaled mass `kappa / 2`).
    pub fn relative(grid: Grid<T>, v: &dyn RadialPotential<T>, kappa: T) -> Result<Self> {
        check_kappa(kappa)?;
        let pot = grid.coordinates().into_iter().map(|r| v.value(r.abs())).collect();
        Self::new(grid, Dim::One, kappa.recip(), pot)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn kinetic_coeff(&self) -> T {
        self.kinetic_coeff
    }

    pub fn potential(&self) -> &[T] {
        &self.potential
    }

    pub(crate) fn spectral(&self) -> &Spectral<T> {
        &self.spectral
    }

    /// `c |k|^2` at the grid corner, the largest kinetic eigenvalue.
    pub fn max_kinetic(&self) -> T {
        let k = self.grid.nyquist();
        self.kinetic_coeff * k * k * T::from_usize_lossy(self.dim.rank())
    }

    fn check_field(&self, f: &ComplexField<T>) -> Result<()> {
        if f.dim() != self.dim || f.grid() != &self.grid {
            return Err(Error::Data("field and Hamiltonian live on different grids".into()));
        }
        Ok(())
    }

    fn to_k_space(&self, f: &ComplexField<T>) -> Vec<Complex<T>> {
        let mut d = f.data().to_vec();
        match self.dim {
            Dim::One => self.spectral.forward_1d(&mut d),
            Dim::Two => self.spectral.forward_2d(&mut d),
        }
        d
    }

    /// `c |k|^2` for every k-space sample (symmetric, so valid in the
    /// transposed 2D layout).
    pub(crate) fn kinetic_symbol(&self) -> Vec<T> {
        let k2: Vec<T> = self.grid.wavenumbers().iter().map(|&k| k * k).collect();
        match self.dim {
            Dim::One => k2.iter().map(|&q| self.kinetic_coeff * q).collect(),
            Dim::Two => k2
                .iter()
                .flat_map(|&a| k2.iter().map(move |&b| a + b))
                .map(|q| self.kinetic_coeff * q)
                .collect(),
        }
    }

    /// `H psi`.
    pub fn apply(&self, f: &ComplexField<T>) -> Result<ComplexField<T>> {
        self.check_field(f)?;
        let mut d = self.to_k_space(f);
        let symbol = self.kinetic_symbol();
        d.par_iter_mut().zip(symbol.par_iter()).for_each(|(a, &s)| *a = *a * s);
        match self.dim {
            Dim::One => self.spectral.inverse_1d(&mut d),
            Dim::Two => self.spectral.inverse_2d(&mut d),
        }
        d.par_iter_mut()
            .zip(f.data().par_iter().zip(self.potential.par_iter()))
            .for_each(|(out, (psi, &v))| *out = *out + *psi * v);
        ComplexField::from_vec(self.grid, self.dim, d)
    }

    /// `<psi|T|psi> / <psi|psi>` via Parseval.
    pub fn kinetic_energy(&self, f: &ComplexField<T>) -> Result<T> {
        self.check_field(f)?;
        let d = self.to_k_space(f);
        let symbol = self.kinetic_symbol();
        let len = T::from_usize_lossy(d.len());
        let t = d.iter().zip(&symbol).fold(T::zero(), |s, (a, &c)| s + c * a.norm_sqr()) / len;
        Ok(t * f.cell() / f.norm_sq())
    }

    pub fn potential_energy(&self, f: &ComplexField<T>) -> Result<T> {
        self.check_field(f)?;
        let v = f
            .data()
            .iter()
            .zip(&self.potential)
            .fold(T::zero(), |s, (a, &v)| s + v * a.norm_sqr());
        Ok(v * f.cell() / f.norm_sq())
    }

    pub fn energy(&self, f: &ComplexField<T>) -> Result<T> {
        Ok(self.kinetic_energy(f)? + self.potential_energy(f)?)
    }

    /// `<H>` and `sqrt(<H^2> - <H>^2)`, with `<H^2> = |H psi|^2`.
    pub fn energy_stats(&self, f: &ComplexField<T>) -> Result<EnergyStats<T>> {
        let norm = f.norm_sq();
        let hf = self.apply(f)?;
        let mean = f.inner(&hf)?.re / norm;
        let second = hf.norm_sq() / norm;
        Ok(EnergyStats { mean, std: (second - mean * mean).max(T::zero()).sqrt() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::field::gaussian_1d;
    use crate::potential::{Free, Harmonic};

    #[test]
    fn free_gaussian_kinetic_energy() {
        // psi ~ exp(-x^2/(2 w^2)): <p^2> = 1/(2 w^2).
        let g = Grid::new(60.0f64, 512).unwrap();
        let h = Hamiltonian::relative(g, &Free, 4.0).unwrap();
        let psi = gaussian_1d(g, 0.0, 1.5, 0.0);
        let t = h.kinetic_energy(&psi).unwrap();
        assert!((t - 0.25 / (2.0 * 1.5 * 1.5)).abs() < 1e-12);
        let stats = h.energy_stats(&psi).unwrap();
        assert!((stats.mean - t).abs() < 1e-12);
    }

    #[test]
    fn oscillator_ground_state_is_eigenstate() {
        // -(1/kappa) d2 + u^2/2: mass kappa/2, omega = sqrt(2/kappa).
        let kappa = 2.0;
        let omega = (2.0f64 / kappa).sqrt();
        let width = (1.0 / (0.5 * kappa * omega)).sqrt();
        let g = Grid::new(30.0f64, 256).unwrap();
        let h = Hamiltonian::relative(g, &Harmonic { stiffness: 1.0 }, kappa).unwrap();
        let psi = gaussian_1d(g, 0.0, width, 0.0);
        let s = h.energy_stats(&psi).unwrap();
        assert!((s.mean - 0.5 * omega).abs() < 1e-12);
        assert!(s.std < 1e-6);
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = Grid::new(10.0f64, 16).unwrap();
        assert!(Hamiltonian::relative(g, &Free, 0.0).is_err());
        assert!(Hamiltonian::new(g, Dim::One, 1.0, vec![0.0; 3]).is_err());
        let h = Hamiltonian::relative(g, &Free, 1.0).unwrap();
        let other = ComplexField::zeros(Grid::new(10.0f64, 32).unwrap(), Dim::One);
        assert!(h.apply(&other).is_err());
    }
}
