//! Evolution in separated coordinates `r = x - y`, `s = x + y`.
//!
//! The scaled meta-Hamiltonian splits as
//! `-(1/kappa) d2/dr2 + v(|r|)` plus `-(1/kappa) d2/ds2`, so a product
//! `Phi(r) Theta(s)` stays a product. `Phi` is propagated numerically; the
//! centre factor of a Gaussian start is a freely spreading Gaussian known in
//! closed form.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{ComplexField, Dim};
use super::grid::Grid;
use super::hamiltonian::Hamiltonian;
use super::propagator::{PropagatorConfig, SplitStep};
use crate::error::{Error, Result};
use crate::potential::RadialPotential;
use crate::scalar::Real;

/// `Theta(s, t) = sqrt(A0 / A(t)) exp(-s^2 / (4 A(t)))` with
/// `A0 = lambda0^2 / 2` and `A(t) = A0 + i t / kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentreGaussian {
    pub lambda0: f64,
    pub kappa: f64,
}

impl CentreGaussian {
    fn a0(&self) -> f64 {
        0.5 * self.lambda0 * self.lambda0
    }

    pub fn amplitude<T: Real>(&self, s: T, t: f64) -> Complex<T> {
        let a0 = self.a0();
        let a = Complex::new(a0, t / self.kappa);
        let pre = (Complex::new(a0, 0.0) / a).sqrt();
        let val = pre * (-(s.as_f64() * s.as_f64()) / (4.0 * a)).exp();
        Complex::new(T::lit(val.re), T::lit(val.im))
    }

    /// `sigma(t) / sigma(0)` for `|Theta|^2`.
    pub fn width_ratio(&self, t: f64) -> f64 {
        let r = t / (self.kappa * self.a0());
        (1.0 + r * r).sqrt()
    }

    /// Standard deviation of `s` under `|Theta(s, t)|^2`.
    pub fn width(&self, t: f64) -> f64 {
        self.a0().sqrt() * self.width_ratio(t)
    }

    /// `int |Theta|^2 ds`, constant in time.
    pub fn norm_sq(&self) -> f64 {
        (2.0 * std::f64::consts::PI * self.a0()).sqrt()
    }
}

pub struct FactoredEvolution<T: Real> {
    relative: ComplexField<T>,
    centre: CentreGaussian,
    steps: u64,
    propagator: SplitStep<T>,
}

impl<T: Real> FactoredEvolution<T> {
    pub fn new(
        phi0: ComplexField<T>,
        centre: CentreGaussian,
        v: &dyn RadialPotential<T>,
        cfg: &PropagatorConfig,
        kappa: f64,
    ) -> Result<Self> {
        if phi0.dim() != Dim::One {
            return Err(Error::Data("relative factor must be a 1D field".into()));
        }
        if (centre.kappa - kappa).abs() > 1e-12 * kappa {
            return Err(Error::Config("centre factor and relative factor use different kappa".into()));
        }
        phi0.check_finite()?;
        let ham = Hamiltonian::relative(*phi0.grid(), v, T::lit(kappa))?;
        let propagator = SplitStep::new(ham, cfg)?;
        Ok(Self { relative: phi0, centre, steps: 0, propagator })
    }

    /// Product-Gaussian start `exp(-r^2/(2 lambda0^2)) exp(-s^2/(2 lambda0^2))`,
    /// with `Phi` sampled on the relative grid of `physical`.
    pub fn gaussian_meta(
        lambda0: f64,
        physical: &Grid<T>,
        v: &dyn RadialPotential<T>,
        cfg: &PropagatorConfig,
        kappa: f64,
    ) -> Result<Self> {
        check_width(lambda0, physical)?;
        let rel = physical.relative();
        let l = T::lit(lambda0);
        let phi0 = ComplexField::from_fn_1d(rel, |r| Complex::new((-(r * r) / (T::lit(2.0) * l * l)).exp(), T::zero()));
        Self::new(phi0, CentreGaussian { lambda0, kappa }, v, cfg, kappa)
    }

    pub fn advance(&mut self, steps: usize) -> Result<()> {
        self.propagator.run(&mut self.relative, steps)?;
        self.steps += steps as u64;
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.steps as f64 * self.propagator.dt().as_f64()
    }

    pub fn relative(&self) -> &ComplexField<T> {
        &self.relative
    }

    pub fn centre(&self) -> &CentreGaussian {
        &self.centre
    }

    pub fn hamiltonian(&self) -> &Hamiltonian<T> {
        self.propagator.hamiltonian()
    }

    /// `Xi(x_i, y_j) = Phi(x_i - y_j) Theta(x_i + y_j)` on `physical`,
    /// normalized. Also returns the fraction of the factored state's
    /// probability that falls inside the physical box.
    pub fn reconstruct(&self, physical: &Grid<T>) -> Result<(ComplexField<T>, f64)> {
        if self.relative.grid() != &physical.relative() {
            return Err(Error::Data("relative factor is not on the relative grid of the physical box".into()));
        }
        let n = physical.points();
        let xs = physical.coordinates();
        let t = self.time();
        let phi = self.relative.data();
        let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
        data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, a) in row.iter_mut().enumerate() {
                *a = phi[i + n - j] * self.centre.amplitude(xs[i] + xs[j], t);
            }
        });
        let mut xi = ComplexField::from_vec(*physical, Dim::Two, data)?;
        let full = self.relative.norm_sq().as_f64() * self.centre.norm_sq() * 0.5;
        let inside = xi.normalize()?.as_f64();
        Ok((xi, inside / full))
    }
}

pub(crate) fn check_width<T: Real>(lambda0: f64, grid: &Grid<T>) -> Result<()> {
    if !(lambda0.is_finite() && lambda0 > 0.0) {
        return Err(Error::Domain(format!("initial width must be positive, got {lambda0}")));
    }
    let limit = grid.extent().as_f64() / 8.0;
    if lambda0 >= limit {
        return Err(Error::Domain(format!("initial width {lambda0} does not fit the box (needs < {limit})")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::init_gaussian_meta;
    use crate::potential::MetaBall;

    #[test]
    fn centre_gaussian_at_zero_time() {
        let c = CentreGaussian { lambda0: 3.0, kappa: 2.0 };
        let a: Complex<f64> = c.amplitude(1.5, 0.0);
        assert!((a.re - (-(1.5f64 * 1.5) / 18.0).exp()).abs() < 1e-15);
        assert!(a.im.abs() < 1e-15);
        assert_eq!(c.width_ratio(0.0), 1.0);
    }

    #[test]
    fn reconstruction_at_zero_time_matches_direct_product() {
        let g = Grid::new(64.0f64, 128).unwrap();
        let f = FactoredEvolution::gaussian_meta(5.0, &g, &MetaBall, &PropagatorConfig::with_dt(0.05), 25.0).unwrap();
        let (xi, retained) = f.reconstruct(&g).unwrap();
        let direct = init_gaussian_meta(5.0, &g).unwrap();
        assert!(1.0 - xi.fidelity(&direct).unwrap() < 1e-12);
        assert!((retained - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_wrong_grid() {
        let g = Grid::new(64.0f64, 128).unwrap();
        let f = FactoredEvolution::gaussian_meta(5.0, &g, &MetaBall, &PropagatorConfig::with_dt(0.05), 25.0).unwrap();
        assert!(f.reconstruct(&Grid::new(64.0, 64).unwrap()).is_err());
        assert!(FactoredEvolution::gaussian_meta(9.0, &g, &MetaBall, &PropagatorConfig::with_dt(0.05), 25.0).is_err());
    }
}
