//! Halved mutual gravitational energy of two interpenetrating uniform balls.
//!
//! In units of `eps = G M^2 / R` and with `u = d / R`:
//!
//! ```text
//! v(u) = -(1/2) (6/5 - u^2/2 + 3 u^3/16 - u^5/160)   u <= 2
//! v(u) = -1 / (2 u)                                   u >= 2
//! ```
//!
//! The two branches agree through the third derivative at contact (`u = 2`).
//! [`oracle`] recomputes the same quantity by direct quadrature over the
//! overlapping volumes.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::units::PhysicalScenario;

/// Separation (in units of `R`) at which the balls touch.
pub const CONTACT: f64 = 2.0;

/// A potential energy depending only on the distance between the two
/// coordinates. Implementations receive a non-negative separation.
pub trait RadialPotential<T: Real>: Sync {
    fn value(&self, u: T) -> T;
}

/// The halved meta-ball potential, in units of `G M^2 / R`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MetaBall;

/// `v(u) = stiffness * u^2 / 2`, used to validate propagators against the
/// analytic oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub stiffness: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Free;

#[inline]
fn inner_branch<T: Real>(u: T) -> T {
    let u2 = u * u;
    let poly = T::lit(1.2) - u2 * T::lit(0.5) + u2 * u * T::lit(3.0 / 16.0) - u2 * u2 * u / T::lit(160.0);
    -poly * T::lit(0.5)
}

/// Scaled potential `v(u)`. Negative separations are rejected.
pub fn v_scaled<T: Real>(u: T) -> Result<T> {
    if u.is_nan() || u < T::zero() {
        return Err(Error::Domain(format!("separation must be non-negative, got {u}")));
    }
    Ok(metaball(u))
}

#[inline]
fn metaball<T: Real>(u: T) -> T {
    if u <= T::lit(CONTACT) {
        inner_branch(u)
    } else {
        -T::lit(0.5) / u
    }
}

/// `dv/du`.
pub fn dv_scaled<T: Real>(u: T) -> Result<T> {
    if u.is_nan() || u < T::zero() {
        return Err(Error::Domain(format!("separation must be non-negative, got {u}")));
    }
    Ok(if u <= T::lit(CONTACT) {
        let u2 = u * u;
        -(-u + u2 * T::lit(9.0 / 16.0) - u2 * u2 / T::lit(32.0)) * T::lit(0.5)
    } else {
        T::lit(0.5) / (u * u)
    })
}

/// Physical potential energy in erg at centre separation `d_cm`.
pub fn v_physical(d_cm: f64, s: &PhysicalScenario) -> Result<f64> {
    if d_cm.is_nan() || d_cm < 0.0 {
        return Err(Error::Domain(format!("separation must be non-negative, got {d_cm}")));
    }
    let eps = s.constants.g * s.mass_g * s.mass_g / s.radius_cm;
    Ok(eps * metaball(d_cm / s.radius_cm))
}

impl<T: Real> RadialPotential<T> for MetaBall {
    #[inline]
    fn value(&self, u: T) -> T {
        metaball(u.abs())
    }
}

impl<T: Real> RadialPotential<T> for Harmonic {
    #[inline]
    fn value(&self, u: T) -> T {
        T::lit(0.5 * self.stiffness) * u * u
    }
}

impl<T: Real> RadialPotential<T> for Free {
    #[inline]
    fn value(&self, _u: T) -> T {
        T::zero()
    }
}

impl<T: Real, F: Fn(T) -> T + Sync> RadialPotential<T> for F {
    fn value(&self, u: T) -> T {
        self(u)
    }
}

pub mod oracle {
    //! Independent evaluation of the meta-ball potential by 2D quadrature.
    //!
    //! Ball 1 (unit mass, unit radius) sits at the origin with potential
    //! `phi(r) = -(3 - r^2)/2` inside and `-1/r` outside. Ball 2 is sliced
    //! into discs perpendicular to the axis joining the centres; each disc at
    //! axial offset `z` from centre 2 has radius `sqrt(1 - z^2)` and lies at
    //! distance `D = u + z` from centre 1. The mutual energy is
    //! `(3/2) * int dz int rho drho phi(sqrt(D^2 + rho^2))`, and `v` is half of it.

    use crate::error::{Error, Result};
    use crate::quadrature::{integrate, Tolerance};

    fn ball_potential(r: f64) -> f64 {
        if r <= 1.0 {
            -0.5 * (3.0 - r * r)
        } else {
            -1.0 / r
        }
    }

    fn disc_integral(offset: f64, disc_radius: f64) -> Result<f64> {
        let mut breaks = Vec::new();
        if offset.abs() < 1.0 {
            breaks.push((1.0 - offset * offset).sqrt());
        }
        let tol = Tolerance { abs: 1e-14, rel: 1e-13, max_intervals: 2000 };
        integrate(
            |rho: f64| rho * ball_potential((offset * offset + rho * rho).sqrt()),
            0.0,
            disc_radius,
            &breaks,
            tol,
        )
        .map(|e| e.value)
    }

    /// Halved mutual energy of two overlapping unit balls at separation `u`.
    pub fn v_oracle(u: f64) -> Result<f64> {
        if u.is_nan() || u < 0.0 {
            return Err(Error::Domain(format!("separation must be non-negative, got {u}")));
        }
        let breaks = [-0.5 * u, 1.0 - u, -1.0 - u];
        let tol = Tolerance { abs: 1e-11, rel: 1e-11, max_intervals: 2000 };
        let failure = std::cell::Cell::new(None);
        let outer = integrate(
            |z: f64| {
                let disc = (1.0 - z * z).max(0.0).sqrt();
                match disc_integral(u + z, disc) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.set(Some(e));
                        0.0
                    }
                }
            },
            -1.0,
            1.0,
            &breaks,
            tol,
        )?;
        if let Some(e) = failure.take() {
            return Err(e);
        }
        Ok(0.5 * 1.5 * outer.value)
    }
}
