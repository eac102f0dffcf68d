//! Physical scenario in CGS units and its single-coupling dimensionless form.
//!
//! Lengths are measured in units of the ball radius `R`, energies in
//! `eps = G M^2 / R` and times in `hbar / eps`. In these units the
//! meta-wavefunction obeys
//!
//! ```text
//! i dXi/dt = [ -(1/(2 kappa)) (d2/dx2 + d2/dy2) + v(|x - y|) ] Xi,   kappa = G M^3 R / hbar^2
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kv::KeyValues;

/// CODATA 2018 values in CGS.
pub const G_CGS: f64 = 6.674_30e-8;
pub const HBAR_CGS: f64 = 1.054_571_817e-27;
pub const K_B_CGS: f64 = 1.380_649e-16;
pub const PROTON_MASS_G: f64 = 1.672_621_923_69e-24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// cm^3 g^-1 s^-2
    pub g: f64,
    /// erg s
    pub hbar: f64,
    /// erg / K
    pub k_b: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self { g: G_CGS, hbar: HBAR_CGS, k_b: K_B_CGS }
    }
}

/// A uniform ball of mass `M` and radius `R` whose centre of mass starts in a
/// Gaussian of width `Lambda_0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalScenario {
    pub mass_g: f64,
    pub radius_cm: f64,
    pub width_cm: f64,
    pub constants: Constants,
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {x}")))
    }
}

impl PhysicalScenario {
    pub fn new(mass_g: f64, radius_cm: f64, width_cm: f64) -> Result<Self> {
        Self::with_constants(mass_g, radius_cm, width_cm, Constants::default())
    }

    pub fn with_constants(mass_g: f64, radius_cm: f64, width_cm: f64, constants: Constants) -> Result<Self> {
        let s = Self { mass_g, radius_cm, width_cm, constants };
        s.validate()?;
        Ok(s)
    }

    /// `M = 1e-9 g`, `R = 1e-3 cm`, `Lambda_0 = 0.1 cm`.
    pub fn reference() -> Self {
        Self::new(1e-9, 1e-3, 1e-1).expect("reference scenario is valid")
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("mass_g", self.mass_g)?;
        check_positive("radius_cm", self.radius_cm)?;
        check_positive("width_cm", self.width_cm)?;
        check_positive("G", self.constants.g)?;
        check_positive("hbar", self.constants.hbar)?;
        check_positive("k_B", self.constants.k_b)
    }

    /// Reads `mass_g`, `radius_cm`, `width_cm` and the optional overrides
    /// `G`, `hbar`, `k_B`.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let defaults = Constants::default();
        let constants = Constants {
            g: kv.get("G")?.unwrap_or(defaults.g),
            hbar: kv.get("hbar")?.unwrap_or(defaults.hbar),
            k_b: kv.get("k_B")?.unwrap_or(defaults.k_b),
        };
        Self::with_constants(
            kv.require("mass_g")?,
            kv.require("radius_cm")?,
            kv.require("width_cm")?,
            constants,
        )
    }

    pub fn from_config_str(text: &str) -> Result<Self> {
        Self::from_key_values(&KeyValues::parse(text)?)
    }

    pub fn scale(&self) -> Result<ScaledScenario> {
        scale(self)
    }
}

/// Dimensionless coupling and the unit factors that map scaled quantities
/// back to CGS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledScenario {
    pub kappa: f64,
    /// cm
    pub length_unit: f64,
    /// erg
    pub energy_unit: f64,
    /// s
    pub time_unit: f64,
    /// `Lambda_0 / R`
    pub width: f64,
}

pub fn scale(s: &PhysicalScenario) -> Result<ScaledScenario> {
    s.validate()?;
    let c = s.constants;
    let kappa = c.g * s.mass_g.powi(3) * s.radius_cm / (c.hbar * c.hbar);
    let energy_unit = c.g * s.mass_g * s.mass_g / s.radius_cm;
    Ok(ScaledScenario {
        kappa,
        length_unit: s.radius_cm,
        energy_unit,
        time_unit: c.hbar / energy_unit,
        width: s.width_cm / s.radius_cm,
    })
}

impl ScaledScenario {
    pub fn unscale_length(&self, x: f64) -> f64 {
        x * self.length_unit
    }
    pub fn unscale_energy(&self, x: f64) -> f64 {
        x * self.energy_unit
    }
    pub fn unscale_time(&self, x: f64) -> f64 {
        x * self.time_unit
    }
    pub fn scale_length(&self, cm: f64) -> f64 {
        cm / self.length_unit
    }
    pub fn scale_energy(&self, erg: f64) -> f64 {
        erg / self.energy_unit
    }
    pub fn scale_time(&self, s: f64) -> f64 {
        s / self.time_unit
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn reference_kappa() {
        let s = PhysicalScenario::reference().scale().unwrap();
        // 6.6743e-8 * 1e-27 * 1e-3 / (1.054571817e-27)^2
        let expected = 6.674_30e-38 / (1.054_571_817e-27f64).powi(2);
        assert_relative_eq!(s.kappa, expected, max_relative = 1e-14);
        assert!((s.kappa / 6.0e16 - 1.0).abs() < 0.01, "kappa = {}", s.kappa);
    }

    #[test]
    fn unit_kappa_when_gm3r_equals_hbar2() {
        let c = Constants { g: 2.0, hbar: 4.0, k_b: 1.0 };
        // G M^3 R = 2 * 8 * 1 = 16 = hbar^2
        let s = PhysicalScenario::with_constants(2.0, 1.0, 10.0, c).unwrap().scale().unwrap();
        assert_eq!(s.kappa, 1.0);
    }

    #[test]
    fn unscale_examples() {
        let s = PhysicalScenario::reference().scale().unwrap();
        assert_eq!(s.unscale_length(1.0), 1e-3);
        assert_relative_eq!(s.unscale_energy(1.0), 6.674_30e-23, max_relative = 1e-12);
        assert_eq!(s.unscale_energy(0.0), 0.0);
        assert_eq!(s.unscale_time(0.0), 0.0);
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert!(matches!(PhysicalScenario::new(0.0, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(PhysicalScenario::new(1.0, -1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(PhysicalScenario::new(1.0, 1.0, f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn kappa_scales_as_mass_cubed() {
        let a = PhysicalScenario::new(1e-9, 1e-3, 0.1).unwrap().scale().unwrap();
        let b = PhysicalScenario::new(2e-9, 1e-3, 0.1).unwrap().scale().unwrap();
        assert_eq!(b.kappa / a.kappa, 8.0);
    }

    #[test]
    fn config_with_overrides() {
        let s = PhysicalScenario::from_config_str("mass_g=1e-9\nradius_cm=1e-3\nwidth_cm=0.1\nhbar=1e-27\n").unwrap();
        assert_eq!(s.constants.hbar, 1e-27);
        assert_eq!(s.constants.g, G_CGS);
        assert!(PhysicalScenario::from_config_str("mass_g=1e-9\nradius_cm=1e-3\n").is_err());
    }

    proptest! {
        #[test]
        fn round_trip_and_positive_units(
            log_m in -20.0f64..5.0, log_r in -8.0f64..2.0, log_w in -6.0f64..3.0, x in -1e6f64..1e6,
        ) {
            let s = PhysicalScenario::new(10f64.powf(log_m), 10f64.powf(log_r), 10f64.powf(log_w))
                .unwrap()
                .scale()
                .unwrap();
            for unit in [s.length_unit, s.energy_unit, s.time_unit, s.kappa] {
                prop_assert!(unit.is_finite() && unit > 0.0);
            }
            let tol = 1e-12 * x.abs().max(f64::MIN_POSITIVE);
            prop_assert!((s.scale_length(s.unscale_length(x)) - x).abs() <= tol);
            prop_assert!((s.scale_energy(s.unscale_energy(x)) - x).abs() <= tol);
            prop_assert!((s.scale_time(s.unscale_time(x)) - x).abs() <= tol);
        }
    }
}
