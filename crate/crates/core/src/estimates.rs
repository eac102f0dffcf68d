//! Closed-form estimates for the localization of a Gaussian centre-of-mass
//! state of a self-gravitating ball, all in CGS.
//!
//! Gaussian convention: the single-body amplitude is `Psi(X) ~ exp(-X^2 / Lambda_0^2)`
//! in three dimensions, so each Cartesian component of `|Psi|^2` has variance
//! `Lambda_0^2 / 4`. The meta-state is the product `Psi(X) Psi(Y)`; its
//! relative and centre factors are both `exp(-s^2 / (2 Lambda_0^2))`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{v_scaled, CONTACT};
use crate::quadrature::{integrate, Tolerance};
use crate::units::{Constants, PhysicalScenario, PROTON_MASS_G};

/// Textual statement of the Gaussian convention, carried in reports.
pub const GAUSSIAN_CONVENTION: &str =
    "Psi(X) ~ exp(-X^2/Lambda0^2) in 3D; per-component variance of |Psi|^2 is Lambda0^2/4";

/// Below this `Lambda_0 / R` the point-mass estimates are flagged.
pub const MIN_WIDTH_RATIO: f64 = 10.0;

fn gm2(s: &PhysicalScenario) -> f64 {
    s.constants.g * s.mass_g * s.mass_g
}

/// Conditions under which the point-particle estimates are unreliable.
pub fn validity_warnings(s: &PhysicalScenario) -> Vec<String> {
    let mut out = Vec::new();
    let ratio = s.width_cm / s.radius_cm;
    if ratio < MIN_WIDTH_RATIO {
        out.push(format!(
            "Lambda0/R = {ratio:.3} < {MIN_WIDTH_RATIO}: the point-mass virial estimate assumes Lambda0 >> R"
        ));
    }
    out
}

/// Time-averaged relative kinetic energy, `G M^2 / Lambda_0` (erg).
pub fn virial_energy(s: &PhysicalScenario) -> f64 {
    gm2(s) / s.width_cm
}

/// Phase-variation length of the relative factor, `hbar sqrt(Lambda_0 / (G M^3))` (cm).
pub fn localization_length(s: &PhysicalScenario) -> f64 {
    let c = s.constants;
    c.hbar * (s.width_cm / (c.g * s.mass_g.powi(3))).sqrt()
}

/// `(Lambda_0 / Lambda)^3`.
pub fn branch_count(s: &PhysicalScenario) -> f64 {
    (s.width_cm / localization_length(s)).powi(3)
}

/// `Lambda_0^{3/2} G^{3/2} M^{9/2} / hbar^3`, algebraically equal to [`branch_count`].
pub fn branch_count_closed_form(s: &PhysicalScenario) -> f64 {
    let c = s.constants;
    (s.width_cm * c.g).powf(1.5) * s.mass_g.powf(4.5) / c.hbar.powi(3)
}

/// Entropy of `N` equiprobable branches in units of `k_B`.
pub fn entropy_over_kb(s: &PhysicalScenario) -> f64 {
    branch_count(s).ln()
}

/// `hbar Lambda_0 / (G M^2)` (s).
pub fn localization_time(s: &PhysicalScenario) -> f64 {
    s.constants.hbar * s.width_cm / gm2(s)
}

/// Per-component standard deviation of the centre-of-mass coordinate
/// `(X + Y) / 2` for the product Gaussian (cm).
pub fn cm_width(s: &PhysicalScenario) -> f64 {
    s.width_cm / (2.0 * std::f64::consts::SQRT_2)
}

/// Time for the centre-of-mass width to grow by `sqrt 2` under free motion
/// of the total meta-mass `2M`: `2 (2M) sigma_0^2 / hbar` (s).
pub fn spreading_time(s: &PhysicalScenario) -> f64 {
    let sigma0 = cm_width(s);
    2.0 * (2.0 * s.mass_g) * sigma0 * sigma0 / s.constants.hbar
}

/// Bohr length of the relative motion, reduced mass `M/2` and coupling
/// `G M^2 / 2`: `4 hbar^2 / (G M^3)` (cm).
pub fn hydrogenic_length(s: &PhysicalScenario) -> f64 {
    let c = s.constants;
    4.0 * c.hbar * c.hbar / (c.g * s.mass_g.powi(3))
}

/// Principal quantum number of hydrogen-like relative states at the width
/// scale, `sqrt(Lambda_0 / a)`.
pub fn principal_quantum_number(s: &PhysicalScenario) -> f64 {
    (s.width_cm / hydrogenic_length(s)).sqrt()
}

/// Mass (g) at which a ball of density `density` reaches coupling
/// `kappa_star`, with `R = (3 M / (4 pi density))^{1/3}`.
pub fn threshold_mass(density: f64, kappa_star: f64, c: &Constants) -> Result<f64> {
    if !(density.is_finite() && density > 0.0) {
        return Err(Error::Domain(format!("density must be positive, got {density}")));
    }
    if !(kappa_star.is_finite() && kappa_star > 0.0) {
        return Err(Error::Domain(format!("kappa* must be positive, got {kappa_star}")));
    }
    let pi = std::f64::consts::PI;
    Ok((kappa_star * c.hbar * c.hbar / c.g).powf(0.3) * (4.0 * pi * density / 3.0).powf(0.1))
}

pub fn threshold_mass_protons(density: f64, kappa_star: f64, c: &Constants) -> Result<f64> {
    threshold_mass(density, kappa_star, c).map(|m| m / PROTON_MASS_G)
}

/// Meta-energy statistics of the product Gaussian (erg).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianEnergy {
    pub mean: f64,
    pub std: f64,
    pub potential_mean: f64,
    pub potential_std: f64,
    /// Relative plus centre-of-mass kinetic energy.
    pub kinetic_mean: f64,
    /// `|<H>| / std`.
    pub bound_dominance: f64,
}

/// `<H_G>` and its spread for the product Gaussian.
///
/// Both the relative and the centre factor are `f(s) = exp(-s^2 / (2 L^2))`
/// and both kinetic operators are `-(hbar^2 / M) nabla_s^2`, which acts on
/// `f` as multiplication by `(hbar^2 / (M L^2)) (3 - s^2 / L^2)`. The
/// relative part adds `V(|s|)`. With `t = s / L` the radial density is
/// `(4 / sqrt pi) t^2 exp(-t^2)`, and every moment is a 1D radial integral.
pub fn gaussian_energy(s: &PhysicalScenario) -> Result<GaussianEnergy> {
    s.validate()?;
    let width = s.width_cm;
    let ratio = width / s.radius_cm;
    let energy = gm2(s) / width;
    // Kinetic multiplier in units of G M^2 / Lambda_0.
    let kin = s.constants.hbar * s.constants.hbar / (s.mass_g * width * width) / energy;
    let density = |t: f64| 4.0 / std::f64::consts::PI.sqrt() * t * t * (-t * t).exp();
    let pot = |t: f64| ratio * v_scaled(t * ratio).unwrap_or(f64::NAN);
    let tau = |t: f64| kin * (3.0 - t * t);

    let t_max = 12.0;
    let breaks = [CONTACT / ratio];
    let tol = Tolerance { abs: 1e-14, rel: 1e-12, max_intervals: 4000 };
    let moment = |f: &(dyn Fn(f64) -> f64 + Sync)| -> Result<f64> {
        integrate(|t| density(t) * f(t), 0.0, t_max, &breaks, tol).map(|e| e.value)
    };

    let v1 = moment(&pot)?;
    let v2 = moment(&|t| pot(t) * pot(t))?;
    let rel1 = moment(&|t| tau(t) + pot(t))?;
    let rel2 = moment(&|t| (tau(t) + pot(t)).powi(2))?;
    let cm1 = moment(&tau)?;
    let cm2 = moment(&|t| tau(t) * tau(t))?;

    let mean = rel1 + cm1;
    let var = (rel2 - rel1 * rel1).max(0.0) + (cm2 - cm1 * cm1).max(0.0);
    let std = var.sqrt();
    Ok(GaussianEnergy {
        mean: mean * energy,
        std: std * energy,
        potential_mean: v1 * energy,
        potential_std: (v2 - v1 * v1).max(0.0).sqrt() * energy,
        kinetic_mean: (rel1 - v1 + cm1) * energy,
        bound_dominance: mean.abs() / std,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Monte Carlo average of `V(|X - Y|)` (erg) over the six-dimensional
/// product Gaussian. Deterministic for a given `seed` and `samples`.
pub fn monte_carlo_potential(s: &PhysicalScenario, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    s.validate()?;
    if samples < 2 {
        return Err(Error::Domain("need at least two samples".into()));
    }
    const CHUNK: usize = 1 << 16;
    let sigma = 0.5 * s.width_cm / s.radius_cm;
    let ratio = s.width_cm / s.radius_cm;
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = CHUNK.min(samples - c * CHUNK);
            let mut acc = (0.0, 0.0);
            for _ in 0..n {
                let mut d2 = 0.0;
                for _ in 0..3 {
                    let x: f64 = StandardNormal.sample(&mut rng);
                    let y: f64 = StandardNormal.sample(&mut rng);
                    let d = sigma * (x - y);
                    d2 += d * d;
                }
                // Potential in units of G M^2 / Lambda_0.
                let v = ratio * v_scaled(d2.sqrt()).expect("non-negative distance");
                acc.0 += v;
                acc.1 += v * v;
            }
            acc
        })
        .collect();
    // Summed in chunk order so the result does not depend on the thread count.
    let (sum, sum_sq) = partial.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    let energy = gm2(s) / s.width_cm;
    Ok(MonteCarloEstimate { mean: mean * energy, std_error: (var / n).sqrt() * energy, samples })
}

/// Every closed-form quantity for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub convention: String,
    pub kappa: f64,
    pub width_over_radius: f64,
    /// erg
    pub virial_energy: f64,
    /// cm
    pub localization_length: f64,
    /// s
    pub localization_time: f64,
    pub branch_count: f64,
    pub entropy_over_kb: f64,
    /// erg / K
    pub entropy: f64,
    /// s
    pub spreading_time: f64,
    /// cm
    pub hydrogenic_length: f64,
    pub principal_quantum_number: f64,
    /// erg
    pub h_g_expect: f64,
    /// erg
    pub h_g_std: f64,
    /// erg
    pub potential_expect: f64,
    pub bound_dominance: f64,
    pub warnings: Vec<String>,
}

pub fn report(s: &PhysicalScenario) -> Result<EstimateReport> {
    let scaled = s.scale()?;
    let gauss = gaussian_energy(s)?;
    let n = branch_count(s);
    Ok(EstimateReport {
        convention: GAUSSIAN_CONVENTION.to_string(),
        kappa: scaled.kappa,
        width_over_radius: scaled.width,
        virial_energy: virial_energy(s),
        localization_length: localization_length(s),
        localization_time: localization_time(s),
        branch_count: n,
        entropy_over_kb: n.ln(),
        entropy: s.constants.k_b * n.ln(),
        spreading_time: spreading_time(s),
        hydrogenic_length: hydrogenic_length(s),
        principal_quantum_number: principal_quantum_number(s),
        h_g_expect: gauss.mean,
        h_g_std: gauss.std,
        potential_expect: gauss.potential_mean,
        bound_dominance: gauss.bound_dominance,
        warnings: validity_warnings(s),
    })
}
