//! s-wave bound states of the relative motion by Numerov shooting with
//! Sturm node counting, and the self-localization threshold coupling.
//!
//! The radial equation is `-(1/kappa) u'' + v(u) u = e u` with `u(0) = 0`
//! and a Dirichlet wall at `u_max`. The number of interior sign changes of
//! the outward solution at energy `e` equals the number of levels below `e`.
//!
//! The `-1/(2u)` tail binds at every positive `kappa`, so "a bound state
//! exists" has no threshold. A bound state is called *self-localized* when
//! its mean separation is inside contact distance, `<u> < 2`; the threshold
//! `kappa*` is where the ground state crosses that line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{v_scaled, CONTACT};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingOptions {
    /// Numerov step; default `min(0.005, 0.05 / sqrt(0.6 kappa))`.
    pub step: Option<f64>,
    /// Outer wall; default from the highest energy searched.
    pub u_max: Option<f64>,
    /// Bisection stops when the energy bracket is narrower than this.
    pub tolerance: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self { step: None, u_max: None, tolerance: 1e-11 }
    }
}

impl ShootingOptions {
    pub fn step_for(&self, kappa: f64) -> f64 {
        self.step.unwrap_or_else(|| 0.005f64.min(0.05 / (0.6 * kappa).sqrt()))
    }

    /// Wall far enough out for a level at energy `e < 0`: the outer turning
    /// point of the tail plus ten decay lengths, and at least 40.
    pub fn u_max_for(&self, kappa: f64, e: f64) -> f64 {
        self.u_max.unwrap_or_else(|| {
            let turning = if e > -0.25 { 0.5 / e.abs() } else { CONTACT };
            let decay = 1.0 / (kappa * e.abs()).sqrt();
            40f64.max(turning + 10.0 * decay)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    /// Number of radial nodes.
    pub nodes: usize,
    pub energy: f64,
    /// Hydrogenic principal number `nodes + 1 + offset`, see
    /// [`SpectrumResult::hydrogenic_offset`].
    pub principal: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub kappa: f64,
    /// Ascending, all negative.
    pub levels: Vec<Level>,
    pub u_max: f64,
    pub step: f64,
    /// Number of pure-Coulomb levels that lie below `v(0)` and are therefore
    /// absent: the integer part of the quantum defect, read off the highest level.
    pub hydrogenic_offset: usize,
}

/// `-kappa / (16 n^2)`: levels of `-(1/kappa) Laplacian - 1/(2u)`.
pub fn hydrogenic_energy(kappa: f64, n: usize) -> f64 {
    -kappa / (16.0 * (n * n) as f64)
}

/// Effective principal number `sqrt(kappa / (16 |e|))`.
pub fn effective_principal(kappa: f64, e: f64) -> f64 {
    (kappa / (16.0 * e.abs())).sqrt()
}

struct Shooter<T> {
    step: T,
    steps: usize,
    /// `kappa * v(u_i)`.
    kv: Vec<T>,
    kappa: T,
}

/// Largest Numerov grid a single shot may allocate.
pub const MAX_SHOOTING_STEPS: usize = 50_000_000;

impl<T: Real> Shooter<T> {
    fn new(kappa: f64, u_max: f64, step: f64) -> Result<Self> {
        let steps_f = (u_max / step).ceil();
        if !(steps_f.is_finite() && steps_f <= MAX_SHOOTING_STEPS as f64) {
            return Err(Error::Domain(format!(
                "shooting grid of {steps_f:.3e} steps (u_max = {u_max}, step = {step:.3e}) exceeds {MAX_SHOOTING_STEPS}; kappa = {kappa} is out of reach"
            )));
        }
        let steps = steps_f as usize;
        let step_t = T::lit(u_max / steps as f64);
        let kv = (0..=steps)
            .map(|i| T::lit(kappa) * v_scaled(step_t * T::from_usize_lossy(i)).expect("non-negative"))
            .collect();
        Ok(Self { step: step_t, steps, kv, kappa: T::lit(kappa) })
    }

    fn u_max(&self) -> f64 {
        self.step.as_f64() * self.steps as f64
    }

    /// Numerov recurrence for `y'' = f y`; calls `visit(i, y_i)` with values
    /// rescaled on the fly (only signs and ratios are meaningful).
    fn integrate(&self, e: T, mut visit: impl FnMut(usize, T, T)) {
        let c = self.step * self.step / T::lit(12.0);
        let ke = self.kappa * e;
        let f = |i: usize| self.kv[i] - ke;
        let big = T::lit(1e30);
        let (mut y0, mut y1) = (T::zero(), self.step);
        visit(0, y0, T::one());
        visit(1, y1, T::one());
        let mut scale = T::one();
        for i in 1..self.steps {
            let y2 = (T::lit(2.0) * y1 * (T::one() + T::lit(5.0) * c * f(i)) - y0 * (T::one() - c * f(i - 1)))
                / (T::one() - c * f(i + 1));
            y0 = y1;
            y1 = y2;
            if y1.abs() > big {
                y0 = y0 / big;
                y1 = y1 / big;
                scale = scale * big;
            }
            visit(i + 1, y1, scale);
        }
    }

    /// Sign changes of the outward solution in `(0, u_max)`.
    fn count_nodes(&self, e: T) -> usize {
        let mut nodes = 0;
        let mut prev = T::zero();
        let last = self.steps;
        self.integrate(e, |i, y, _| {
            if i >= 1 && i < last {
                if prev != T::zero() && (y * prev) < T::zero() {
                    nodes += 1;
                }
                if y != T::zero() {
                    prev = y;
                }
            }
        });
        nodes
    }

    fn bisect(&self, k: usize, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.count_nodes(T::lit(mid)) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("kappa must be positive, got {kappa}")))
    }
}

/// Number of s-wave levels below `e` inside the wall.
pub fn count_levels_below(kappa: f64, e: f64, opts: &ShootingOptions) -> Result<usize> {
    check_kappa(kappa)?;
    let shooter = Shooter::<f64>::new(kappa, opts.u_max_for(kappa, e.min(-1e-6)), opts.step_for(kappa))?;
    Ok(shooter.count_nodes(e))
}

/// All s-wave levels with energy in `e_range = (lo, hi)`, `hi < 0`.
pub fn radial_shoot(kappa: f64, e_range: (f64, f64), opts: &ShootingOptions) -> Result<SpectrumResult> {
    radial_shoot_with::<f64>(kappa, e_range, opts)
}

/// [`radial_shoot`] carried out in scalar type `T`.
pub fn radial_shoot_with<T: Real>(kappa: f64, e_range: (f64, f64), opts: &ShootingOptions) -> Result<SpectrumResult> {
    check_kappa(kappa)?;
    let (lo, hi) = e_range;
    if !(lo < hi && hi < 0.0) {
        return Err(Error::Domain(format!("energy range must satisfy lo < hi < 0, got ({lo}, {hi})")));
    }
    let lo = lo.max(-0.6);
    let step = opts.step_for(kappa);
    let shooter = Shooter::<T>::new(kappa, opts.u_max_for(kappa, hi), step)?;
    let below_lo = shooter.count_nodes(T::lit(lo));
    let below_hi = shooter.count_nodes(T::lit(hi));
    let mut levels: Vec<Level> = (below_lo..below_hi)
        .map(|k| Level { nodes: k, energy: shooter.bisect(k, lo, hi, opts.tolerance), principal: 0 })
        .collect();
    let offset = levels
        .last()
        .map(|top| {
            let defect = effective_principal(kappa, top.energy) - (top.nodes + 1) as f64;
            defect.round().max(0.0) as usize
        })
        .unwrap_or(0);
    for l in &mut levels {
        l.principal = l.nodes + 1 + offset;
    }
    Ok(SpectrumResult { kappa, levels, u_max: shooter.u_max(), step: shooter.step.as_f64(), hydrogenic_offset: offset })
}

/// A normalized radial function `u(r)` on `[0, u_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialState {
    pub energy: f64,
    pub step: f64,
    pub values: Vec<f64>,
    /// `int r u^2 dr`.
    pub mean_separation: f64,
}

impl RadialState {
    pub fn radius(&self, i: usize) -> f64 {
        i as f64 * self.step
    }
}

fn outer_turning_point(e: f64) -> f64 {
    if e >= 0.0 {
        return f64::INFINITY;
    }
    if e > -0.25 {
        return 0.5 / e.abs();
    }
    // Inner branch is monotone on [0, 2].
    let (mut a, mut b) = (0.0, CONTACT);
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if v_scaled(m).expect("non-negative") < e {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Eigenfunction at an eigenvalue `e` (from [`radial_shoot`]), built from an
/// outward and an inward Numerov solution joined at the outer turning point.
pub fn radial_wavefunction(kappa: f64, e: f64, opts: &ShootingOptions) -> Result<RadialState> {
    check_kappa(kappa)?;
    if e >= 0.0 {
        return Err(Error::Domain("radial wavefunctions exist only for e < 0".into()));
    }
    let u_max = opts.u_max_for(kappa, e);
    let shooter = Shooter::<f64>::new(kappa, u_max, opts.step_for(kappa))?;
    let n = shooter.steps;
    let h = shooter.step;
    let join = ((outer_turning_point(e) / h).round() as usize).clamp(2, n - 2);

    let mut out = vec![0.0; n + 1];
    let mut scales = vec![1.0; n + 1];
    shooter.integrate(e, |i, y, s| {
        out[i] = y;
        scales[i] = s;
    });
    // Bring the outward branch up to `join` onto one scale.
    let ref_scale = scales[join];
    for i in 0..=join {
        out[i] *= scales[i] / ref_scale;
    }

    // Inward Numerov from the wall.
    let c = h * h / 12.0;
    let f = |i: usize| shooter.kv[i] - kappa * e;
    let mut inward = vec![0.0; n + 1];
    inward[n - 1] = 1e-30;
    for i in (join..n).rev() {
        let next = (2.0 * inward[i] * (1.0 + 5.0 * c * f(i)) - inward[i + 1] * (1.0 - c * f(i + 1)))
            / (1.0 - c * f(i - 1));
        inward[i - 1] = next;
        if next.abs() > 1e200 {
            inward.iter_mut().for_each(|y| *y /= 1e200);
        }
    }
    if inward[join] == 0.0 || out[join] == 0.0 {
        return Err(Error::Numerical("radial solution vanished at the matching point".into()));
    }
    let ratio = out[join] / inward[join];
    let mut values: Vec<f64> = (0..=n).map(|i| if i <= join { out[i] } else { inward[i] * ratio }).collect();
    let norm: f64 = values.iter().map(|y| y * y).sum::<f64>() * h;
    let scale = norm.sqrt().recip() * values[1].signum();
    values.iter_mut().for_each(|y| *y *= scale);
    let mean_separation = values.iter().enumerate().map(|(i, y)| i as f64 * h * y * y).sum::<f64>() * h;
    Ok(RadialState { energy: e, step: h, values, mean_separation })
}

/// Lowest s-wave level and its wavefunction. `None` only if no level is
/// found above `v(0)` (never for a finite positive `kappa` and a large
/// enough wall).
pub fn ground_state(kappa: f64, opts: &ShootingOptions) -> Result<Option<(Level, RadialState)>> {
    check_kappa(kappa)?;
    let mut hi = -(kappa / 64.0).min(0.05);
    for _ in 0..30 {
        let spec = radial_shoot(kappa, (-0.6, hi), opts)?;
        if let Some(level) = spec.levels.first().copied() {
            if level.nodes == 0 {
                let state = radial_wavefunction(kappa, level.energy, opts)?;
                return Ok(Some((level, state)));
            }
        }
        hi *= 0.5;
    }
    Ok(None)
}

/// Number of self-localized levels (`<u> < 2`) at coupling `kappa`.
pub fn self_localized_count(kappa: f64, opts: &ShootingOptions) -> Result<usize> {
    let spec = radial_shoot(kappa, (-0.6, -0.25 * (kappa / 64.0).min(0.05)), opts)?;
    let mut count = 0;
    for level in &spec.levels {
        if radial_wavefunction(kappa, level.energy, opts)?.mean_separation < CONTACT {
            count += 1;
        } else {
            break;
        }
    }
    Ok(count)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub kappa_star: f64,
    /// Ground-state energy at `kappa_star`.
    pub energy: f64,
    pub mean_separation: f64,
}

/// Smallest `kappa` whose ground state is self-localized, by bisection in
/// `ln kappa` to relative width `1e-6`.
pub fn threshold_kappa(opts: &ShootingOptions) -> Result<Threshold> {
    let separation = |kappa: f64| -> Result<f64> {
        ground_state(kappa, opts)?
            .map(|(_, s)| s.mean_separation)
            .ok_or_else(|| Error::Numerical(format!("no ground state found at kappa = {kappa}")))
    };
    let (mut lo, mut hi) = (0.05f64, 50.0f64);
    if separation(lo)? < CONTACT || separation(hi)? >= CONTACT {
        return Err(Error::Numerical("threshold not bracketed by [0.05, 50]".into()));
    }
    while hi / lo - 1.0 > 1e-6 {
        let mid = (lo * hi).sqrt();
        if separation(mid)? < CONTACT {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let kappa_star = (lo * hi).sqrt();
    let (level, state) = ground_state(kappa_star, opts)?
        .ok_or_else(|| Error::Numerical("ground state lost at threshold".into()))?;
    Ok(Threshold { kappa_star, energy: level.energy, mean_separation: state.mean_separation })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_near_harmonic_estimate() {
        // v ~ -3/5 + u^2/4 near the origin: omega = sqrt(1/kappa), e0 ~ -0.6 + 1.5 omega.
        let spec = radial_shoot(100.0, (-0.6, -0.3), &ShootingOptions::default()).unwrap();
        let e0 = spec.levels[0].energy;
        assert!((e0 + 0.45).abs() < 0.07, "e0 = {e0}");
        assert_eq!(spec.levels[0].nodes, 0);
    }

    #[test]
    fn levels_are_sorted_and_inside_well() {
        let spec = radial_shoot(25.0, (-0.6, -0.01), &ShootingOptions::default()).unwrap();
        assert!(spec.levels.len() > 3);
        for (k, w) in spec.levels.iter().enumerate() {
            assert_eq!(w.nodes, k);
            assert!(w.energy > -0.6 && w.energy < 0.0);
        }
        for w in spec.levels.windows(2) {
            assert!(w[0].energy < w[1].energy);
        }
    }

    #[test]
    fn weak_coupling_is_hydrogenic_and_not_self_localized() {
        let opts = ShootingOptions::default();
        let (level, state) = ground_state(0.1, &opts).unwrap().unwrap();
        assert!((level.energy / hydrogenic_energy(0.1, 1) - 1.0).abs() < 0.01, "{}", level.energy);
        assert!(state.mean_separation > 10.0 * CONTACT);
        assert_eq!(self_localized_count(0.1, &opts).unwrap(), 0);
    }

    #[test]
    fn wavefunction_is_normalized_with_correct_nodes() {
        let opts = ShootingOptions::default();
        let spec = radial_shoot(25.0, (-0.6, -0.1), &opts).unwrap();
        for level in &spec.levels {
            let s = radial_wavefunction(25.0, level.energy, &opts).unwrap();
            let norm: f64 = s.values.iter().map(|y| y * y).sum::<f64>() * s.step;
            assert!((norm - 1.0).abs() < 1e-12);
            let nodes = s
                .values
                .windows(2)
                .skip(1)
                .filter(|w| w[0] * w[1] < 0.0 && w[0].abs().max(w[1].abs()) > 1e-8)
                .count();
            assert_eq!(nodes, level.nodes);
        }
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(radial_shoot(1.0, (-0.1, 0.1), &ShootingOptions::default()).is_err());
        assert!(radial_shoot(0.0, (-0.5, -0.1), &ShootingOptions::default()).is_err());
        assert!(matches!(radial_shoot(6e16, (-0.6, -0.5), &ShootingOptions::default()), Err(Error::Domain(_))));
        let empty = radial_shoot(1.0, (-0.6, -0.55), &ShootingOptions::default()).unwrap();
        assert!(empty.levels.is_empty());
    }
}
