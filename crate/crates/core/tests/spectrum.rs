use gravloc::dynamics::{imaginary_time_ground_state, Grid, Mode, RelaxOptions};
use gravloc::potential::MetaBall;
use gravloc::spectrum::{
    count_levels_below, effective_principal, ground_state, hydrogenic_energy, radial_shoot, radial_wavefunction,
    self_localized_count, threshold_kappa, ShootingOptions,
};

#[test]
fn tail_levels_approach_hydrogenic_values() {
    let kappa = 100.0;
    // First n with orbit radius 4 n^2 / kappa > 10.
    let n = (1..).find(|&n: &usize| 4.0 * (n * n) as f64 / kappa > 10.0).unwrap();
    assert_eq!(n, 16);
    let target = hydrogenic_energy(kappa, n);
    let spec = radial_shoot(kappa, (-0.6, 0.6 * hydrogenic_energy(kappa, n + 1)), &ShootingOptions::default()).unwrap();
    let level = spec.levels.iter().find(|l| l.principal == n).expect("level with principal number n");
    let dev = (level.energy / target - 1.0).abs();
    assert!(dev < 0.05, "e = {}, hydrogenic {target}, deviation {dev}", level.energy);
    // The quantum defect is settled well before the tail: consecutive
    // effective principal numbers differ by one.
    let top: Vec<f64> = spec.levels.iter().rev().take(3).map(|l| effective_principal(kappa, l.energy)).collect();
    assert!((top[0] - top[1] - 1.0).abs() < 0.02);
    assert!((top[1] - top[2] - 1.0).abs() < 0.02);
}

#[test]
fn level_count_is_non_decreasing_in_coupling() {
    let opts = ShootingOptions::default();
    for e in [-0.3, -0.05, -0.01] {
        let mut last = 0;
        for kappa in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0] {
            let c = count_levels_below(kappa, e, &opts).unwrap();
            assert!(c >= last, "count fell from {last} to {c} at kappa {kappa}, e {e}");
            last = c;
        }
    }
}

#[test]
fn threshold_is_reproducible_and_sharp() {
    let coarse = threshold_kappa(&ShootingOptions::default()).unwrap();
    let fine_opts = ShootingOptions { step: Some(0.002), u_max: Some(150.0), ..Default::default() };
    let fine = threshold_kappa(&fine_opts).unwrap();
    let rel = (coarse.kappa_star / fine.kappa_star - 1.0).abs();
    assert!(rel < 5e-4, "{} vs {}", coarse.kappa_star, fine.kappa_star);
    assert!(coarse.energy < 0.0 && coarse.energy > -0.6);

    let opts = ShootingOptions::default();
    assert_eq!(self_localized_count(1.01 * coarse.kappa_star, &opts).unwrap(), 1);
    assert_eq!(self_localized_count(0.99 * coarse.kappa_star, &opts).unwrap(), 0);
}

#[test]
fn imaginary_time_agrees_with_shooting() {
    let opts = ShootingOptions::default();
    for kappa in [25.0, 100.0] {
        let (level, state) = ground_state(kappa, &opts).unwrap().unwrap();
        let g = Grid::new(40.0f64, 1024).unwrap();
        let gs = imaginary_time_ground_state(&MetaBall, kappa, g, Mode::Radial, &RelaxOptions::default()).unwrap();
        let de = (gs.energy() - level.energy).abs();
        assert!(de < 1e-6, "kappa {kappa}: {} vs {}", gs.energy(), level.energy);
        assert!(gs.is_self_localized());
        assert!(state.mean_separation < 2.0);
    }
}

#[test]
fn level_wavefunction_reproduces_energy_under_refinement() {
    let a = radial_shoot(25.0, (-0.6, -0.2), &ShootingOptions::default()).unwrap();
    let b = radial_shoot(25.0, (-0.6, -0.2), &ShootingOptions { step: Some(0.001), ..Default::default() }).unwrap();
    assert_eq!(a.levels.len(), b.levels.len());
    for (x, y) in a.levels.iter().zip(&b.levels) {
        assert!((x.energy - y.energy).abs() < 1e-8, "{} vs {}", x.energy, y.energy);
    }
    let s = radial_wavefunction(25.0, a.levels[0].energy, &ShootingOptions::default()).unwrap();
    assert!(s.values.iter().all(|y| *y >= -1e-12));
}

#[test]
fn single_precision_shooting_tracks_double() {
    use gravloc::spectrum::radial_shoot_with;
    let a = radial_shoot_with::<f64>(25.0, (-0.6, -0.2), &ShootingOptions::default()).unwrap();
    let b = radial_shoot_with::<f32>(25.0, (-0.6, -0.2), &ShootingOptions { tolerance: 1e-6, ..Default::default() }).unwrap();
    assert_eq!(a.levels.len(), b.levels.len());
    assert!((a.levels[0].energy - b.levels[0].energy).abs() < 1e-3);
}
