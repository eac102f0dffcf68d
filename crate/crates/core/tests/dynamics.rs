use gravloc::dynamics::{
    gaussian_1d, init_gaussian_meta, ComplexField, FactoredEvolution, Grid, Hamiltonian, PropagatorConfig, SplitStep,
};
use gravloc::potential::{Free, Harmonic, MetaBall};
use gravloc::reduction::partial_trace;
use num_complex::Complex;

#[test]
fn free_gaussian_spreads_analytically() {
    // H = -(1/kappa) d2/dx2; psi0 = exp(-x^2 / (2 w^2)) has a(t) = w^2/2 + i t / kappa
    // and |psi|^2 variance |a|^2 / a0.
    let kappa = 2.0;
    let w = 2.0;
    let g = Grid::new(96.0f64, 256).unwrap();
    let ham = Hamiltonian::relative(g, &Free, kappa).unwrap();
    let a0 = 0.5 * w * w;
    let t_double = 3f64.sqrt() * a0 * kappa;
    let steps = 400;
    let p = SplitStep::new(ham, &PropagatorConfig::with_dt(t_double / steps as f64)).unwrap();
    let mut psi = gaussian_1d(g, 0.0, w, 0.0);
    let sigma0 = ComplexField::density_width(&g, &density(&psi));
    assert!((sigma0 - w / 2f64.sqrt()).abs() < 1e-10);
    p.run(&mut psi, steps).unwrap();
    let sigma = ComplexField::density_width(&g, &density(&psi));
    let expected = sigma0 * (1.0 + (t_double / (kappa * a0)).powi(2)).sqrt();
    assert!((sigma / expected - 1.0).abs() < 1e-4, "{sigma} vs {expected}");
    assert!((sigma / sigma0 - 2.0).abs() < 1e-4);
}

fn density(psi: &ComplexField<f64>) -> Vec<f64> {
    psi.data().iter().map(|a| a.norm_sqr()).collect()
}

#[test]
fn coherent_state_returns_after_one_period() {
    // mass kappa/2 = 1, stiffness 1: omega = 1, ground width 1.
    let kappa = 2.0;
    let g = Grid::new(40.0f64, 256).unwrap();
    let ham = Hamiltonian::relative(g, &Harmonic { stiffness: 1.0 }, kappa).unwrap();
    let steps = 2000;
    let p = SplitStep::new(ham, &PropagatorConfig::with_dt(2.0 * std::f64::consts::PI / steps as f64)).unwrap();
    let start = gaussian_1d(g, 4.0, 1.0, 0.0);
    let mut psi = start.clone();
    p.run(&mut psi, steps / 2).unwrap();
    let half: f64 = g.coordinates().iter().zip(psi.data()).map(|(x, a)| x * a.norm_sqr()).sum::<f64>() * g.spacing();
    assert!((half + 4.0).abs() < 1e-3, "half-period centre {half}");
    p.run(&mut psi, steps / 2).unwrap();
    let f = psi.fidelity(&start).unwrap();
    assert!(f > 0.999, "fidelity {f}");
}

#[test]
fn relative_motion_conserves_norm_and_energy() {
    let g = Grid::new(128.0f64, 512).unwrap().relative();
    let ham = Hamiltonian::relative(g, &MetaBall, 25.0).unwrap();
    let p = SplitStep::new(ham.clone(), &PropagatorConfig::with_dt(0.01)).unwrap();
    let mut psi = ComplexField::from_fn_1d(g, |r| Complex::new((-r * r / 200.0).exp(), 0.0));
    psi.normalize().unwrap();
    let e0 = ham.energy(&psi).unwrap();
    let mut worst_e = 0.0f64;
    let mut worst_n = 0.0f64;
    for _ in 0..100 {
        p.run(&mut psi, 100).unwrap();
        worst_e = worst_e.max((ham.energy(&psi).unwrap() / e0 - 1.0).abs());
        worst_n = worst_n.max((psi.norm_sq() - 1.0).abs());
    }
    assert!(e0 < 0.0);
    assert!(worst_n < 1e-10, "norm drift {worst_n}");
    assert!(worst_e < 1e-6, "energy drift {worst_e}");
}

#[test]
fn two_dimensional_step_is_reversible_and_swap_symmetric() {
    let g = Grid::new(64.0f64, 128).unwrap();
    let ham = Hamiltonian::meta(g, &MetaBall, 25.0).unwrap();
    let p = SplitStep::new(ham.clone(), &PropagatorConfig::with_dt(0.05)).unwrap();
    let start = init_gaussian_meta(5.0, &g).unwrap();
    assert_eq!(start.swap_residual(), 0.0);
    let mut xi = start.clone();
    for _ in 0..10 {
        p.run(&mut xi, 20).unwrap();
        assert!(xi.swap_residual() < 1e-10);
    }
    assert!((xi.norm_sq() - 1.0).abs() < 1e-10);
    p.reversed().unwrap().run(&mut xi, 200).unwrap();
    let back = xi.max_abs_diff(&start).unwrap();
    assert!(back < 1e-10, "reversal error {back}");
}

#[test]
fn factored_path_matches_two_dimensional_path() {
    let (kappa, lambda0) = (25.0, 10.0);
    let g = Grid::new(128.0f64, 256).unwrap();
    let cfg = PropagatorConfig::with_dt(0.05);
    let mut full = init_gaussian_meta(lambda0, &g).unwrap();
    let p = SplitStep::new(Hamiltonian::meta(g, &MetaBall, kappa).unwrap(), &cfg).unwrap();
    let mut fac = FactoredEvolution::gaussian_meta(lambda0, &g, &MetaBall, &cfg, kappa).unwrap();
    p.run(&mut full, 100).unwrap();
    fac.advance(100).unwrap();
    assert!((fac.time() - 5.0).abs() < 1e-12);
    let (xi, retained) = fac.reconstruct(&g).unwrap();
    assert!(retained > 0.999);
    let f = xi.fidelity(&full).unwrap();
    assert!(f > 0.999, "fidelity {f}");

    let a = partial_trace(&xi).unwrap();
    let b = partial_trace(&full).unwrap();
    let n = g.points();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a.kernel(i, j) - b.kernel(i, j)).norm());
        }
    }
    assert!(worst < 1e-3, "two-path density mismatch {worst}");
    assert!(fac.centre().width_ratio(fac.time()) - 1.0 < 1e-3);
}

#[test]
fn single_precision_two_dimensional_run() {
    let g = Grid::new(64.0f32, 64).unwrap();
    let ham = Hamiltonian::meta(g, &MetaBall, 25.0f32).unwrap();
    let p = SplitStep::new(ham, &PropagatorConfig::with_dt(0.05)).unwrap();
    let mut xi = init_gaussian_meta(5.0, &g).unwrap();
    p.run(&mut xi, 100).unwrap();
    assert!((xi.norm_sq() - 1.0).abs() < 1e-4);
    assert!(xi.swap_residual() < 1e-5);
}

#[test]
fn virial_average_in_radial_mode() {
    // Odd start r exp(-r^2 / (2 lambda0^2)): an s-wave packet of the 3D relative
    // motion. The time-averaged kinetic energy approaches -<H> over ten Kepler
    // periods of the mean energy.
    let (kappa, lambda0) = (4.0, 30.0);
    let g = Grid::new(4096.0f64, 4096).unwrap();
    let ham = Hamiltonian::relative(g, &MetaBall, kappa).unwrap();
    let dt = 0.1;
    let p = SplitStep::new(ham.clone(), &PropagatorConfig::with_dt(dt)).unwrap();
    let mut psi = ComplexField::from_fn_1d(g, |r| Complex::new(r * (-r * r / (2.0 * lambda0 * lambda0)).exp(), 0.0));
    psi.normalize().unwrap();
    let e0 = ham.energy(&psi).unwrap();
    assert!(e0 < 0.0);
    let a = 0.25 / e0.abs();
    let period = 2.0 * std::f64::consts::PI * (kappa / 2.0 * a.powi(3) / 0.5).sqrt();
    let steps = (10.0 * period / dt) as usize;
    let mut acc = 0.0;
    for _ in 0..steps {
        p.step(&mut psi).unwrap();
        acc += ham.kinetic_energy(&psi).unwrap();
    }
    let ratio = acc / steps as f64 / -e0;
    assert!((ratio - 1.0).abs() < 0.2, "virial ratio {ratio}");
}
