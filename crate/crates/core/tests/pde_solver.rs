//! Viscous Burgers solver: analytic limits, refinement, conserved quantities.

mod common;

use qfno_core::error::Error;
use qfno_core::pde::{
    burgers_solve, grf_sample, solve_on_fine_grid, spectral_upsample, unit_grid, GrfSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn sine(n: usize, amp: f64) -> Vec<f64> {
    (0..n).map(|j| amp * (2.0 * PI * j as f64 / n as f64).sin()).collect()
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn zero_initial_condition_stays_zero() {
    let u = burgers_solve(&vec![0.0; 64], 0.1, 1.0, 1e-2).unwrap();
    assert!(u.iter().all(|v| v.abs() < 1e-14));
}

#[test]
fn small_amplitude_solution_follows_pure_heat_decay() {
    // At amplitude ε the advection term only contributes O(ε²), so the
    // solution tracks ε·sin(2πx)·exp(−4π²νt) to relative O(ε).
    let (n, eps, nu, t) = (128, 1e-4, 0.05, 0.5);
    let u = burgers_solve(&sine(n, eps), nu, t, 1e-3).unwrap();
    let decay = (-4.0 * PI * PI * nu * t).exp();
    let want = sine(n, eps * decay);
    assert!(linf(&u, &want) < 1e-3 * eps, "residual {:.3e}", linf(&u, &want));
}

#[test]
fn time_step_refinement_converges_at_high_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let u0 = grf_sample(256, &GrfSpec::default(), &mut rng).unwrap();
    let coarse = burgers_solve(&u0, 0.1, 0.5, 2e-3).unwrap();
    let mid = burgers_solve(&u0, 0.1, 0.5, 1e-3).unwrap();
    let fine = burgers_solve(&u0, 0.1, 0.5, 5e-4).unwrap();
    let d1 = linf(&coarse, &mid);
    let d2 = linf(&mid, &fine);
    assert!(d1 < 1e-6, "dt refinement moved the answer by {d1:.3e}");
    assert!(d2 < d1 || d1 < 1e-13);
}

#[test]
fn spatial_refinement_leaves_the_decimated_solution_fixed() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let u0 = grf_sample(256, &GrfSpec::default(), &mut rng).unwrap();
    let mut decimated = Vec::new();
    for fine_n in [4096usize, 8192] {
        let big = spectral_upsample(&u0, fine_n).unwrap();
        let sol = burgers_solve(&big, 0.1, 1.0, 1e-3).unwrap();
        let stride = fine_n / 256;
        decimated.push((0..256).map(|j| sol[j * stride]).collect::<Vec<f64>>());
    }
    let d = linf(&decimated[0], &decimated[1]);
    assert!(d < 1e-4, "grid refinement moved the answer by {d:.3e}");
}

#[test]
fn fine_grid_helper_is_the_upsample_solve_decimate_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let u0 = grf_sample(64, &GrfSpec::default(), &mut rng).unwrap();
    let got = solve_on_fine_grid(&u0, 0.1, 0.5, 1e-3).unwrap();
    let fine = 4096usize; // max(4096, 16·64)
    let big = spectral_upsample(&u0, fine).unwrap();
    let sol = burgers_solve(&big, 0.1, 0.5, 1e-3).unwrap();
    let want: Vec<f64> = (0..64).map(|j| sol[j * (fine / 64)]).collect();
    assert_eq!(got, want);
}

#[test]
fn spatial_mean_is_conserved() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let u0 = grf_sample(128, &GrfSpec::default(), &mut rng).unwrap();
    let mean0: f64 = u0.iter().sum::<f64>() / 128.0;
    let u = burgers_solve(&u0, 0.1, 1.0, 1e-3).unwrap();
    let mean1: f64 = u.iter().sum::<f64>() / 128.0;
    assert!((mean0 - mean1).abs() < 1e-10);
}

#[test]
fn viscosity_dissipates_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let u0 = grf_sample(128, &GrfSpec::default(), &mut rng).unwrap();
    let energy = |u: &[f64]| u.iter().map(|v| v * v).sum::<f64>() / 128.0;
    let mut prev = energy(&u0);
    for k in 1..=4 {
        let u = burgers_solve(&u0, 0.1, 0.25 * k as f64, 1e-3).unwrap();
        let e = energy(&u);
        assert!(e < prev, "energy rose at t={}: {prev} -> {e}", 0.25 * k as f64);
        prev = e;
    }
}

#[test]
fn instant_solve_returns_the_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    let u0 = grf_sample(64, &GrfSpec::default(), &mut rng).unwrap();
    assert_eq!(burgers_solve(&u0, 0.1, 0.0, 1e-3).unwrap(), u0);
}

#[test]
fn runaway_steps_surface_as_an_error() {
    let u0 = sine(256, 5.0);
    match burgers_solve(&u0, 1e-4, 5.0, 5e-2) {
        Err(Error::UnstableStep { initial, reached }) => {
            assert!(initial.is_finite());
            assert!(!reached.is_finite() || reached > 1e6 * initial);
        }
        other => panic!("expected an unstable-step error, got {other:?}"),
    }
}

#[test]
fn resolution_contracts_are_enforced() {
    assert!(matches!(
        burgers_solve(&[1.0, 2.0, 3.0], 0.1, 1.0, 1e-3),
        Err(Error::BadResolution(_))
    ));
    assert!(matches!(
        solve_on_fine_grid(&vec![0.0; 48], 0.1, 1.0, 1e-3),
        Err(Error::BadResolution(_))
    ));
    assert!(matches!(spectral_upsample(&[1.0; 8], 6), Err(Error::BadResolution(_))));
}

#[test]
fn upsampling_preserves_grid_point_values_of_bandlimited_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let u = grf_sample(64, &GrfSpec::default(), &mut rng).unwrap();
    let big = spectral_upsample(&u, 256).unwrap();
    let back: Vec<f64> = (0..64).map(|j| big[j * 4]).collect();
    assert!(linf(&u, &back) < 1e-10);
}

#[test]
fn random_fields_have_zero_mean_and_scale_linearly() {
    let n = 128;
    let mut spec = GrfSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(48);
    let a = grf_sample(n, &spec, &mut rng).unwrap();
    assert!((a.iter().sum::<f64>() / n as f64).abs() < 1e-12);

    spec.amplitude *= 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(48);
    let b = grf_sample(n, &spec, &mut rng).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((2.0 * x - y).abs() < 1e-12);
    }

    let x = unit_grid(n);
    assert_eq!(x[0], 0.0);
    assert!((x[n - 1] - (n as f64 - 1.0) / n as f64).abs() < 1e-15);
}
