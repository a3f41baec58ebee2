//! Analytic gradients against central finite differences, every parameter.

mod common;

use qfno_core::pde::{grf_sample, unit_grid, Dataset, DatasetMeta, GrfSpec};
use qfno_core::qfl::{QflVariant, UntouchedModePolicy};
use qfno_core::qfno::{
    batch_loss, grad_batch, Nonlinearity, ParallelAggregation, QfnoConfig, QfnoModel,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn synthetic(n_samples: usize, resolution: usize, seed: u64) -> Dataset {
    let grf = GrfSpec::default();
    let mut inputs = Vec::with_capacity(n_samples);
    let mut targets = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        inputs.push(grf_sample(resolution, &grf, &mut rng).unwrap());
        targets.push(grf_sample(resolution, &grf, &mut rng).unwrap());
    }
    Dataset {
        meta: DatasetMeta { n_samples, resolution, nu: 0.0, t_final: 0.0, seed, grf },
        grid: unit_grid(resolution),
        inputs,
        targets,
    }
}

/// |g − fd| ≤ atol + rtol·max(|g|,|fd|) for every parameter.
fn assert_fd_agreement(config: QfnoConfig, ds: &Dataset, label: &str) {
    let model = QfnoModel::new(config).unwrap();
    let idx: Vec<usize> = (0..ds.inputs.len()).collect();
    let (_, grad) = grad_batch(&model, ds, &idx).unwrap();
    let params = model.flat_params();
    assert_eq!(grad.len(), params.len());
    let h = 1e-5;
    let (atol, rtol) = (1e-8, 1e-5);
    for i in 0..params.len() {
        let mut probe = model.clone();
        let mut shifted = params.clone();
        shifted[i] = params[i] + h;
        probe.set_flat_params(&shifted).unwrap();
        let up = batch_loss(&probe, ds, &idx).unwrap();
        shifted[i] = params[i] - h;
        probe.set_flat_params(&shifted).unwrap();
        let down = batch_loss(&probe, ds, &idx).unwrap();
        let fd = (up - down) / (2.0 * h);
        let bound = atol + rtol * grad[i].abs().max(fd.abs());
        assert!(
            (grad[i] - fd).abs() <= bound,
            "{label} param {i}: analytic {:.9e} vs fd {:.9e}",
            grad[i],
            fd
        );
    }
}

#[test]
fn every_variant_gradient_matches_central_differences() {
    let ds = synthetic(3, 8, 21);
    for (label, variant) in [
        ("classical", QflVariant::Classical),
        ("sequential", QflVariant::Sequential),
        ("parallel", QflVariant::Parallel),
        ("composite", QflVariant::Composite),
    ] {
        let mut config = QfnoConfig::new(variant, 3, 8, 2, 2);
        config.seed = 5;
        assert_fd_agreement(config, &ds, label);
    }
}

#[test]
fn mean_aggregation_and_crop_gradients_match() {
    let ds = synthetic(3, 8, 22);
    let mut mean_cfg = QfnoConfig::new(QflVariant::Parallel, 3, 8, 3, 1);
    mean_cfg.aggregation = ParallelAggregation::Mean;
    mean_cfg.seed = 6;
    assert_fd_agreement(mean_cfg, &ds, "parallel-mean");

    let mut crop_cfg = QfnoConfig::new(QflVariant::Sequential, 3, 8, 2, 1);
    crop_cfg.untouched = UntouchedModePolicy::Crop;
    crop_cfg.seed = 7;
    assert_fd_agreement(crop_cfg, &ds, "sequential-crop");
}

#[test]
fn composite_gradients_match_with_renormalization() {
    let ds = synthetic(3, 8, 23);
    let mut config = QfnoConfig::new(QflVariant::Composite, 3, 8, 2, 1);
    config.composite_renormalize = true;
    config.seed = 8;
    assert_fd_agreement(config, &ds, "composite-renorm");

    let mut crop = QfnoConfig::new(QflVariant::Composite, 3, 8, 2, 1);
    crop.untouched = UntouchedModePolicy::Crop;
    crop.seed = 9;
    assert_fd_agreement(crop, &ds, "composite-crop");
}

#[test]
fn other_nonlinearities_also_match() {
    let ds = synthetic(2, 8, 24);
    for (label, act) in [("relu", Nonlinearity::Relu), ("identity", Nonlinearity::None)] {
        let mut config = QfnoConfig::new(QflVariant::Sequential, 3, 8, 2, 1);
        config.nonlinearity = act;
        config.seed = 10;
        assert_fd_agreement(config, &ds, label);
    }
}

#[test]
fn zero_layer_gradient_has_a_closed_form() {
    // With no layers the r0 normalisation cancels against the readout scale,
    // so pred_j = α·u0_j + β·x_j with α = Σ q_i p[0,i], β = Σ q_i p[1,i].
    let ds = synthetic(4, 8, 25);
    let mut config = QfnoConfig::new(QflVariant::Sequential, 3, 8, 2, 0);
    config.seed = 12;
    let model = QfnoModel::new(config).unwrap();
    let idx: Vec<usize> = (0..4).collect();
    let (loss, grad) = grad_batch(&model, &ds, &idx).unwrap();

    let n_c = 3;
    let alpha: f64 = (0..n_c).map(|i| model.q[i] * model.p[(0, i)]).sum();
    let beta: f64 = (0..n_c).map(|i| model.q[i] * model.p[(1, i)]).sum();
    let mut want_loss = 0.0;
    let (mut g_alpha, mut g_beta) = (0.0, 0.0);
    let inv_b = 1.0 / idx.len() as f64;
    for s in &idx {
        let (u, y) = (&ds.inputs[*s], &ds.targets[*s]);
        let ynorm_sq: f64 = y.iter().map(|v| v * v).sum();
        let mut err_sq = 0.0;
        for j in 0..8 {
            let r = alpha * u[j] + beta * ds.grid[j] - y[j];
            err_sq += r * r;
            g_alpha += 2.0 * r * u[j] * inv_b / ynorm_sq;
            g_beta += 2.0 * r * ds.grid[j] * inv_b / ynorm_sq;
        }
        want_loss += err_sq / ynorm_sq * inv_b;
    }
    assert!((loss - want_loss).abs() < 1e-12);

    let mut want = Vec::new();
    for i in 0..n_c {
        want.push(g_alpha * model.q[i]); // ∂α/∂p[0,i] = q_i
    }
    for i in 0..n_c {
        want.push(g_beta * model.q[i]);
    }
    for i in 0..n_c {
        want.push(g_alpha * model.p[(0, i)] + g_beta * model.p[(1, i)]);
    }
    assert_eq!(grad.len(), want.len());
    for (g, w) in grad.iter().zip(&want) {
        assert!((g - w).abs() < 1e-10, "analytic {g:.12e} vs closed form {w:.12e}");
    }
}

#[test]
fn duplicated_samples_reproduce_the_single_sample_gradient() {
    let ds = synthetic(2, 8, 26);
    let mut config = QfnoConfig::new(QflVariant::Sequential, 3, 8, 2, 1);
    config.seed = 13;
    let model = QfnoModel::new(config).unwrap();
    let (l1, g1) = grad_batch(&model, &ds, &[1]).unwrap();
    let (l3, g3) = grad_batch(&model, &ds, &[1, 1, 1]).unwrap();
    assert!((l1 - l3).abs() < 1e-14);
    for (a, b) in g1.iter().zip(&g3) {
        assert!((a - b).abs() < 1e-13);
    }
}

#[test]
fn a_small_step_against_the_gradient_reduces_the_loss() {
    let ds = synthetic(3, 8, 27);
    for variant in [QflVariant::Sequential, QflVariant::Composite] {
        let mut config = QfnoConfig::new(variant, 3, 8, 2, 1);
        config.seed = 14;
        let mut model = QfnoModel::new(config).unwrap();
        let idx: Vec<usize> = (0..3).collect();
        let (before, grad) = grad_batch(&model, &ds, &idx).unwrap();
        let params = model.flat_params();
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        assert!(gnorm > 0.0);
        let step = 1e-5 / gnorm;
        let stepped: Vec<f64> =
            params.iter().zip(&grad).map(|(p, g)| p - step * g).collect();
        model.set_flat_params(&stepped).unwrap();
        let after = batch_loss(&model, &ds, &idx).unwrap();
        assert!(after < before, "{variant:?}: {before} -> {after}");
    }
}
