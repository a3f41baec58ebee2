//! Training loop behaviour: determinism, descent, checkpointing.

mod common;

use qfno_core::error::Error;
use qfno_core::pde::{grf_sample, unit_grid, Dataset, DatasetMeta, GrfSpec};
use qfno_core::qfl::QflVariant;
use qfno_core::qfno::{load_model, save_model, train, EpochStat, QfnoConfig, QfnoModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn synthetic(n_samples: usize, resolution: usize, seed: u64) -> Dataset {
    let grf = GrfSpec::default();
    let mut inputs = Vec::with_capacity(n_samples);
    let mut targets = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let u = grf_sample(resolution, &grf, &mut rng).unwrap();
        // target: a fixed smooth map of the input keeps the task learnable
        let t: Vec<f64> = (0..resolution)
            .map(|j| 0.5 * u[j] + 0.25 * u[(j + 1) % resolution] + 1.0)
            .collect();
        inputs.push(u);
        targets.push(t);
    }
    Dataset {
        meta: DatasetMeta { n_samples, resolution, nu: 0.0, t_final: 0.0, seed, grf },
        grid: unit_grid(resolution),
        inputs,
        targets,
    }
}

fn small_config(seed: u64) -> QfnoConfig {
    let mut config = QfnoConfig::new(QflVariant::Sequential, 3, 8, 2, 1);
    config.epochs = 6;
    config.batch_size = 4;
    config.seed = seed;
    config
}

#[test]
fn zero_learning_rate_freezes_the_model() {
    let train_set = synthetic(8, 8, 31);
    let test_set = synthetic(2, 8, 131);
    let mut config = small_config(1);
    config.learning_rate = 0.0;
    let mut model = QfnoModel::new(config).unwrap();
    let before = model.flat_params();
    let report = train(&mut model, &train_set, &test_set, |_| {}).unwrap();
    assert_eq!(model.flat_params(), before);
    let first = report.epochs[0].train_loss;
    for stat in &report.epochs {
        assert!((stat.train_loss - first).abs() < 1e-12);
        assert!((stat.test_rel_err - report.epochs[0].test_rel_err).abs() < 1e-12);
    }
}

#[test]
fn training_reduces_the_loss() {
    let train_set = synthetic(16, 8, 32);
    let test_set = synthetic(4, 8, 132);
    for variant in [QflVariant::Classical, QflVariant::Sequential, QflVariant::Composite] {
        let mut config = small_config(2);
        config.variant = variant;
        config.epochs = 12;
        config.learning_rate = 5e-3;
        let mut model = QfnoModel::new(config).unwrap();
        let report = train(&mut model, &train_set, &test_set, |_| {}).unwrap();
        let first = report.epochs.first().unwrap().train_loss;
        let last = report.final_train_loss;
        assert!(
            last < 0.8 * first,
            "{variant:?}: train loss {first:.4} -> {last:.4}"
        );
    }
}

#[test]
fn equal_seeds_train_bitwise_identically_and_different_seeds_do_not() {
    let train_set = synthetic(8, 8, 33);
    let test_set = synthetic(2, 8, 133);

    let run = |seed: u64| -> (Vec<f64>, Vec<f64>) {
        let mut model = QfnoModel::new(small_config(seed)).unwrap();
        let mut losses = Vec::new();
        train(&mut model, &train_set, &test_set, |s: &EpochStat| {
            losses.push(s.train_loss);
        })
        .unwrap();
        (model.flat_params(), losses)
    };
    let (pa, la) = run(7);
    let (pb, lb) = run(7);
    assert_eq!(pa, pb);
    assert_eq!(la, lb);

    let (pc, _) = run(8);
    assert_ne!(pa, pc);
}

#[test]
fn epoch_stats_stream_in_order_and_match_the_report() {
    let train_set = synthetic(8, 8, 34);
    let test_set = synthetic(2, 8, 134);
    let mut model = QfnoModel::new(small_config(3)).unwrap();
    let mut seen = Vec::new();
    let report = train(&mut model, &train_set, &test_set, |s: &EpochStat| {
        seen.push((s.epoch, s.train_loss, s.test_rel_err));
    })
    .unwrap();
    assert_eq!(seen.len(), report.epochs.len());
    for (i, stat) in report.epochs.iter().enumerate() {
        assert_eq!(stat.epoch, i);
        assert_eq!(seen[i], (stat.epoch, stat.train_loss, stat.test_rel_err));
    }
    assert_eq!(report.final_train_loss, report.epochs.last().unwrap().train_loss);
}

#[test]
fn checkpoint_roundtrip_preserves_a_trained_model_exactly() {
    let train_set = synthetic(8, 8, 35);
    let test_set = synthetic(2, 8, 135);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    for variant in [
        QflVariant::Classical,
        QflVariant::Sequential,
        QflVariant::Parallel,
        QflVariant::Composite,
    ] {
        let mut config = small_config(4);
        config.variant = variant;
        config.epochs = 2;
        let mut model = QfnoModel::new(config).unwrap();
        train(&mut model, &train_set, &test_set, |_| {}).unwrap();
        save_model(&model, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(loaded.flat_params(), model.flat_params(), "{variant:?}");
        let want = model.predict(&train_set.inputs[0], &train_set.grid).unwrap();
        let got = loaded.predict(&train_set.inputs[0], &train_set.grid).unwrap();
        assert_eq!(want, got);
    }
}

#[test]
fn future_schema_versions_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    let model = QfnoModel::new(small_config(5)).unwrap();
    save_model(&model, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let bumped = text.replacen("\"schema_version\": 1", "\"schema_version\": 2", 1);
    assert_ne!(text, bumped);
    std::fs::write(&path, bumped).unwrap();
    match load_model(&path) {
        Err(Error::SchemaVersionMismatch { found: 2, supported: 1 }) => {}
        other => panic!("expected version mismatch, got {other:?}"),
    }
}

#[test]
fn tampered_documents_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");

    std::fs::write(&path, "not json at all").unwrap();
    assert!(matches!(load_model(&path), Err(Error::MalformedDocument(_))));

    let model = QfnoModel::new(small_config(6)).unwrap();
    save_model(&model, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();

    let with_unknown = text.replacen("\"schema_version\"", "\"surprise\": 3, \"schema_version\"", 1);
    std::fs::write(&path, with_unknown).unwrap();
    assert!(matches!(load_model(&path), Err(Error::MalformedDocument(_))));

    // readout length no longer matches the declared channel count
    let short_q = text.replacen("\"q\": [", "\"q\": [0.25, ", 1);
    assert_ne!(text, short_q);
    std::fs::write(&path, short_q).unwrap();
    assert!(matches!(load_model(&path), Err(Error::MalformedDocument(_))));
}

#[test]
fn resolution_mismatch_is_rejected_up_front() {
    let train_set = synthetic(4, 16, 36);
    let test_set = synthetic(2, 16, 136);
    let mut model = QfnoModel::new(small_config(7)).unwrap();
    assert!(matches!(
        train(&mut model, &train_set, &test_set, |_| {}),
        Err(Error::ShapeMismatch(_))
    ));
}
