use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qfno(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfno")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn stderr_text(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Small dataset: coarse output grid and a short horizon keep the reference
/// solver fast while exercising the full generation path.
fn gen(dir: &Path, name: &str, count: usize, resolution: usize, seed: u64) -> PathBuf {
    let out = dir.join(name);
    let run = qfno(&[
        "gen-burgers",
        "--count",
        &count.to_string(),
        "--resolution",
        &resolution.to_string(),
        "--t-end",
        "0.05",
        "--dt",
        "0.005",
        "--seed",
        &seed.to_string(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "gen failed: {}", stderr_text(&run));
    out
}

#[test]
fn gen_writes_a_readable_dataset_and_reruns_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let a = gen(dir.path(), "a.qfd", 5, 32, 7);
    let b = gen(dir.path(), "b.qfd", 5, 32, 7);

    let ds = qfno_core::pde::read_dataset(&a).unwrap();
    assert_eq!(ds.meta.n_samples, 5);
    assert_eq!(ds.meta.resolution, 32);
    assert_eq!(ds.meta.seed, 7);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let run = qfno(&["gen-burgers", "--count", "1", "--resolution", "32", "--out", dir.path().join("c.qfd").to_str().unwrap()]);
    let doc = stdout_json(&run);
    assert_eq!(doc["n_samples"], 1);
    assert_eq!(doc["resolution"], 32);
    assert!(doc["bytes"].as_u64().unwrap() > 0);
}

#[test]
fn rejects_a_resolution_that_is_not_a_power_of_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad.qfd");
    let run = qfno(&["gen-burgers", "--count", "2", "--resolution", "100", "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    assert!(stderr_text(&run).contains("power of two"));
    assert!(!out.exists());
}

fn train_small(dir: &Path, out_name: &str, variant: &str, train: &Path, test: &Path) -> (PathBuf, serde_json::Value) {
    let out_dir = dir.join(out_name);
    let run = qfno(&[
        "train",
        "--variant",
        variant,
        "--nc",
        "4",
        "--k",
        "2",
        "--layers",
        "1",
        "--epochs",
        "3",
        "--lr",
        "0.005",
        "--batch",
        "2",
        "--seed",
        "1",
        "--train-data",
        train.to_str().unwrap(),
        "--test-data",
        test.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "train failed: {}", stderr_text(&run));
    (out_dir, stdout_json(&run))
}

#[test]
fn train_writes_artifacts_and_eval_reproduces_the_reported_error() {
    let dir = tempfile::tempdir().unwrap();
    let train = gen(dir.path(), "train.qfd", 6, 32, 1);
    let test = gen(dir.path(), "test.qfd", 3, 32, 2);
    let (out_dir, summary) = train_small(dir.path(), "run", "classical", &train, &test);

    for name in ["model.json", "metrics.csv", "run_config.json", "summary.json"] {
        assert!(out_dir.join(name).exists(), "missing {name}");
    }
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["epochs"], 3);

    let metrics = std::fs::read_to_string(out_dir.join("metrics.csv")).unwrap();
    let lines: Vec<&str> = metrics.lines().collect();
    assert_eq!(lines[0], "epoch,train_loss,test_rel_err,seconds");
    assert_eq!(lines.len(), 1 + 3);

    let eval = qfno(&[
        "eval",
        "--model",
        out_dir.join("model.json").to_str().unwrap(),
        "--data",
        test.to_str().unwrap(),
    ]);
    assert!(eval.status.success(), "eval failed: {}", stderr_text(&eval));
    let doc = stdout_json(&eval);
    assert_eq!(doc["n_samples"], 3);
    let reported = summary["final_test_rel_err"].as_f64().unwrap();
    let evaluated = doc["rel_err_mean"].as_f64().unwrap();
    assert_eq!(evaluated, reported);
}

#[test]
fn training_through_the_cli_is_seed_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let train = gen(dir.path(), "train.qfd", 6, 32, 3);
    let test = gen(dir.path(), "test.qfd", 3, 32, 4);
    let (dir_a, sum_a) = train_small(dir.path(), "a", "sequential", &train, &test);
    let (dir_b, sum_b) = train_small(dir.path(), "b", "sequential", &train, &test);

    assert_eq!(sum_a["final_train_loss"], sum_b["final_train_loss"]);
    assert_eq!(sum_a["final_test_rel_err"], sum_b["final_test_rel_err"]);

    // The seconds column is wall clock; the loss columns must match exactly.
    let cols = |p: &Path| -> Vec<String> {
        std::fs::read_to_string(p.join("metrics.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.rsplitn(2, ',').nth(1).unwrap().to_string())
            .collect()
    };
    assert_eq!(cols(&dir_a), cols(&dir_b));
}

#[test]
fn a_config_file_drives_training_and_unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let train = gen(dir.path(), "train.qfd", 4, 32, 5);
    let test = gen(dir.path(), "test.qfd", 2, 32, 6);
    let out_dir = dir.path().join("run");

    let config = serde_json::json!({
        "config": {
            "variant": "classical",
            "n_c": 4,
            "n_s": 32,
            "k_modes": 2,
            "t_layers": 1,
            "shape": "butterfly",
            "nonlinearity": "gelu",
            "aggregation": "linear",
            "untouched": "keep",
            "composite_renormalize": false,
            "learning_rate": 0.005,
            "batch_size": 2,
            "epochs": 2,
            "seed": 9,
        },
        "train_data": train,
        "test_data": test,
        "out_dir": out_dir,
    });
    let path = dir.path().join("run.json");
    std::fs::write(&path, serde_json::to_vec_pretty(&config).unwrap()).unwrap();

    let run = qfno(&["train", "--config", path.to_str().unwrap()]);
    assert!(run.status.success(), "train failed: {}", stderr_text(&run));
    assert_eq!(stdout_json(&run)["epochs"], 2);
    assert!(out_dir.join("model.json").exists());

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, br#"{"bogus": 1}"#).unwrap();
    let run = qfno(&["train", "--config", bad.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    assert!(stderr_text(&run).contains("bad run configuration"));
}

#[test]
fn eval_rejects_a_dataset_at_the_wrong_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let train = gen(dir.path(), "train.qfd", 4, 32, 8);
    let test = gen(dir.path(), "test.qfd", 2, 32, 9);
    let other = gen(dir.path(), "other.qfd", 2, 64, 9);
    let (out_dir, _) = train_small(dir.path(), "run", "classical", &train, &test);

    let eval = qfno(&[
        "eval",
        "--model",
        out_dir.join("model.json").to_str().unwrap(),
        "--data",
        other.to_str().unwrap(),
    ]);
    assert_eq!(eval.status.code(), Some(1));
}

#[test]
fn verify_runs_named_suites_and_rejects_unknown_ones() {
    let ok = qfno(&["verify", "--suite", "uqft"]);
    assert!(ok.status.success(), "verify failed: {}", stderr_text(&ok));
    let doc = stdout_json(&ok);
    assert!(doc.as_array().map(|a| !a.is_empty()).unwrap_or(false));

    let bad = qfno(&["verify", "--suite", "nope"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn complexity_report_covers_variants_and_tracks_resolution() {
    let run = qfno(&["report-complexity", "--nc", "8", "--ns", "64", "--k", "4", "--variant", "all"]);
    assert!(run.status.success(), "report failed: {}", stderr_text(&run));
    let rows = stdout_json(&run);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert_eq!(row["qubits"], 72);
    }
    let parallel = rows.iter().find(|r| r["variant"] == "parallel").unwrap();
    assert_eq!(parallel["circuit_count"], 4);

    let seq_depth = |ns: &str| -> f64 {
        let run = qfno(&["report-complexity", "--nc", "8", "--ns", ns, "--k", "4", "--variant", "sequential"]);
        let rows = stdout_json(&run);
        rows.as_array().unwrap()[0]["formula_depth"].as_f64().unwrap()
    };
    // Each doubling of the spatial register adds one loader stage per channel
    // row plus one stage to each unary QFT.
    assert_eq!(seq_depth("128") - seq_depth("64"), 8.0 + 2.0);

    let bad = qfno(&["report-complexity", "--nc", "8", "--ns", "100", "--k", "4"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn missing_required_flags_exit_with_usage_errors() {
    let run = qfno(&["gen-burgers", "--count", "2"]);
    assert_eq!(run.status.code(), Some(2));

    let run = qfno(&["train"]);
    assert_eq!(run.status.code(), Some(2));
}
