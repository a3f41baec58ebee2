//! Command-line runner: dataset generation, training, evaluation, invariant
//! suites, and complexity reports. Machine-readable JSON goes to standard
//! output; diagnostics go to standard error.

use clap::{Args, Parser, Subcommand};
use qfno_core::ortho::LayoutShape;
use qfno_core::pde::{make_dataset, read_dataset, write_dataset, DatasetSpec, GrfSpec};
use qfno_core::qfl::{
    complexity_report, param_count, QflVariant, UntouchedModePolicy,
};
use qfno_core::qfno::{
    evaluate, load_model, save_model, train, Nonlinearity, ParallelAggregation, QfnoConfig,
    QfnoModel,
};
use qfno_core::verify::run_suite;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qfno", version, about = "Quantum Fourier neural operator workbench")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a viscous Burgers dataset from random initial fields.
    GenBurgers(GenArgs),
    /// Train a model and write checkpoint, metrics, and summary files.
    Train(TrainArgs),
    /// Evaluate a checkpoint on a dataset.
    Eval(EvalArgs),
    /// Run an invariant suite and report per-property residuals.
    Verify(VerifyArgs),
    /// Report circuit resource estimates for a layer configuration.
    ReportComplexity(ComplexityArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    count: usize,
    #[arg(long)]
    resolution: usize,
    #[arg(long, default_value_t = 0.1)]
    nu: f64,
    #[arg(long = "t-end", default_value_t = 1.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Field spectrum scale: mode k gets sd amplitude·(4π²k² + lambda²)^(−decay).
    #[arg(long, default_value_t = GrfSpec::default().amplitude)]
    amplitude: f64,
    #[arg(long, default_value_t = GrfSpec::default().lambda)]
    lambda: f64,
    #[arg(long, default_value_t = GrfSpec::default().decay)]
    decay: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Run configuration JSON; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "train-data")]
    train_data: Option<PathBuf>,
    #[arg(long = "test-data")]
    test_data: Option<PathBuf>,
    /// Output directory for model.json, metrics.csv, summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_variant)]
    variant: Option<QflVariant>,
    #[arg(long)]
    nc: Option<usize>,
    #[arg(long)]
    ns: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long, value_parser = parse_shape)]
    shape: Option<LayoutShape>,
    #[arg(long, value_parser = parse_nonlinearity)]
    nonlinearity: Option<Nonlinearity>,
    #[arg(long, value_parser = parse_aggregation)]
    aggregation: Option<ParallelAggregation>,
    #[arg(long, value_parser = parse_untouched)]
    untouched: Option<UntouchedModePolicy>,
    #[arg(long)]
    renormalize: Option<bool>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// core, uqft, layers, equiv, grad, or all.
    #[arg(long, default_value = "all")]
    suite: String,
}

#[derive(Args)]
struct ComplexityArgs {
    #[arg(long)]
    nc: usize,
    #[arg(long)]
    ns: usize,
    #[arg(long)]
    k: usize,
    /// One variant name, or "all" for a row per variant.
    #[arg(long, default_value = "all")]
    variant: String,
}

/// Everything a training run depends on, written back out for provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    config: QfnoConfig,
    train_data: PathBuf,
    test_data: PathBuf,
    out_dir: PathBuf,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

type CmdResult<T> = Result<T, Failure>;

impl From<qfno_core::error::Error> for Failure {
    fn from(e: qfno_core::error::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn parse_variant(s: &str) -> Result<QflVariant, String> {
    match s {
        "classical" => Ok(QflVariant::Classical),
        "sequential" => Ok(QflVariant::Sequential),
        "parallel" => Ok(QflVariant::Parallel),
        "composite" => Ok(QflVariant::Composite),
        _ => Err(format!("unknown variant '{s}' (classical|sequential|parallel|composite)")),
    }
}

fn parse_shape(s: &str) -> Result<LayoutShape, String> {
    match s {
        "butterfly" => Ok(LayoutShape::Butterfly),
        "pyramid" => Ok(LayoutShape::Pyramid),
        _ => Err(format!("unknown shape '{s}' (butterfly|pyramid)")),
    }
}

fn parse_nonlinearity(s: &str) -> Result<Nonlinearity, String> {
    match s {
        "gelu" => Ok(Nonlinearity::Gelu),
        "relu" => Ok(Nonlinearity::Relu),
        "none" => Ok(Nonlinearity::None),
        _ => Err(format!("unknown nonlinearity '{s}' (gelu|relu|none)")),
    }
}

fn parse_aggregation(s: &str) -> Result<ParallelAggregation, String> {
    match s {
        "linear" => Ok(ParallelAggregation::Linear),
        "spectral" => Ok(ParallelAggregation::Spectral),
        "mean" => Ok(ParallelAggregation::Mean),
        _ => Err(format!("unknown aggregation '{s}' (linear|spectral|mean)")),
    }
}

fn parse_untouched(s: &str) -> Result<UntouchedModePolicy, String> {
    match s {
        "keep" => Ok(UntouchedModePolicy::Keep),
        "crop" => Ok(UntouchedModePolicy::Crop),
        _ => Err(format!("unknown untouched-mode policy '{s}' (keep|crop)")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::GenBurgers(args) => cmd_gen_burgers(args),
        Cmd::Train(args) => cmd_train(args),
        Cmd::Eval(args) => cmd_eval(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::ReportComplexity(args) => cmd_report_complexity(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn cmd_gen_burgers(args: GenArgs) -> CmdResult<()> {
    if !args.resolution.is_power_of_two() || args.resolution < 4 {
        return Err(Failure::Usage("resolution must be a power of two (≥ 4)".into()));
    }
    if args.count == 0 {
        return Err(Failure::Usage("count must be at least 1".into()));
    }
    if !(args.nu > 0.0) || !(args.t_end >= 0.0) || !(args.dt > 0.0) {
        return Err(Failure::Usage("nu and dt must be positive, t-end nonnegative".into()));
    }
    if !(args.amplitude > 0.0) || !(args.lambda >= 0.0) || !args.decay.is_finite() {
        return Err(Failure::Usage("amplitude must be positive, lambda nonnegative".into()));
    }
    let mut spec = DatasetSpec::new(args.count, args.resolution, args.seed);
    spec.nu = args.nu;
    spec.t_final = args.t_end;
    spec.dt = args.dt;
    spec.grf = GrfSpec { amplitude: args.amplitude, lambda: args.lambda, decay: args.decay };
    eprintln!("generating {} samples at resolution {}", args.count, args.resolution);
    let ds = make_dataset(&spec)?;
    write_dataset(&ds, &args.out)?;
    let bytes = std::fs::metadata(&args.out)?.len();
    emit(&serde_json::json!({
        "path": args.out,
        "n_samples": ds.meta.n_samples,
        "resolution": ds.meta.resolution,
        "nu": ds.meta.nu,
        "t_final": ds.meta.t_final,
        "seed": ds.meta.seed,
        "bytes": bytes,
    }))
}

fn resolve_run_config(args: &TrainArgs) -> CmdResult<RunConfig> {
    let file: Option<RunConfig> = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            Some(
                serde_json::from_str(&text)
                    .map_err(|e| Failure::Usage(format!("bad run configuration: {e}")))?,
            )
        }
        None => None,
    };

    let need = |flag: &str, what: &str| {
        Failure::Usage(format!("{what} required: pass {flag} or provide it in --config"))
    };
    let train_data = args
        .train_data
        .clone()
        .or_else(|| file.as_ref().map(|f| f.train_data.clone()))
        .ok_or_else(|| need("--train-data", "training dataset"))?;
    let test_data = args
        .test_data
        .clone()
        .or_else(|| file.as_ref().map(|f| f.test_data.clone()))
        .ok_or_else(|| need("--test-data", "test dataset"))?;
    let out_dir = args
        .out
        .clone()
        .or_else(|| file.as_ref().map(|f| f.out_dir.clone()))
        .ok_or_else(|| need("--out", "output directory"))?;

    let mut config = match &file {
        Some(f) => f.config.clone(),
        None => {
            let variant = args.variant.ok_or_else(|| need("--variant", "model variant"))?;
            // n_s defaults to the dataset resolution once the file is opened
            QfnoConfig::new(variant, 8, 0, 4, 2)
        }
    };
    if let Some(v) = args.variant {
        config.variant = v;
    }
    if let Some(n) = args.nc {
        config.n_c = n;
    }
    if let Some(n) = args.ns {
        config.n_s = n;
    }
    if let Some(k) = args.k {
        config.k_modes = k;
    }
    if let Some(t) = args.layers {
        config.t_layers = t;
    }
    if let Some(s) = args.shape {
        config.shape = s;
    }
    if let Some(a) = args.nonlinearity {
        config.nonlinearity = a;
    }
    if let Some(a) = args.aggregation {
        config.aggregation = a;
    }
    if let Some(u) = args.untouched {
        config.untouched = u;
    }
    if let Some(r) = args.renormalize {
        config.composite_renormalize = r;
    }
    if let Some(lr) = args.lr {
        config.learning_rate = lr;
    }
    if let Some(b) = args.batch {
        config.batch_size = b;
    }
    if let Some(e) = args.epochs {
        config.epochs = e;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    Ok(RunConfig { config, train_data, test_data, out_dir })
}

fn cmd_train(args: TrainArgs) -> CmdResult<()> {
    let mut run = resolve_run_config(&args)?;
    let train_set = read_dataset(&run.train_data)?;
    let test_set = read_dataset(&run.test_data)?;
    if run.config.n_s == 0 {
        run.config.n_s = train_set.meta.resolution;
    }
    run.config.validate().map_err(|e| Failure::Usage(e.to_string()))?;

    std::fs::create_dir_all(&run.out_dir)?;
    std::fs::write(
        run.out_dir.join("run_config.json"),
        serde_json::to_string_pretty(&run).map_err(|e| Failure::Runtime(e.to_string()))?,
    )?;

    let mut metrics = std::io::BufWriter::new(std::fs::File::create(
        run.out_dir.join("metrics.csv"),
    )?);
    writeln!(metrics, "epoch,train_loss,test_rel_err,seconds")?;

    let mut model = QfnoModel::new(run.config.clone())?;
    eprintln!(
        "training {:?} on {} samples for {} epochs",
        run.config.variant,
        train_set.meta.n_samples,
        run.config.epochs
    );
    let mut row_error: Option<std::io::Error> = None;
    let every = (run.config.epochs / 10).max(1);
    let report = train(&mut model, &train_set, &test_set, |s| {
        if let Err(e) = writeln!(
            metrics,
            "{},{},{},{}",
            s.epoch, s.train_loss, s.test_rel_err, s.seconds
        ) {
            row_error.get_or_insert(e);
        }
        if (s.epoch + 1) % every == 0 || s.epoch + 1 == run.config.epochs {
            eprintln!(
                "epoch {:>4}: train loss {:.6}, test rel err {:.6}",
                s.epoch + 1,
                s.train_loss,
                s.test_rel_err
            );
        }
    })?;
    if let Some(e) = row_error {
        return Err(e.into());
    }
    metrics.flush()?;

    save_model(&model, &run.out_dir.join("model.json"))?;

    let qfl = run.config.qfl();
    let summary = serde_json::json!({
        "schema_version": 1,
        "variant": run.config.variant,
        "final_train_loss": report.final_train_loss,
        "final_test_rel_err": report.final_test_rel_err,
        "imag_residue": report.imag_residue,
        "epochs": report.epochs.len(),
        "total_seconds": report.total_seconds,
        "param_count_per_layer": param_count(&qfl, run.config.variant)?,
        "param_count_total": model.param_len(),
        "complexity": complexity_report(&qfl, run.config.variant)?,
        "out_dir": run.out_dir,
    });
    std::fs::write(
        run.out_dir.join("summary.json"),
        serde_json::to_string_pretty(&summary).map_err(|e| Failure::Runtime(e.to_string()))?,
    )?;
    emit(&summary)
}

fn cmd_eval(args: EvalArgs) -> CmdResult<()> {
    let model = load_model(&args.model)?;
    let ds = read_dataset(&args.data)?;
    let report = evaluate(&model, &ds)?;
    emit(&serde_json::json!({
        "model": args.model,
        "data": args.data,
        "n_samples": ds.meta.n_samples,
        "rel_err_mean": report.rel_err_mean,
        "imag_residue": report.imag_residue,
    }))
}

fn cmd_verify(args: VerifyArgs) -> CmdResult<()> {
    let reports = run_suite(&args.suite).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut first_fail: Option<String> = None;
    for suite in &reports {
        for prop in &suite.results {
            if !prop.passed && first_fail.is_none() {
                first_fail = Some(format!("{}/{}", suite.suite, prop.name));
            }
        }
    }
    emit(&serde_json::to_value(&reports).map_err(|e| Failure::Runtime(e.to_string()))?)?;
    match first_fail {
        Some(name) => Err(Failure::Runtime(format!("first failing property: {name}"))),
        None => Ok(()),
    }
}

fn cmd_report_complexity(args: ComplexityArgs) -> CmdResult<()> {
    let variants: Vec<QflVariant> = if args.variant == "all" {
        vec![
            QflVariant::Classical,
            QflVariant::Sequential,
            QflVariant::Parallel,
            QflVariant::Composite,
        ]
    } else {
        vec![parse_variant(&args.variant).map_err(Failure::Usage)?]
    };
    let cfg = qfno_core::qfl::QflConfig::new(args.nc, args.ns, args.k);
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let rows = variants
        .iter()
        .map(|&v| complexity_report(&cfg, v))
        .collect::<qfno_core::error::Result<Vec<_>>>()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    emit(&serde_json::to_value(&rows).map_err(|e| Failure::Runtime(e.to_string()))?)
}

fn emit(value: &serde_json::Value) -> CmdResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.to_string()))?;
    let mut out = std::io::stdout().lock();
    // a consumer closing the pipe early (e.g. head) is not a failure
    match writeln!(out, "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        other => other.map_err(Failure::from),
    }
}
