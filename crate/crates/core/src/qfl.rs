//! Fourier mixing layers over a channel×space activation matrix.
//!
//! All four variants share the same skeleton: DFT along the spatial axis,
//! per-mode channel mixing on the lowest `k_modes` frequency columns, inverse
//! DFT. They differ in how the mixing is realized:
//!
//! * `classical_fourier_layer`: dense real weight per mode.
//! * `sequential_qfl`: one circuit applying K controlled orthogonal blocks
//!   in sequence, each gated on one spatial line.
//! * `parallel_qfl`: K independent single-mode circuits whose outputs are
//!   recombined linearly or spectrally.
//! * `composite_qfl`: a single parameterized block over channel lines plus
//!   K mode lines; transformed modes ride the two-hot sector, untouched
//!   modes the one-hot sector.

use crate::error::{Error, Result};
use crate::loader::matrix_loader_depth;
use crate::mat::{CMat, RMat};
use crate::ortho::{
    apply_chain, build_controlled_param, build_param_circuit, build_reversed, butterfly_padded,
    init_thetas, Layout, LayoutShape, ThetaVector,
};
use crate::subspace::{pair_index, Hw2State, PairState};
use crate::uqft::{apply_uqft_rows, build_uqft, dft_rows, UqftPath};
use num_complex::Complex64;
use rand::Rng;

const NORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QflVariant {
    Classical,
    Sequential,
    Parallel,
    Composite,
}

/// What happens to frequency columns j ≥ k_modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UntouchedModePolicy {
    /// Columns pass through (default; the unitary circuits do this for free).
    Keep,
    /// Columns are zeroed, as if post-selecting on the mixed modes.
    Crop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecombineRule {
    /// Sum of branch outputs minus (K−1)× the input; exact in any basis.
    Linear,
    /// Take mode k from branch k in the frequency domain.
    Spectral,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct QflConfig {
    /// Channel count (top register lines).
    pub n_c: usize,
    /// Spatial resolution (bottom register lines); must be a power of two.
    pub n_s: usize,
    /// Number of mixed frequency columns, 1..=n_s.
    pub k_modes: usize,
    pub shape: LayoutShape,
    pub untouched: UntouchedModePolicy,
    /// Rescale each post-selected composite column back to its input norm.
    pub composite_renormalize: bool,
}

impl QflConfig {
    pub fn new(n_c: usize, n_s: usize, k_modes: usize) -> Self {
        QflConfig {
            n_c,
            n_s,
            k_modes,
            shape: LayoutShape::Butterfly,
            untouched: UntouchedModePolicy::Keep,
            composite_renormalize: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n_s.is_power_of_two() || self.n_s < 2 {
            return Err(Error::NotPowerOfTwo(self.n_s));
        }
        if self.n_c < 2 {
            return Err(Error::ShapeMismatch(format!(
                "channel register needs at least 2 lines, got {}",
                self.n_c
            )));
        }
        if self.k_modes == 0 || self.k_modes > self.n_s {
            return Err(Error::ShapeMismatch(format!(
                "k_modes must lie in 1..={}, got {}",
                self.n_s, self.k_modes
            )));
        }
        Ok(())
    }

    /// Layout for one per-mode block. Non-power-of-two channel counts get a
    /// padded butterfly whose pad-touching slots are frozen at zero.
    pub fn mode_layout(&self) -> Result<(Layout, Vec<bool>)> {
        match self.shape {
            LayoutShape::Butterfly => butterfly_padded(self.n_c),
            LayoutShape::Pyramid => {
                let layout = Layout::pyramid(self.n_c)?;
                let mask = vec![true; layout.slot_count()];
                Ok((layout, mask))
            }
        }
    }

    /// Layout for the composite block over n_c channel lines + k mode lines.
    pub fn composite_layout(&self) -> Result<(Layout, Vec<bool>)> {
        let m = self.n_c + self.k_modes;
        match self.shape {
            LayoutShape::Butterfly => butterfly_padded(m),
            LayoutShape::Pyramid => {
                let layout = Layout::pyramid(m)?;
                let mask = vec![true; layout.slot_count()];
                Ok((layout, mask))
            }
        }
    }
}

/// Trainable state of one layer.
#[derive(Debug, Clone)]
pub enum QflParams {
    Classical {
        /// k_modes dense n_c×n_c matrices.
        weights: Vec<RMat>,
    },
    PerMode {
        layout: Layout,
        /// One angle vector per mixed mode.
        thetas: Vec<ThetaVector>,
        /// Shared trainable mask; frozen slots stay at zero.
        trainable: Vec<bool>,
    },
    Composite {
        layout: Layout,
        thetas: ThetaVector,
        trainable: Vec<bool>,
    },
}

impl QflParams {
    pub fn init(cfg: &QflConfig, variant: QflVariant, rng: &mut impl Rng) -> Result<Self> {
        cfg.validate()?;
        match variant {
            QflVariant::Classical => {
                let bound = 1.0 / (cfg.n_c as f64).sqrt();
                let weights = (0..cfg.k_modes)
                    .map(|_| {
                        RMat::from_fn(cfg.n_c, cfg.n_c, |_, _| rng.random_range(-bound..bound))
                    })
                    .collect();
                Ok(QflParams::Classical { weights })
            }
            QflVariant::Sequential | QflVariant::Parallel => {
                let (layout, trainable) = cfg.mode_layout()?;
                let thetas = (0..cfg.k_modes)
                    .map(|_| masked_init(&layout, &trainable, rng))
                    .collect();
                Ok(QflParams::PerMode { layout, thetas, trainable })
            }
            QflVariant::Composite => {
                let (layout, trainable) = cfg.composite_layout()?;
                let thetas = masked_init(&layout, &trainable, rng);
                Ok(QflParams::Composite { layout, thetas, trainable })
            }
        }
    }

    /// Count of angles (or weight entries) the optimizer may move.
    pub fn trainable_len(&self) -> usize {
        match self {
            QflParams::Classical { weights } => {
                weights.iter().map(|w| w.rows * w.cols).sum()
            }
            QflParams::PerMode { thetas, trainable, .. } => {
                thetas.len() * trainable.iter().filter(|&&b| b).count()
            }
            QflParams::Composite { trainable, .. } => {
                trainable.iter().filter(|&&b| b).count()
            }
        }
    }

    /// Appends the trainable values in a fixed order (modes outer, slots
    /// inner; classical weights row-major).
    pub fn collect_params(&self, out: &mut Vec<f64>) {
        match self {
            QflParams::Classical { weights } => {
                for w in weights {
                    out.extend_from_slice(w.data());
                }
            }
            QflParams::PerMode { thetas, trainable, .. } => {
                for t in thetas {
                    out.extend(t.iter().zip(trainable).filter(|(_, &m)| m).map(|(v, _)| *v));
                }
            }
            QflParams::Composite { thetas, trainable, .. } => {
                out.extend(thetas.iter().zip(trainable).filter(|(_, &m)| m).map(|(v, _)| *v));
            }
        }
    }

    /// Writes values back in `collect_params` order.
    pub fn assign_params(&mut self, vals: &mut impl Iterator<Item = f64>) {
        match self {
            QflParams::Classical { weights } => {
                for w in weights {
                    for x in w.data_mut() {
                        *x = vals.next().expect("parameter vector too short");
                    }
                }
            }
            QflParams::PerMode { thetas, trainable, .. } => {
                for t in thetas {
                    for (x, &m) in t.iter_mut().zip(trainable.iter()) {
                        if m {
                            *x = vals.next().expect("parameter vector too short");
                        }
                    }
                }
            }
            QflParams::Composite { thetas, trainable, .. } => {
                for (x, &m) in thetas.iter_mut().zip(trainable.iter()) {
                    if m {
                        *x = vals.next().expect("parameter vector too short");
                    }
                }
            }
        }
    }
}

fn masked_init(layout: &Layout, mask: &[bool], rng: &mut impl Rng) -> ThetaVector {
    let mut t = init_thetas(layout, rng);
    for (x, &m) in t.iter_mut().zip(mask) {
        if !m {
            *x = 0.0;
        }
    }
    t
}

fn check_shape(a: &CMat, cfg: &QflConfig) -> Result<()> {
    if a.rows != cfg.n_c || a.cols != cfg.n_s {
        return Err(Error::ShapeMismatch(format!(
            "expected a {}×{} activation, got {}×{}",
            cfg.n_c, cfg.n_s, a.rows, a.cols
        )));
    }
    Ok(())
}

fn require_unit(a: &CMat) -> Result<()> {
    let norm = a.frob_norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm, tol: NORM_TOL });
    }
    Ok(())
}

/// Padded one-hot-sector action of the effective weight on one column.
fn mode_transform(layout: &Layout, thetas: &[f64], col: &[Complex64], n_c: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::ZERO; layout.n];
    v[..col.len()].copy_from_slice(col);
    apply_chain(&mut v, layout, thetas, false);
    apply_chain(&mut v, layout, thetas, true);
    v.truncate(n_c);
    v
}

fn crop_in_place(ahat: &mut CMat, k: usize) {
    for r in 0..ahat.rows {
        for x in &mut ahat.row_mut(r)[k..] {
            *x = Complex64::ZERO;
        }
    }
}

/// Dense-weight baseline: Â = DFT(A) along rows, â_j ↦ W_j·â_j for j < K,
/// inverse DFT. Output is generally complex even for real input.
pub fn classical_fourier_layer(a: &CMat, cfg: &QflConfig, weights: &[RMat]) -> Result<CMat> {
    cfg.validate()?;
    check_shape(a, cfg)?;
    if weights.len() != cfg.k_modes {
        return Err(Error::LengthMismatch { expected: cfg.k_modes, got: weights.len() });
    }
    for w in weights {
        if w.rows != cfg.n_c || w.cols != cfg.n_c {
            return Err(Error::ShapeMismatch(format!(
                "mode weight must be {0}×{0}, got {1}×{2}",
                cfg.n_c, w.rows, w.cols
            )));
        }
    }
    let mut ahat = dft_rows(a, false);
    for j in 0..cfg.k_modes {
        let col = ahat.col(j);
        let mut y = vec![Complex64::ZERO; cfg.n_c];
        for i in 0..cfg.n_c {
            let mut acc = Complex64::ZERO;
            for b in 0..cfg.n_c {
                acc += weights[j][(i, b)] * col[b];
            }
            y[i] = acc;
        }
        ahat.set_col(j, &y);
    }
    if cfg.untouched == UntouchedModePolicy::Crop {
        crop_in_place(&mut ahat, cfg.k_modes);
    }
    Ok(dft_rows(&ahat, true))
}

fn expect_per_mode(params: &QflParams) -> Result<(&Layout, &[ThetaVector])> {
    match params {
        QflParams::PerMode { layout, thetas, .. } => Ok((layout, thetas)),
        _ => Err(Error::ShapeMismatch("layer expects per-mode angle parameters".into())),
    }
}

/// One circuit, K controlled orthogonal blocks applied in sequence. The
/// semantic path mirrors the restricted-sector algebra directly; the gate
/// path drives the explicit circuit through the two-register simulator.
pub fn sequential_qfl(
    a: &CMat,
    cfg: &QflConfig,
    params: &QflParams,
    path: UqftPath,
) -> Result<CMat> {
    cfg.validate()?;
    check_shape(a, cfg)?;
    require_unit(a)?;
    let (layout, thetas) = expect_per_mode(params)?;
    if thetas.len() != cfg.k_modes {
        return Err(Error::LengthMismatch { expected: cfg.k_modes, got: thetas.len() });
    }
    match path {
        UqftPath::Semantic => {
            let mut ahat = dft_rows(a, false);
            for j in 0..cfg.k_modes {
                let y = mode_transform(layout, &thetas[j], &ahat.col(j), cfg.n_c);
                ahat.set_col(j, &y);
            }
            if cfg.untouched == UntouchedModePolicy::Crop {
                crop_in_place(&mut ahat, cfg.k_modes);
            }
            Ok(dft_rows(&ahat, true))
        }
        UqftPath::Gate => {
            let mut top = CMat::zeros(layout.n, cfg.n_s);
            for r in 0..cfg.n_c {
                top.row_mut(r).copy_from_slice(a.row(r));
            }
            let mut state = apply_uqft_rows(&PairState::from_amps(top), false, UqftPath::Gate)?;
            for j in 0..cfg.k_modes {
                let circ = build_controlled_param(layout, &thetas[j], cfg.n_s, j)?;
                state.apply_circuit(&circ)?;
            }
            if cfg.untouched == UntouchedModePolicy::Crop {
                crop_in_place(&mut state.amps, cfg.k_modes);
            }
            let state = apply_uqft_rows(&state, true, UqftPath::Gate)?;
            let mut out = CMat::zeros(cfg.n_c, cfg.n_s);
            for r in 0..cfg.n_c {
                out.row_mut(r).copy_from_slice(state.amps.row(r));
            }
            Ok(out)
        }
    }
}

/// Branch k mixes only frequency column k and leaves the rest untouched.
pub fn parallel_branch_outputs(
    a: &CMat,
    cfg: &QflConfig,
    params: &QflParams,
) -> Result<Vec<CMat>> {
    cfg.validate()?;
    check_shape(a, cfg)?;
    require_unit(a)?;
    let (layout, thetas) = expect_per_mode(params)?;
    if thetas.len() != cfg.k_modes {
        return Err(Error::LengthMismatch { expected: cfg.k_modes, got: thetas.len() });
    }
    let ahat = dft_rows(a, false);
    let mut branches = Vec::with_capacity(cfg.k_modes);
    for k in 0..cfg.k_modes {
        let mut bhat = ahat.clone();
        let y = mode_transform(layout, &thetas[k], &bhat.col(k), cfg.n_c);
        bhat.set_col(k, &y);
        branches.push(dft_rows(&bhat, true));
    }
    Ok(branches)
}

/// Merges the K single-mode branch outputs back into one activation.
pub fn parallel_recombine(
    branches: &[CMat],
    a: &CMat,
    cfg: &QflConfig,
    rule: RecombineRule,
) -> Result<CMat> {
    if branches.len() != cfg.k_modes {
        return Err(Error::LengthMismatch { expected: cfg.k_modes, got: branches.len() });
    }
    match rule {
        RecombineRule::Linear => {
            let mut out = CMat::zeros(cfg.n_c, cfg.n_s);
            for b in branches {
                for (o, x) in out.data_mut().iter_mut().zip(b.data()) {
                    *o += x;
                }
            }
            let excess = (cfg.k_modes as f64 - 1.0).max(0.0);
            for (o, x) in out.data_mut().iter_mut().zip(a.data()) {
                *o -= excess * x;
            }
            if cfg.untouched == UntouchedModePolicy::Crop {
                let mut ahat = dft_rows(&out, false);
                crop_in_place(&mut ahat, cfg.k_modes);
                out = dft_rows(&ahat, true);
            }
            Ok(out)
        }
        RecombineRule::Spectral => {
            let mut out_hat = dft_rows(a, false);
            if cfg.untouched == UntouchedModePolicy::Crop {
                crop_in_place(&mut out_hat, cfg.k_modes);
            }
            for (k, b) in branches.iter().enumerate() {
                let bhat = dft_rows(b, false);
                out_hat.set_col(k, &bhat.col(k));
            }
            Ok(dft_rows(&out_hat, true))
        }
    }
}

/// Plain average of the branch outputs; per mode this acts like the damped
/// weight (1−1/K)·I + (1/K)·W_k.
pub fn parallel_mean(branches: &[CMat]) -> Result<CMat> {
    if branches.is_empty() {
        return Err(Error::LengthMismatch { expected: 1, got: 0 });
    }
    let mut out = CMat::zeros(branches[0].rows, branches[0].cols);
    for b in branches {
        for (o, x) in out.data_mut().iter_mut().zip(b.data()) {
            *o += x;
        }
    }
    let scale = 1.0 / branches.len() as f64;
    for o in out.data_mut() {
        *o *= scale;
    }
    Ok(out)
}

pub fn parallel_qfl(
    a: &CMat,
    cfg: &QflConfig,
    params: &QflParams,
    rule: RecombineRule,
) -> Result<CMat> {
    let branches = parallel_branch_outputs(a, cfg, params)?;
    parallel_recombine(&branches, a, cfg, rule)
}

/// Single block over n_c + k_modes lines. Frequency column j < K is loaded
/// with the mode line n_c+j hot, evolves in the two-hot sector, and is read
/// back from the (channel, mode-j) pairs: a post-selection that is not
/// renormalized unless `composite_renormalize` is set. Columns j ≥ K carry
/// no hot mode line, so they see the one-hot block of the same circuit.
pub fn composite_qfl(a: &CMat, cfg: &QflConfig, params: &QflParams) -> Result<CMat> {
    cfg.validate()?;
    check_shape(a, cfg)?;
    require_unit(a)?;
    let (layout, thetas) = match params {
        QflParams::Composite { layout, thetas, .. } => (layout, thetas),
        _ => {
            return Err(Error::ShapeMismatch(
                "composite layer expects a single shared angle vector".into(),
            ))
        }
    };
    let mut block = build_param_circuit(layout, thetas)?;
    block.extend(build_reversed(layout, thetas)?.gates);

    let ahat = dft_rows(a, false);
    let mut out_hat = CMat::zeros(cfg.n_c, cfg.n_s);
    for j in 0..cfg.k_modes {
        let hot = cfg.n_c + j;
        let mut z = Hw2State::new(layout.n)?;
        let mut in_norm_sq = 0.0;
        for i in 0..cfg.n_c {
            let v = ahat[(i, j)];
            z.amps[pair_index(layout.n, i, hot)] = v;
            in_norm_sq += v.norm_sqr();
        }
        z.apply_circuit(&block)?;
        let mut col = vec![Complex64::ZERO; cfg.n_c];
        let mut sel_norm_sq = 0.0;
        for (i, c) in col.iter_mut().enumerate() {
            *c = z.amp(i, hot);
            sel_norm_sq += c.norm_sqr();
        }
        if cfg.composite_renormalize && sel_norm_sq > 0.0 {
            let scale = (in_norm_sq / sel_norm_sq).sqrt();
            for c in &mut col {
                *c *= scale;
            }
        }
        out_hat.set_col(j, &col);
    }
    if cfg.untouched == UntouchedModePolicy::Keep {
        for j in cfg.k_modes..cfg.n_s {
            let y = mode_transform(layout, thetas, &ahat.col(j), cfg.n_c);
            out_hat.set_col(j, &y);
        }
    }
    Ok(dft_rows(&out_hat, true))
}

/// Resource accounting for one layer at a given size.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ComplexityReport {
    pub variant: QflVariant,
    /// Unary channel register plus unary spatial register.
    pub qubits: usize,
    /// Independent circuit executions per layer application.
    pub circuit_count: usize,
    /// Gates in the mixing circuits (loader excluded).
    pub gate_count: usize,
    /// Loader depth estimate plus greedily scheduled circuit depth, with
    /// anti-controlled Z blocks weighted by their target count.
    pub measured_depth: usize,
    /// Closed-form depth estimate.
    pub formula_depth: f64,
    pub param_count: usize,
    /// Parallel RBS layers in one parameterized block.
    pub param_stage_count: usize,
}

/// Trainable parameter count per layer, by variant.
pub fn param_count(cfg: &QflConfig, variant: QflVariant) -> Result<usize> {
    cfg.validate()?;
    Ok(match variant {
        QflVariant::Classical => cfg.k_modes * cfg.n_c * cfg.n_c,
        QflVariant::Sequential | QflVariant::Parallel => {
            let (_, mask) = cfg.mode_layout()?;
            cfg.k_modes * mask.iter().filter(|&&b| b).count()
        }
        QflVariant::Composite => {
            let (_, mask) = cfg.composite_layout()?;
            mask.iter().filter(|&&b| b).count()
        }
    })
}

pub fn complexity_report(cfg: &QflConfig, variant: QflVariant) -> Result<ComplexityReport> {
    cfg.validate()?;
    let qubits = cfg.n_c + cfg.n_s;
    let params = param_count(cfg, variant)?;
    let lc = (cfg.n_c as f64).log2();
    let ls = (cfg.n_s as f64).log2();
    let k = cfg.k_modes as f64;
    if variant == QflVariant::Classical {
        return Ok(ComplexityReport {
            variant,
            qubits,
            circuit_count: 0,
            gate_count: 0,
            measured_depth: 0,
            formula_depth: 0.0,
            param_count: params,
            param_stage_count: 0,
        });
    }
    let loader_est = matrix_loader_depth(cfg.n_c, cfg.n_s).ceil() as usize;
    let uqft = build_uqft(cfg.n_s, false)?;
    let uqft_depth = uqft.measured_depth();
    let uqft_gates = uqft.gate_count();
    let report = match variant {
        QflVariant::Sequential | QflVariant::Parallel => {
            let (layout, _) = cfg.mode_layout()?;
            let zero = vec![0.0; layout.slot_count()];
            let controlled = build_controlled_param(&layout, &zero, cfg.n_s, 0)?;
            let block_depth = controlled.measured_depth();
            let block_gates = controlled.gate_count();
            if variant == QflVariant::Sequential {
                ComplexityReport {
                    variant,
                    qubits,
                    circuit_count: 1,
                    gate_count: 2 * uqft_gates + cfg.k_modes * block_gates,
                    measured_depth: loader_est + 2 * uqft_depth + cfg.k_modes * block_depth,
                    formula_depth: (cfg.n_c as f64 + 2.0) * ls
                        + (2.0 * k + 1.0) * lc
                        + k * cfg.n_c as f64,
                    param_count: params,
                    param_stage_count: layout.layers.len(),
                }
            } else {
                ComplexityReport {
                    variant,
                    qubits,
                    circuit_count: cfg.k_modes,
                    gate_count: 2 * uqft_gates + block_gates,
                    measured_depth: loader_est + 2 * uqft_depth + block_depth,
                    formula_depth: (cfg.n_c as f64 + 2.0) * ls + 3.0 * lc + cfg.n_c as f64,
                    param_count: params,
                    param_stage_count: layout.layers.len(),
                }
            }
        }
        QflVariant::Composite => {
            let (layout, _) = cfg.composite_layout()?;
            let zero = vec![0.0; layout.slot_count()];
            let mut block = build_param_circuit(&layout, &zero)?;
            block.extend(build_reversed(&layout, &zero)?.gates);
            ComplexityReport {
                variant,
                qubits,
                circuit_count: 1,
                gate_count: 2 * uqft_gates + block.gate_count(),
                measured_depth: loader_est + 2 * uqft_depth + block.measured_depth(),
                formula_depth: (cfg.n_c as f64 + 2.0) * ls
                    + ((cfg.n_c + cfg.k_modes) as f64).log2()
                    + lc,
                param_count: params,
                param_stage_count: layout.layers.len(),
            }
        }
        QflVariant::Classical => unreachable!(),
    };
    Ok(report)
}
