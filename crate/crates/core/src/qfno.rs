//! End-to-end operator model: lift, stacked Fourier mixing layers with a
//! nonlinearity and norm reset between them, and a linear readout.
//!
//! The forward pass keeps every layer input at unit Frobenius norm (the
//! circuits require it) and restores the physical scale at the readout with
//! the lift norm. Gradients are computed analytically in reverse mode; the
//! orthogonal chains are walked backwards by un-rotating, so no per-gate
//! activations are stored.

use crate::error::{Error, Result};
use crate::mat::{CMat, RMat};
use crate::ortho::Layout;
use crate::pde::Dataset;
use crate::qfl::{
    classical_fourier_layer, composite_qfl, parallel_branch_outputs, parallel_mean, parallel_qfl,
    sequential_qfl, QflConfig, QflParams, QflVariant, RecombineRule, UntouchedModePolicy,
};
use crate::subspace::{pair_count, pair_index, rbs_rotate};
use crate::uqft::{dft_rows, UqftPath};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use std::time::Instant;

/// Input feature rows fed to the lift: the field itself and the grid.
pub const D_IN: usize = 2;

pub const SCHEMA_VERSION: u64 = 1;

/// Decorrelates the batch-shuffle stream from the init stream.
const SHUFFLE_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Nonlinearity {
    Gelu,
    Relu,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParallelAggregation {
    /// Sum minus (K−1)× input; exactly the sequential layer.
    Linear,
    /// Per-mode spectral stitch; also exactly the sequential layer.
    Spectral,
    /// Plain average; damps each mode weight towards the identity.
    Mean,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QfnoConfig {
    pub variant: QflVariant,
    pub n_c: usize,
    pub n_s: usize,
    pub k_modes: usize,
    pub t_layers: usize,
    pub shape: crate::ortho::LayoutShape,
    pub nonlinearity: Nonlinearity,
    pub aggregation: ParallelAggregation,
    pub untouched: UntouchedModePolicy,
    pub composite_renormalize: bool,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl QfnoConfig {
    pub fn new(variant: QflVariant, n_c: usize, n_s: usize, k_modes: usize, t_layers: usize) -> Self {
        QfnoConfig {
            variant,
            n_c,
            n_s,
            k_modes,
            t_layers,
            shape: crate::ortho::LayoutShape::Butterfly,
            nonlinearity: Nonlinearity::Gelu,
            aggregation: ParallelAggregation::Linear,
            untouched: UntouchedModePolicy::Keep,
            composite_renormalize: false,
            learning_rate: 1e-3,
            batch_size: 20,
            epochs: 100,
            seed: 0,
        }
    }

    pub fn qfl(&self) -> QflConfig {
        QflConfig {
            n_c: self.n_c,
            n_s: self.n_s,
            k_modes: self.k_modes,
            shape: self.shape,
            untouched: self.untouched,
            composite_renormalize: self.composite_renormalize,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.qfl().validate()
    }
}

#[derive(Debug, Clone)]
pub struct QfnoModel {
    pub config: QfnoConfig,
    /// Lift weights, D_IN × n_c; the lift computes Pᵀ·Φ.
    pub p: RMat,
    pub layers: Vec<QflParams>,
    /// Readout vector, length n_c.
    pub q: Vec<f64>,
}

impl QfnoModel {
    /// Seeded init: lift, layer parameters, readout, in that order from one
    /// stream so the whole model is a function of (config, seed).
    pub fn new(config: QfnoConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let pb = 1.0 / (D_IN as f64).sqrt();
        let p = RMat::from_fn(D_IN, config.n_c, |_, _| rng.random_range(-pb..pb));
        let cfg = config.qfl();
        let layers = (0..config.t_layers)
            .map(|_| QflParams::init(&cfg, config.variant, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        let qb = 1.0 / (config.n_c as f64).sqrt();
        let q = (0..config.n_c).map(|_| rng.random_range(-qb..qb)).collect();
        Ok(QfnoModel { config, p, layers, q })
    }

    /// Lift Φ = [u0; grid] into channel space and split off the norm.
    pub fn lift(&self, u0: &[f64], grid: &[f64]) -> Result<(RMat, f64)> {
        let n_s = self.config.n_s;
        if u0.len() != n_s {
            return Err(Error::LengthMismatch { expected: n_s, got: u0.len() });
        }
        if grid.len() != n_s {
            return Err(Error::LengthMismatch { expected: n_s, got: grid.len() });
        }
        let mut b0 = RMat::zeros(self.config.n_c, n_s);
        for c in 0..self.config.n_c {
            for j in 0..n_s {
                b0[(c, j)] = self.p[(0, c)] * u0[j] + self.p[(1, c)] * grid[j];
            }
        }
        let r0 = b0.frob_norm();
        if r0 == 0.0 {
            return Err(Error::ZeroMatrix);
        }
        Ok((b0, r0))
    }

    pub fn apply_layer(&self, t: usize, a: &CMat) -> Result<CMat> {
        let cfg = self.config.qfl();
        let params = &self.layers[t];
        match self.config.variant {
            QflVariant::Classical => match params {
                QflParams::Classical { weights } => classical_fourier_layer(a, &cfg, weights),
                _ => Err(Error::ShapeMismatch("classical layer with non-classical params".into())),
            },
            QflVariant::Sequential => sequential_qfl(a, &cfg, params, UqftPath::Semantic),
            QflVariant::Parallel => match self.config.aggregation {
                ParallelAggregation::Linear => parallel_qfl(a, &cfg, params, RecombineRule::Linear),
                ParallelAggregation::Spectral => {
                    parallel_qfl(a, &cfg, params, RecombineRule::Spectral)
                }
                ParallelAggregation::Mean => {
                    parallel_mean(&parallel_branch_outputs(a, &cfg, params)?)
                }
            },
            QflVariant::Composite => composite_qfl(a, &cfg, params),
        }
    }

    pub fn forward_trace(&self, u0: &[f64], grid: &[f64]) -> Result<ForwardTrace> {
        let (b0, r0) = self.lift(u0, grid)?;
        let mut phi = RMat::zeros(D_IN, self.config.n_s);
        phi.row_mut(0).copy_from_slice(u0);
        phi.row_mut(1).copy_from_slice(grid);
        let t_layers = self.config.t_layers;
        let mut a = Vec::with_capacity(t_layers + 1);
        a.push(b0.to_complex().scale(Complex64::new(1.0 / r0, 0.0)));
        let mut l = Vec::with_capacity(t_layers);
        let mut s = Vec::with_capacity(t_layers);
        let mut r = Vec::with_capacity(t_layers);
        for t in 0..t_layers {
            let lt = self.apply_layer(t, &a[t])?;
            let st = apply_nonlinearity(&lt, self.config.nonlinearity);
            let rt = st.frob_norm();
            if rt == 0.0 {
                return Err(Error::ZeroMatrix);
            }
            a.push(st.scale(Complex64::new(1.0 / rt, 0.0)));
            l.push(lt);
            s.push(st);
            r.push(rt);
        }
        let last = &a[t_layers];
        let mut proj = vec![Complex64::ZERO; self.config.n_s];
        for (j, pr) in proj.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for i in 0..self.config.n_c {
                acc += self.q[i] * last[(i, j)];
            }
            *pr = r0 * acc;
        }
        let pred = proj.iter().map(|z| z.re).collect();
        Ok(ForwardTrace { phi, b0, r0, a, l, s, r, proj, pred })
    }

    pub fn predict(&self, u0: &[f64], grid: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward_trace(u0, grid)?.pred)
    }

    pub fn param_len(&self) -> usize {
        D_IN * self.config.n_c
            + self.layers.iter().map(|l| l.trainable_len()).sum::<usize>()
            + self.config.n_c
    }

    /// Fixed order: lift row-major, then each layer, then the readout.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_len());
        out.extend_from_slice(self.p.data());
        for layer in &self.layers {
            layer.collect_params(&mut out);
        }
        out.extend_from_slice(&self.q);
        out
    }

    pub fn set_flat_params(&mut self, vals: &[f64]) -> Result<()> {
        if vals.len() != self.param_len() {
            return Err(Error::LengthMismatch { expected: self.param_len(), got: vals.len() });
        }
        let mut it = vals.iter().copied();
        for x in self.p.data_mut() {
            *x = it.next().unwrap();
        }
        for layer in &mut self.layers {
            layer.assign_params(&mut it);
        }
        for x in &mut self.q {
            *x = it.next().unwrap();
        }
        Ok(())
    }
}

/// Everything the backward pass needs from one forward evaluation.
pub struct ForwardTrace {
    /// Lift input features: row 0 the field, row 1 the grid.
    pub phi: RMat,
    pub b0: RMat,
    pub r0: f64,
    /// t_layers + 1 unit-norm activations.
    pub a: Vec<CMat>,
    /// Raw layer outputs, before the nonlinearity.
    pub l: Vec<CMat>,
    /// Post-nonlinearity, before the norm reset.
    pub s: Vec<CMat>,
    /// Norm-reset divisors.
    pub r: Vec<f64>,
    /// Complex readout before taking the real part.
    pub proj: Vec<Complex64>,
    pub pred: Vec<f64>,
}

fn act(x: f64, nl: Nonlinearity) -> f64 {
    match nl {
        Nonlinearity::Gelu => {
            let u = (2.0 / std::f64::consts::PI).sqrt() * (x + 0.044715 * x * x * x);
            0.5 * x * (1.0 + u.tanh())
        }
        Nonlinearity::Relu => x.max(0.0),
        Nonlinearity::None => x,
    }
}

fn act_prime(x: f64, nl: Nonlinearity) -> f64 {
    match nl {
        Nonlinearity::Gelu => {
            let k = (2.0 / std::f64::consts::PI).sqrt();
            let u = k * (x + 0.044715 * x * x * x);
            let t = u.tanh();
            let du = k * (1.0 + 3.0 * 0.044715 * x * x);
            0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du
        }
        Nonlinearity::Relu => {
            if x > 0.0 {
                1.0
            } else {
                0.0
            }
        }
        Nonlinearity::None => 1.0,
    }
}

/// Applied to real and imaginary parts independently.
fn apply_nonlinearity(m: &CMat, nl: Nonlinearity) -> CMat {
    if nl == Nonlinearity::None {
        return m.clone();
    }
    let mut out = m.clone();
    for z in out.data_mut() {
        *z = Complex64::new(act(z.re, nl), act(z.im, nl));
    }
    out
}

/// ‖pred − target‖₂ / ‖target‖₂.
pub fn relative_l2(pred: &[f64], target: &[f64]) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(Error::LengthMismatch { expected: target.len(), got: pred.len() });
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (p, t) in pred.iter().zip(target) {
        num += (p - t) * (p - t);
        den += t * t;
    }
    if den == 0.0 {
        return Err(Error::ZeroTarget);
    }
    Ok((num / den).sqrt())
}

// ---------------------------------------------------------------------------
// Reverse-mode gradients
// ---------------------------------------------------------------------------

/// Per-layer gradient buffers at full slot length; frozen slots are dropped
/// when flattening.
enum LayerGrad {
    Classical(Vec<RMat>),
    PerMode(Vec<Vec<f64>>),
    Composite(Vec<f64>),
}

struct GradBuf {
    p: RMat,
    layers: Vec<LayerGrad>,
    q: Vec<f64>,
}

impl GradBuf {
    fn new(model: &QfnoModel) -> Self {
        let layers = model
            .layers
            .iter()
            .map(|l| match l {
                QflParams::Classical { weights } => LayerGrad::Classical(
                    weights.iter().map(|w| RMat::zeros(w.rows, w.cols)).collect(),
                ),
                QflParams::PerMode { layout, thetas, .. } => {
                    LayerGrad::PerMode(vec![vec![0.0; layout.slot_count()]; thetas.len()])
                }
                QflParams::Composite { layout, .. } => {
                    LayerGrad::Composite(vec![0.0; layout.slot_count()])
                }
            })
            .collect();
        GradBuf {
            p: RMat::zeros(D_IN, model.config.n_c),
            layers,
            q: vec![0.0; model.config.n_c],
        }
    }

    fn flatten(&self, model: &QfnoModel) -> Vec<f64> {
        let mut out = Vec::with_capacity(model.param_len());
        out.extend_from_slice(self.p.data());
        for (g, l) in self.layers.iter().zip(&model.layers) {
            match (g, l) {
                (LayerGrad::Classical(ws), _) => {
                    for w in ws {
                        out.extend_from_slice(w.data());
                    }
                }
                (LayerGrad::PerMode(gs), QflParams::PerMode { trainable, .. }) => {
                    for g in gs {
                        out.extend(g.iter().zip(trainable).filter(|(_, &m)| m).map(|(v, _)| *v));
                    }
                }
                (LayerGrad::Composite(g), QflParams::Composite { trainable, .. }) => {
                    out.extend(g.iter().zip(trainable).filter(|(_, &m)| m).map(|(v, _)| *v));
                }
                _ => unreachable!("gradient buffer shape follows the model"),
            }
        }
        out.extend_from_slice(&self.q);
        out
    }
}

/// Real inner product of complex matrices viewed as real vectors.
fn re_inner(a: &CMat, b: &CMat) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

/// Backward through y = B/r with r = ‖B‖: cot_B = cot_y/r − (⟨cot_y,B⟩/r³)·B,
/// plus `extra_r` from any other use of r (as cot_r·B/r).
fn normalize_backward(cot_y: &CMat, b: &CMat, r: f64, extra_r: f64) -> CMat {
    let inner = re_inner(cot_y, b);
    let mut out = cot_y.clone();
    let c1 = 1.0 / r;
    let c2 = inner / (r * r * r) - extra_r / r;
    for (o, bx) in out.data_mut().iter_mut().zip(b.data()) {
        *o = *o * c1 - *bx * c2;
    }
    out
}

/// One un-rotation step of the backward chain walk. `y` holds the state
/// after this rotation and is rewound to the state before it; `cot` is
/// pulled back and the angle gradient accumulated.
#[inline]
fn givens_step_backward(
    y: &mut [Complex64],
    cot: &mut [Complex64],
    iq: usize,
    ip: usize,
    c: f64,
    s: f64,
    g: &mut f64,
) {
    let (yq, yp) = (y[iq], y[ip]);
    let xq = c * yq - s * yp;
    let xp = s * yq + c * yp;
    y[iq] = xq;
    y[ip] = xp;
    let (cq, cp) = (cot[iq], cot[ip]);
    *g += (cq.conj() * (c * xp - s * xq) + cp.conj() * (-s * xp - c * xq)).re;
    cot[iq] = c * cq - s * cp;
    cot[ip] = s * cq + c * cp;
}

/// Backward through the full fwd+rev slot chain on a one-hot-sector vector.
/// `y` enters as the chain output and leaves as the chain input.
fn chain_backward(
    layout: &Layout,
    thetas: &[f64],
    y: &mut [Complex64],
    cot: &mut [Complex64],
    g: &mut [f64],
) {
    // Undo the reversed half (it ran slots m−1..0, so rewind 0..m−1), then
    // the forward half.
    for (k, (&(p, q), &th)) in layout.slots.iter().zip(thetas).enumerate() {
        let (s, c) = th.sin_cos();
        givens_step_backward(y, cot, q, p, c, s, &mut g[k]);
    }
    for (k, (&(p, q), &th)) in layout.slots.iter().zip(thetas).enumerate().rev() {
        let (s, c) = th.sin_cos();
        givens_step_backward(y, cot, q, p, c, s, &mut g[k]);
    }
}

fn chain_forward(layout: &Layout, thetas: &[f64], v: &mut [Complex64]) {
    crate::ortho::apply_chain(v, layout, thetas, false);
    crate::ortho::apply_chain(v, layout, thetas, true);
}

/// Two-hot-sector forward step, mirroring the simulator's rotation rule.
#[inline]
fn hw2_step_forward(n: usize, z: &mut [Complex64], p: usize, q: usize, c: f64, s: f64) {
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let iq = pair_index(n, r.min(q), r.max(q));
        let ip = pair_index(n, r.min(p), r.max(p));
        let (aq, ap) = rbs_rotate(c, s, z[iq], z[ip]);
        z[iq] = aq;
        z[ip] = ap;
    }
}

fn hw2_chain_forward(layout: &Layout, thetas: &[f64], z: &mut [Complex64]) {
    for (&(p, q), &th) in layout.slots.iter().zip(thetas) {
        let (s, c) = th.sin_cos();
        hw2_step_forward(layout.n, z, p, q, c, s);
    }
    for (&(p, q), &th) in layout.slots.iter().zip(thetas).rev() {
        let (s, c) = th.sin_cos();
        hw2_step_forward(layout.n, z, p, q, c, s);
    }
}

#[inline]
fn hw2_step_backward(
    n: usize,
    z: &mut [Complex64],
    cot: &mut [Complex64],
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    g: &mut f64,
) {
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let iq = pair_index(n, r.min(q), r.max(q));
        let ip = pair_index(n, r.min(p), r.max(p));
        givens_step_backward(z, cot, iq, ip, c, s, g);
    }
}

fn hw2_chain_backward(
    layout: &Layout,
    thetas: &[f64],
    z: &mut [Complex64],
    cot: &mut [Complex64],
    g: &mut [f64],
) {
    for (k, (&(p, q), &th)) in layout.slots.iter().zip(thetas).enumerate() {
        let (s, c) = th.sin_cos();
        hw2_step_backward(layout.n, z, cot, p, q, c, s, &mut g[k]);
    }
    for (k, (&(p, q), &th)) in layout.slots.iter().zip(thetas).enumerate().rev() {
        let (s, c) = th.sin_cos();
        hw2_step_backward(layout.n, z, cot, p, q, c, s, &mut g[k]);
    }
}

fn pad_col(col: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::ZERO; n];
    v[..col.len()].copy_from_slice(col);
    v
}

/// Backward through one mixing layer. Takes the layer input `a` and the
/// cotangent of the raw layer output; returns the cotangent of `a` and adds
/// parameter gradients to `g`.
fn layer_backward(model: &QfnoModel, t: usize, a: &CMat, cot_l: &CMat, g: &mut LayerGrad) -> CMat {
    let cfg = model.config.qfl();
    let k = cfg.k_modes;
    let n_c = cfg.n_c;
    let ahat = dft_rows(a, false);
    let cot_yhat = dft_rows(cot_l, false);
    let mut cot_ahat = CMat::zeros(n_c, cfg.n_s);

    // Untouched columns first; variant blocks may overwrite the mixed ones.
    match cfg.untouched {
        UntouchedModePolicy::Keep => {
            for j in k..cfg.n_s {
                cot_ahat.set_col(j, &cot_yhat.col(j));
            }
        }
        UntouchedModePolicy::Crop => {}
    }

    match (&model.layers[t], g) {
        (QflParams::Classical { weights }, LayerGrad::Classical(gw)) => {
            for j in 0..k {
                let mut col = vec![Complex64::ZERO; n_c];
                for b in 0..n_c {
                    let mut acc = Complex64::ZERO;
                    for i in 0..n_c {
                        let cy = cot_yhat[(i, j)];
                        gw[j][(i, b)] += (cy.conj() * ahat[(b, j)]).re;
                        acc += weights[j][(i, b)] * cy;
                    }
                    col[b] = acc;
                }
                // The weight-grad inner loop above runs once per (i,b) pair;
                // `acc` collected Wᵀ·cot on the fly.
                cot_ahat.set_col(j, &col);
            }
        }
        (QflParams::PerMode { layout, thetas, .. }, LayerGrad::PerMode(gt)) => {
            let mean = model.config.variant == QflVariant::Parallel
                && model.config.aggregation == ParallelAggregation::Mean;
            let kappa = 1.0 / k as f64;
            for j in 0..k {
                let mut y = pad_col(&ahat.col(j), layout.n);
                chain_forward(layout, &thetas[j], &mut y);
                let full_cot = pad_col(&cot_yhat.col(j), layout.n);
                let mut cot = if mean {
                    full_cot.iter().map(|z| z * kappa).collect()
                } else {
                    full_cot.clone()
                };
                chain_backward(layout, &thetas[j], &mut y, &mut cot, &mut gt[j]);
                let mut col: Vec<Complex64> = cot[..n_c].to_vec();
                if mean {
                    for (cc, fc) in col.iter_mut().zip(&full_cot) {
                        *cc += fc * (1.0 - kappa);
                    }
                }
                cot_ahat.set_col(j, &col);
            }
        }
        (QflParams::Composite { layout, thetas, .. }, LayerGrad::Composite(gt)) => {
            let m = layout.n;
            // Mixed columns ride the two-hot sector.
            for j in 0..k {
                let hot = n_c + j;
                let mut z = vec![Complex64::ZERO; pair_count(m)];
                let mut in_norm_sq = 0.0;
                for i in 0..n_c {
                    let v = ahat[(i, j)];
                    z[pair_index(m, i, hot)] = v;
                    in_norm_sq += v.norm_sqr();
                }
                hw2_chain_forward(layout, thetas, &mut z);
                let cot_out: Vec<Complex64> =
                    (0..n_c).map(|i| cot_yhat[(i, j)]).collect();
                let mut cot_z = vec![Complex64::ZERO; pair_count(m)];
                let mut extra = vec![Complex64::ZERO; n_c];
                if model.config.composite_renormalize && in_norm_sq > 0.0 {
                    let col: Vec<Complex64> =
                        (0..n_c).map(|i| z[pair_index(m, i, hot)]).collect();
                    let sel_norm_sq: f64 = col.iter().map(|v| v.norm_sqr()).sum();
                    if sel_norm_sq > 0.0 {
                        let in_norm = in_norm_sq.sqrt();
                        let sel_norm = sel_norm_sq.sqrt();
                        let scale = in_norm / sel_norm;
                        let cot_scale: f64 = cot_out
                            .iter()
                            .zip(&col)
                            .map(|(co, cv)| (co.conj() * cv).re)
                            .sum();
                        for i in 0..n_c {
                            cot_z[pair_index(m, i, hot)] = cot_out[i] * scale
                                - col[i] * (cot_scale * scale / sel_norm_sq);
                            extra[i] = ahat[(i, j)] * (cot_scale / (in_norm * sel_norm));
                        }
                    }
                } else {
                    for i in 0..n_c {
                        cot_z[pair_index(m, i, hot)] = cot_out[i];
                    }
                }
                hw2_chain_backward(layout, thetas, &mut z, &mut cot_z, gt);
                let col: Vec<Complex64> = (0..n_c)
                    .map(|i| cot_z[pair_index(m, i, hot)] + extra[i])
                    .collect();
                cot_ahat.set_col(j, &col);
            }
            // Untouched columns ride the one-hot sector of the same block.
            if cfg.untouched == UntouchedModePolicy::Keep {
                for j in k..cfg.n_s {
                    let mut y = pad_col(&ahat.col(j), m);
                    chain_forward(layout, thetas, &mut y);
                    let mut cot = pad_col(&cot_yhat.col(j), m);
                    chain_backward(layout, thetas, &mut y, &mut cot, gt);
                    cot_ahat.set_col(j, &cot[..n_c].to_vec());
                }
            }
        }
        _ => unreachable!("gradient buffer shape follows the model"),
    }
    dft_rows(&cot_ahat, true)
}

fn backward_sample(model: &QfnoModel, trace: &ForwardTrace, cot_pred: &[f64], g: &mut GradBuf) {
    let n_c = model.config.n_c;
    let n_s = model.config.n_s;
    let t_layers = model.config.t_layers;
    let r0 = trace.r0;
    let last = &trace.a[t_layers];

    let mut cot_a = CMat::zeros(n_c, n_s);
    for j in 0..n_s {
        let cpj = cot_pred[j];
        for i in 0..n_c {
            g.q[i] += cpj * r0 * last[(i, j)].re;
            cot_a[(i, j)] = Complex64::new(cpj * r0 * model.q[i], 0.0);
        }
    }
    // pred = r0·Re(qᵀa_T): r0 also enters directly.
    let cot_r0_direct: f64 =
        cot_pred.iter().zip(&trace.pred).map(|(c, p)| c * p / r0).sum();

    for t in (0..t_layers).rev() {
        let cot_s = normalize_backward(&cot_a, &trace.s[t], trace.r[t], 0.0);
        let mut cot_l = cot_s;
        if model.config.nonlinearity != Nonlinearity::None {
            for (cz, lz) in cot_l.data_mut().iter_mut().zip(trace.l[t].data()) {
                *cz = Complex64::new(
                    cz.re * act_prime(lz.re, model.config.nonlinearity),
                    cz.im * act_prime(lz.im, model.config.nonlinearity),
                );
            }
        }
        cot_a = layer_backward(model, t, &trace.a[t], &cot_l, &mut g.layers[t]);
    }

    let b0c = trace.b0.to_complex();
    let cot_b0 = normalize_backward(&cot_a, &b0c, r0, cot_r0_direct);
    g.apply_lift_grad(model, trace, &cot_b0);
}

impl GradBuf {
    /// b0 = Pᵀ·Φ, so gP[d][c] += Σ_j Φ[d,j]·Re(cot_b0[c,j]).
    fn apply_lift_grad(&mut self, model: &QfnoModel, trace: &ForwardTrace, cot_b0: &CMat) {
        let phi = &trace.phi;
        for d in 0..D_IN {
            for c in 0..model.config.n_c {
                let mut acc = 0.0;
                for j in 0..model.config.n_s {
                    acc += phi[(d, j)] * cot_b0[(c, j)].re;
                }
                self.p[(d, c)] += acc;
            }
        }
    }
}

/// Mean squared relative error over the index set, with its gradient in
/// `flat_params` order.
pub fn grad_batch(model: &QfnoModel, ds: &Dataset, idx: &[usize]) -> Result<(f64, Vec<f64>)> {
    if idx.is_empty() {
        return Err(Error::LengthMismatch { expected: 1, got: 0 });
    }
    let mut buf = GradBuf::new(model);
    let mut loss = 0.0;
    let inv_b = 1.0 / idx.len() as f64;
    for &i in idx {
        let trace = model.forward_trace(&ds.inputs[i], &ds.grid)?;
        let y = &ds.targets[i];
        if y.len() != trace.pred.len() {
            return Err(Error::LengthMismatch { expected: trace.pred.len(), got: y.len() });
        }
        let ynorm_sq: f64 = y.iter().map(|v| v * v).sum();
        if ynorm_sq == 0.0 {
            return Err(Error::ZeroTarget);
        }
        let mut cot_pred = vec![0.0; y.len()];
        let mut err_sq = 0.0;
        for j in 0..y.len() {
            let d = trace.pred[j] - y[j];
            err_sq += d * d;
            cot_pred[j] = 2.0 * d * inv_b / ynorm_sq;
        }
        loss += err_sq / ynorm_sq * inv_b;
        backward_sample(model, &trace, &cot_pred, &mut buf);
    }
    if !loss.is_finite() {
        return Err(Error::NonFiniteLoss(loss));
    }
    Ok((loss, buf.flatten(model)))
}

/// Loss only, for finite-difference cross-checks.
pub fn batch_loss(model: &QfnoModel, ds: &Dataset, idx: &[usize]) -> Result<f64> {
    if idx.is_empty() {
        return Err(Error::LengthMismatch { expected: 1, got: 0 });
    }
    let mut loss = 0.0;
    let inv_b = 1.0 / idx.len() as f64;
    for &i in idx {
        let trace = model.forward_trace(&ds.inputs[i], &ds.grid)?;
        let y = &ds.targets[i];
        let ynorm_sq: f64 = y.iter().map(|v| v * v).sum();
        if ynorm_sq == 0.0 {
            return Err(Error::ZeroTarget);
        }
        let err_sq: f64 =
            trace.pred.iter().zip(y).map(|(p, t)| (p - t) * (p - t)).sum();
        loss += err_sq / ynorm_sq * inv_b;
    }
    if !loss.is_finite() {
        return Err(Error::NonFiniteLoss(loss));
    }
    Ok(loss)
}

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, serde::Serialize)]
pub struct EpochStat {
    pub epoch: usize,
    pub train_loss: f64,
    pub test_rel_err: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TrainReport {
    pub epochs: Vec<EpochStat>,
    pub final_train_loss: f64,
    pub final_test_rel_err: f64,
    /// ‖imaginary readout‖ / ‖real readout‖ over the test set; should stay
    /// small when the learned operator is effectively real.
    pub imag_residue: f64,
    pub total_seconds: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct EvalReport {
    pub rel_err_mean: f64,
    pub imag_residue: f64,
    pub per_sample: Vec<f64>,
}

pub fn evaluate(model: &QfnoModel, ds: &Dataset) -> Result<EvalReport> {
    if ds.inputs.is_empty() {
        return Err(Error::LengthMismatch { expected: 1, got: 0 });
    }
    let mut per_sample = Vec::with_capacity(ds.inputs.len());
    let mut imag_num = 0.0;
    let mut real_den = 0.0;
    for (u0, y) in ds.inputs.iter().zip(&ds.targets) {
        let trace = model.forward_trace(u0, &ds.grid)?;
        per_sample.push(relative_l2(&trace.pred, y)?);
        imag_num += trace.proj.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
        real_den += trace.proj.iter().map(|z| z.re * z.re).sum::<f64>().sqrt();
    }
    let rel_err_mean = per_sample.iter().sum::<f64>() / per_sample.len() as f64;
    Ok(EvalReport { rel_err_mean, imag_residue: imag_num / real_den.max(1e-300), per_sample })
}

/// Adam with the usual bias correction; β₁ = 0.9, β₂ = 0.999, ε = 1e−8.
pub fn train(
    model: &mut QfnoModel,
    train_set: &Dataset,
    test_set: &Dataset,
    mut on_epoch: impl FnMut(&EpochStat),
) -> Result<TrainReport> {
    if train_set.inputs.is_empty() {
        return Err(Error::LengthMismatch { expected: 1, got: 0 });
    }
    if train_set.grid.len() != model.config.n_s {
        return Err(Error::ShapeMismatch(format!(
            "dataset resolution {} does not match model n_s {}",
            train_set.grid.len(),
            model.config.n_s
        )));
    }
    let (beta1, beta2, eps): (f64, f64, f64) = (0.9, 0.999, 1e-8);
    let lr = model.config.learning_rate;
    let batch = model.config.batch_size.max(1);
    let mut params = model.flat_params();
    let mut m = vec![0.0; params.len()];
    let mut v = vec![0.0; params.len()];
    let mut step = 0u64;
    let mut rng = ChaCha8Rng::seed_from_u64(model.config.seed ^ SHUFFLE_SALT);
    let mut indices: Vec<usize> = (0..train_set.inputs.len()).collect();
    let start = Instant::now();
    let mut epochs = Vec::with_capacity(model.config.epochs);
    for epoch in 0..model.config.epochs {
        let tick = Instant::now();
        indices.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        for chunk in indices.chunks(batch) {
            let (loss, grad) = grad_batch(model, train_set, chunk)?;
            loss_sum += loss;
            batches += 1;
            step += 1;
            let bc1 = 1.0 - beta1.powi(step as i32);
            let bc2 = 1.0 - beta2.powi(step as i32);
            for i in 0..params.len() {
                m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
                v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
                params[i] -= lr * (m[i] / bc1) / ((v[i] / bc2).sqrt() + eps);
            }
            model.set_flat_params(&params)?;
        }
        let train_loss = loss_sum / batches.max(1) as f64;
        let test_rel_err = if test_set.inputs.is_empty() {
            f64::NAN
        } else {
            evaluate(model, test_set)?.rel_err_mean
        };
        let stat = EpochStat {
            epoch,
            train_loss,
            test_rel_err,
            seconds: tick.elapsed().as_secs_f64(),
        };
        on_epoch(&stat);
        epochs.push(stat);
    }
    let final_train_loss = epochs.last().map(|e| e.train_loss).unwrap_or(f64::NAN);
    let final_test_rel_err = epochs.last().map(|e| e.test_rel_err).unwrap_or(f64::NAN);
    let imag_residue = if test_set.inputs.is_empty() {
        0.0
    } else {
        evaluate(model, test_set)?.imag_residue
    };
    Ok(TrainReport {
        epochs,
        final_train_loss,
        final_test_rel_err,
        imag_residue,
        total_seconds: start.elapsed().as_secs_f64(),
    })
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

#[derive(serde::Deserialize)]
struct VersionProbe {
    schema_version: u64,
}

#[derive(serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDocument {
    schema_version: u64,
    config: QfnoConfig,
    p: Vec<Vec<f64>>,
    layers: Vec<LayerDocument>,
    q: Vec<f64>,
}

#[derive(serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
enum LayerDocument {
    Classical { weights: Vec<Vec<Vec<f64>>> },
    PerMode { thetas: Vec<Vec<f64>> },
    Composite { thetas: Vec<f64> },
}

pub fn save_model(model: &QfnoModel, path: &Path) -> Result<()> {
    let p = (0..D_IN).map(|d| model.p.row(d).to_vec()).collect();
    let layers = model
        .layers
        .iter()
        .map(|l| match l {
            QflParams::Classical { weights } => LayerDocument::Classical {
                weights: weights
                    .iter()
                    .map(|w| (0..w.rows).map(|r| w.row(r).to_vec()).collect())
                    .collect(),
            },
            QflParams::PerMode { thetas, .. } => {
                LayerDocument::PerMode { thetas: thetas.clone() }
            }
            QflParams::Composite { thetas, .. } => {
                LayerDocument::Composite { thetas: thetas.clone() }
            }
        })
        .collect();
    let doc = ModelDocument {
        schema_version: SCHEMA_VERSION,
        config: model.config.clone(),
        p,
        layers,
        q: model.q.clone(),
    };
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::MalformedDocument(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<QfnoModel> {
    let text = std::fs::read_to_string(path)?;
    let probe: VersionProbe = serde_json::from_str(&text)
        .map_err(|e| Error::MalformedDocument(format!("no readable schema_version: {e}")))?;
    if probe.schema_version != SCHEMA_VERSION {
        return Err(Error::SchemaVersionMismatch {
            found: probe.schema_version,
            supported: SCHEMA_VERSION,
        });
    }
    let doc: ModelDocument =
        serde_json::from_str(&text).map_err(|e| Error::MalformedDocument(e.to_string()))?;
    doc_to_model(doc)
}

fn doc_to_model(doc: ModelDocument) -> Result<QfnoModel> {
    let config = doc.config;
    config.validate()?;
    let bad = |msg: String| Error::MalformedDocument(msg);
    if doc.p.len() != D_IN || doc.p.iter().any(|r| r.len() != config.n_c) {
        return Err(bad(format!("lift must be {}×{}", D_IN, config.n_c)));
    }
    if doc.q.len() != config.n_c {
        return Err(bad(format!("readout must have length {}", config.n_c)));
    }
    if doc.layers.len() != config.t_layers {
        return Err(bad(format!("expected {} layers, found {}", config.t_layers, doc.layers.len())));
    }
    let qfl_cfg = config.qfl();
    let mut layers = Vec::with_capacity(doc.layers.len());
    for layer in doc.layers {
        let built = match (config.variant, layer) {
            (QflVariant::Classical, LayerDocument::Classical { weights }) => {
                if weights.len() != config.k_modes {
                    return Err(bad("wrong weight count for classical layer".into()));
                }
                let mut ws = Vec::with_capacity(weights.len());
                for w in weights {
                    if w.len() != config.n_c || w.iter().any(|r| r.len() != config.n_c) {
                        return Err(bad(format!("mode weights must be {0}×{0}", config.n_c)));
                    }
                    ws.push(RMat::from_rows(w));
                }
                QflParams::Classical { weights: ws }
            }
            (QflVariant::Sequential | QflVariant::Parallel, LayerDocument::PerMode { thetas }) => {
                let (layout, trainable) = qfl_cfg.mode_layout()?;
                if thetas.len() != config.k_modes
                    || thetas.iter().any(|t| t.len() != layout.slot_count())
                {
                    return Err(bad("angle vectors do not match the layer layout".into()));
                }
                QflParams::PerMode { layout, thetas, trainable }
            }
            (QflVariant::Composite, LayerDocument::Composite { thetas }) => {
                let (layout, trainable) = qfl_cfg.composite_layout()?;
                if thetas.len() != layout.slot_count() {
                    return Err(bad("angle vector does not match the composite layout".into()));
                }
                QflParams::Composite { layout, thetas, trainable }
            }
            _ => return Err(bad("layer parameter kind does not match the variant".into())),
        };
        layers.push(built);
    }
    let mut p = RMat::zeros(D_IN, config.n_c);
    for (d, row) in doc.p.iter().enumerate() {
        p.row_mut(d).copy_from_slice(row);
    }
    Ok(QfnoModel { config, p, layers, q: doc.q })
}
