//! Seeded self-check suites.
//!
//! Each suite replays a fixed set of invariants with hard-coded seeds and
//! reports the worst residual per property, so a binary can re-verify its own
//! numerics on any host. Suites: `core` (restricted simulators vs the dense
//! reference), `uqft` (transform circuits), `layers` (orthogonal blocks and
//! compounds), `equiv` (layer variants against the dense baseline), `grad`
//! (analytic gradients vs finite differences), and `all`.

use crate::error::{Error, Result};
use crate::mat::{CMat, RMat};
use crate::ortho::{
    apply_chain, build_controlled_param, build_param_circuit, build_reversed, compound_order2,
    unary_weight, z_index_set, Layout,
};
use crate::pde::{unit_grid, Dataset, DatasetMeta, GrfSpec};
use crate::qfl::{
    classical_fourier_layer, composite_qfl, parallel_qfl, sequential_qfl, QflParams, QflVariant,
    RecombineRule,
};
use crate::qfno::{batch_loss, grad_batch, ParallelAggregation, QfnoConfig, QfnoModel};
use crate::subspace::{
    dense_reference_sim, index_pair, pair_count, pair_index, restricted_matrix, Circuit, Gate,
    Hw2State, PairState, Register, Sector, UnaryState,
};
use crate::uqft::{apply_uqft_rows, build_uqft, dft_matrix, dft_vec_inplace, UqftPath};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, serde::Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    pub max_residual: f64,
    pub detail: String,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub results: Vec<PropertyResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

pub const SUITES: &[&str] = &["core", "uqft", "layers", "equiv", "grad"];

pub fn run_suite(name: &str) -> Result<Vec<SuiteReport>> {
    match name {
        "core" => Ok(vec![core_suite()?]),
        "uqft" => Ok(vec![uqft_suite()?]),
        "layers" => Ok(vec![layers_suite()?]),
        "equiv" => Ok(vec![equiv_suite()?]),
        "grad" => Ok(vec![grad_suite()?]),
        "all" => Ok(vec![
            core_suite()?,
            uqft_suite()?,
            layers_suite()?,
            equiv_suite()?,
            grad_suite()?,
        ]),
        other => Err(Error::MalformedDocument(format!(
            "unknown verify suite {other:?} (expected one of core, uqft, layers, equiv, grad, all)"
        ))),
    }
}

fn prop(name: &str, tol: f64, max_residual: f64, detail: String) -> PropertyResult {
    PropertyResult {
        name: name.into(),
        passed: max_residual.is_finite() && max_residual <= tol,
        max_residual,
        detail: format!("{detail}; tol {tol:.1e}"),
    }
}

fn random_unit(rng: &mut impl Rng, dim: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

fn random_unit_cmat(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat {
    let m = CMat::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let norm = m.frob_norm();
    m.scale(Complex64::new(1.0 / norm, 0.0))
}

fn random_single_circuit(n: usize, gates: usize, rng: &mut impl Rng) -> Circuit {
    let mut circ = Circuit::single(n);
    for _ in 0..gates {
        match rng.random_range(0..3) {
            0 => {
                let p = rng.random_range(0..n);
                let mut q = rng.random_range(0..n);
                while q == p {
                    q = rng.random_range(0..n);
                }
                circ.push(Gate::rbs(Register::Top, p, q, rng.random_range(-3.0..3.0)));
            }
            1 => {
                let phi = Complex64::from_polar(1.0, rng.random_range(-3.0..3.0));
                circ.push(Gate::phase(Register::Top, rng.random_range(0..n), phi));
            }
            _ => circ.push(Gate::z(Register::Top, rng.random_range(0..n))),
        }
    }
    circ
}

fn random_pair_circuit(n_top: usize, n_bot: usize, gates: usize, rng: &mut impl Rng) -> Circuit {
    let mut circ = Circuit::pair(n_top, n_bot);
    for _ in 0..gates {
        let (reg, n) = if rng.random_range(0..2) == 0 {
            (Register::Top, n_top)
        } else {
            (Register::Bottom, n_bot)
        };
        match rng.random_range(0..4) {
            0 | 1 => {
                let p = rng.random_range(0..n);
                let mut q = rng.random_range(0..n);
                while q == p {
                    q = rng.random_range(0..n);
                }
                circ.push(Gate::rbs(reg, p, q, rng.random_range(-3.0..3.0)));
            }
            2 => {
                let phi = Complex64::from_polar(1.0, rng.random_range(-3.0..3.0));
                circ.push(Gate::phase(reg, rng.random_range(0..n), phi));
            }
            _ => {
                let targets: Vec<usize> = (0..n_top).filter(|_| rng.random_range(0..2) == 0).collect();
                circ.push(Gate::AntiControlledZ { control: rng.random_range(0..n_bot), targets });
            }
        }
    }
    circ
}

// ---------------------------------------------------------------------------
// core: restricted simulators against the dense oracle
// ---------------------------------------------------------------------------

fn core_suite() -> Result<SuiteReport> {
    let mut results = Vec::new();
    let n = 6;
    let dim = 1usize << n;

    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    let mut worst_norm = 0.0f64;
    for _ in 0..25 {
        let circ = random_single_circuit(n, 40, &mut rng);
        let amps = random_unit(&mut rng, n);
        let mut state = UnaryState::from_amps(amps.clone());
        state.apply_circuit(&circ)?;
        let mut dense_in = vec![Complex64::ZERO; dim];
        for (i, &a) in amps.iter().enumerate() {
            dense_in[1 << i] = a;
        }
        let dense_out = dense_reference_sim(&circ, &dense_in)?;
        for i in 0..n {
            worst = worst.max((state.amps[i] - dense_out[1 << i]).norm());
        }
        worst_norm = worst_norm.max((state.norm() - 1.0).abs());
    }
    results.push(prop(
        "one_hot_sim_matches_dense",
        1e-12,
        worst,
        format!("25 random circuits, {n} qubits, 40 gates each"),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst2 = 0.0f64;
    for _ in 0..25 {
        let circ = random_single_circuit(n, 40, &mut rng);
        let pdim = pair_count(n);
        let amps = random_unit(&mut rng, pdim);
        let mut state = Hw2State::new(n)?;
        state.amps.copy_from_slice(&amps);
        state.apply_circuit(&circ)?;
        let mut dense_in = vec![Complex64::ZERO; dim];
        for (k, &a) in amps.iter().enumerate() {
            let (p, q) = index_pair(n, k);
            dense_in[(1 << p) | (1 << q)] = a;
        }
        let dense_out = dense_reference_sim(&circ, &dense_in)?;
        for k in 0..pdim {
            let (p, q) = index_pair(n, k);
            worst2 = worst2.max((state.amps[k] - dense_out[(1 << p) | (1 << q)]).norm());
        }
        worst_norm = worst_norm.max((state.norm() - 1.0).abs());
    }
    results.push(prop(
        "two_hot_sim_matches_dense",
        1e-12,
        worst2,
        format!("25 random circuits, {n} qubits, 40 gates each"),
    ));

    let (n_top, n_bot) = (3, 3);
    let total = n_top + n_bot;
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst3 = 0.0f64;
    for _ in 0..25 {
        let circ = random_pair_circuit(n_top, n_bot, 40, &mut rng);
        let flat = random_unit(&mut rng, n_top * n_bot);
        let amps = CMat::from_fn(n_top, n_bot, |i, j| flat[i * n_bot + j]);
        let mut state = PairState::from_amps(amps.clone());
        state.apply_circuit(&circ)?;
        let mut dense_in = vec![Complex64::ZERO; 1 << total];
        for i in 0..n_top {
            for j in 0..n_bot {
                dense_in[(1 << i) | (1 << (n_top + j))] = amps[(i, j)];
            }
        }
        let dense_out = dense_reference_sim(&circ, &dense_in)?;
        for i in 0..n_top {
            for j in 0..n_bot {
                worst3 = worst3
                    .max((state.amps[(i, j)] - dense_out[(1 << i) | (1 << (n_top + j))]).norm());
            }
        }
        worst_norm = worst_norm.max((state.norm() - 1.0).abs());
    }
    results.push(prop(
        "register_pair_sim_matches_dense",
        1e-12,
        worst3,
        format!("25 random circuits, {n_top}+{n_bot} qubits with anti-controlled Z"),
    ));

    results.push(prop(
        "norms_preserved",
        1e-12,
        worst_norm,
        "all sector states above stay normalized".into(),
    ));

    let mut index_bad = 0.0f64;
    for m in 2..=12usize {
        for k in 0..pair_count(m) {
            let (p, q) = index_pair(m, k);
            if pair_index(m, p, q) != k || p >= q || q >= m {
                index_bad += 1.0;
            }
        }
    }
    results.push(prop(
        "pair_indexing_is_a_bijection",
        0.0,
        index_bad,
        "index/pair round trip for 2..=12 qubits".into(),
    ));

    Ok(SuiteReport { suite: "core".into(), results })
}

// ---------------------------------------------------------------------------
// uqft: transform circuits against the closed-form matrix
// ---------------------------------------------------------------------------

fn uqft_suite() -> Result<SuiteReport> {
    let mut results = Vec::new();

    let mut worst = 0.0f64;
    for n in [2usize, 4, 8, 16, 32] {
        let fwd_circ = build_uqft(n, false)?;
        let fwd = restricted_matrix(fwd_circ.as_ref(), Sector::Hw1)?;
        // The ladder acts on bit-reversed inputs; the permutation is its own
        // inverse, so column k of the composite is circuit column perm[k].
        let perm = crate::uqft::bit_reversal_permutation(n)?;
        let composite = CMat::from_fn(n, n, |r, k| fwd[(r, perm[k])]);
        let want = dft_matrix(n).unitary();
        worst = worst.max(composite.max_abs_diff(&want));
        let inv_circ = build_uqft(n, true)?;
        let inv = restricted_matrix(inv_circ.as_ref(), Sector::Hw1)?;
        worst = worst.max(inv.max_abs_diff(&fwd.adjoint()));
    }
    results.push(prop(
        "circuit_matches_transform_matrix",
        1e-10,
        worst,
        "ladder after bit reversal, forward and adjoint, 2..=32 lines".into(),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(201);
    let mut worst_path = 0.0f64;
    for _ in 0..10 {
        let flat = random_unit(&mut rng, 4 * 8);
        let state = PairState::from_amps(CMat::from_fn(4, 8, |i, j| flat[i * 8 + j]));
        for inverse in [false, true] {
            let a = apply_uqft_rows(&state, inverse, UqftPath::Semantic)?;
            let b = apply_uqft_rows(&state, inverse, UqftPath::Gate)?;
            worst_path = worst_path.max(a.max_abs_diff(&b));
        }
    }
    results.push(prop(
        "gate_path_matches_semantic_path",
        1e-10,
        worst_path,
        "10 random 4×8 pair states, both directions".into(),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst_inv = 0.0f64;
    let mut worst_norm = 0.0f64;
    for _ in 0..20 {
        let v = random_unit(&mut rng, 32);
        let mut w = v.clone();
        dft_vec_inplace(&mut w, false);
        worst_norm = worst_norm.max((w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs());
        dft_vec_inplace(&mut w, true);
        for (a, b) in v.iter().zip(&w) {
            worst_inv = worst_inv.max((a - b).norm());
        }
    }
    results.push(prop(
        "transform_is_unitary",
        1e-12,
        worst_inv.max(worst_norm),
        "norm preservation and round trip, 20 random vectors of 32".into(),
    ));

    Ok(SuiteReport { suite: "uqft".into(), results })
}

// ---------------------------------------------------------------------------
// layers: orthogonal blocks, controlled blocks, compounds
// ---------------------------------------------------------------------------

fn layers_suite() -> Result<SuiteReport> {
    let mut results = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(301);

    let layouts = [Layout::butterfly(8)?, Layout::pyramid(6)?];
    let mut worst_ortho = 0.0f64;
    let mut worst_chain = 0.0f64;
    let mut worst_circ = 0.0f64;
    for layout in &layouts {
        for _ in 0..10 {
            let thetas: Vec<f64> =
                (0..layout.slot_count()).map(|_| rng.random_range(-3.0..3.0)).collect();
            let w = unary_weight(layout, &thetas)?;
            let gram = w.transpose().matmul(&w);
            worst_ortho = worst_ortho.max(gram.max_abs_diff(&RMat::identity(layout.n)));

            let v = random_unit(&mut rng, layout.n);
            let mut chained = v.clone();
            apply_chain(&mut chained, layout, &thetas, false);
            apply_chain(&mut chained, layout, &thetas, true);
            for i in 0..layout.n {
                let mut want = Complex64::ZERO;
                for k in 0..layout.n {
                    want += w[(i, k)] * v[k];
                }
                worst_chain = worst_chain.max((chained[i] - want).norm());
            }

            let mut circ = build_param_circuit(layout, &thetas)?;
            circ.extend(build_reversed(layout, &thetas)?.gates);
            let m = restricted_matrix(&circ, Sector::Hw1)?;
            worst_circ = worst_circ.max(m.max_abs_diff(&w.to_complex()));
        }
    }
    results.push(prop(
        "effective_weight_is_orthogonal",
        1e-12,
        worst_ortho,
        "butterfly(8) and pyramid(6), 10 draws each".into(),
    ));
    results.push(prop(
        "chain_matches_effective_weight",
        1e-12,
        worst_chain,
        "vector chain vs explicit matrix".into(),
    ));
    results.push(prop(
        "circuit_block_matches_effective_weight",
        1e-12,
        worst_circ,
        "one-hot restriction of the doubled block".into(),
    ));

    let mut zbad = 0.0f64;
    for layout in &layouts {
        let zset = z_index_set(layout)?;
        if zset.len() != layout.n / 2 {
            zbad += 1.0;
        }
        let mut seen = vec![false; layout.n];
        for &i in &zset {
            if i >= layout.n || seen[i] {
                zbad += 1.0;
            } else {
                seen[i] = true;
            }
        }
    }
    results.push(prop(
        "z_index_set_is_half_sized",
        0.0,
        zbad,
        "distinct in-range indices, n/2 of them".into(),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(302);
    let layout = Layout::butterfly(4)?;
    let mut worst_ctrl = 0.0f64;
    for _ in 0..10 {
        let thetas: Vec<f64> =
            (0..layout.slot_count()).map(|_| rng.random_range(-3.0..3.0)).collect();
        let w = unary_weight(&layout, &thetas)?;
        let n_bot = 4;
        let control = rng.random_range(0..n_bot);
        let flat = random_unit(&mut rng, layout.n * n_bot);
        let amps = CMat::from_fn(layout.n, n_bot, |i, j| flat[i * n_bot + j]);
        let mut state = PairState::from_amps(amps.clone());
        state.apply_circuit(&build_controlled_param(&layout, &thetas, n_bot, control)?)?;
        for j in 0..n_bot {
            for i in 0..layout.n {
                let want = if j == control {
                    let mut acc = Complex64::ZERO;
                    for k in 0..layout.n {
                        acc += w[(i, k)] * amps[(k, j)];
                    }
                    acc
                } else {
                    amps[(i, j)]
                };
                worst_ctrl = worst_ctrl.max((state.amps[(i, j)] - want).norm());
            }
        }
    }
    results.push(prop(
        "controlled_block_hits_only_its_column",
        1e-12,
        worst_ctrl,
        "10 draws, 4×4 pair states".into(),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let pyr = Layout::pyramid(5)?;
    let mut worst_mult = 0.0f64;
    let mut worst_compound = 0.0f64;
    for _ in 0..10 {
        let t1: Vec<f64> = (0..pyr.slot_count()).map(|_| rng.random_range(-3.0..3.0)).collect();
        let t2: Vec<f64> = (0..pyr.slot_count()).map(|_| rng.random_range(-3.0..3.0)).collect();
        let w1 = unary_weight(&pyr, &t1)?;
        let w2 = unary_weight(&pyr, &t2)?;
        let lhs = compound_order2(&w1.matmul(&w2));
        let rhs = compound_order2(&w1).matmul(&compound_order2(&w2));
        worst_mult = worst_mult.max(lhs.max_abs_diff(&rhs));

        let mut circ = build_param_circuit(&pyr, &t1)?;
        circ.extend(build_reversed(&pyr, &t1)?.gates);
        let two_hot = restricted_matrix(&circ, Sector::Hw2)?;
        worst_compound = worst_compound.max(two_hot.max_abs_diff(&compound_order2(&w1).to_complex()));
    }
    results.push(prop(
        "compound_is_multiplicative",
        1e-12,
        worst_mult,
        "order-2 compounds of 5-line orthogonals".into(),
    ));
    results.push(prop(
        "two_hot_block_is_the_compound",
        1e-12,
        worst_compound,
        "nearest-neighbor layouts only; strided layouts pick up sign flips".into(),
    ));

    Ok(SuiteReport { suite: "layers".into(), results })
}

// ---------------------------------------------------------------------------
// equiv: layer variants against the dense baseline
// ---------------------------------------------------------------------------

fn equiv_suite() -> Result<SuiteReport> {
    let mut results = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(401);
    let mut worst_seq = 0.0f64;
    let mut worst_par = 0.0f64;
    for (n_c, n_s, k) in [(2usize, 8usize, 3usize), (3, 8, 4), (4, 4, 2), (5, 16, 6)] {
        let cfg = crate::qfl::QflConfig::new(n_c, n_s, k);
        let params = QflParams::init(&cfg, QflVariant::Sequential, &mut rng)?;
        let (layout, thetas) = match &params {
            QflParams::PerMode { layout, thetas, .. } => (layout.clone(), thetas.clone()),
            _ => unreachable!(),
        };
        let weights: Vec<RMat> = thetas
            .iter()
            .map(|t| {
                let w = unary_weight(&layout, t)?;
                Ok(RMat::from_fn(n_c, n_c, |i, j| w[(i, j)]))
            })
            .collect::<Result<_>>()?;
        let a = random_unit_cmat(&mut rng, n_c, n_s);
        let seq = sequential_qfl(&a, &cfg, &params, UqftPath::Semantic)?;
        let base = classical_fourier_layer(&a, &cfg, &weights)?;
        worst_seq = worst_seq.max(seq.max_abs_diff(&base));
        for rule in [RecombineRule::Linear, RecombineRule::Spectral] {
            let par = parallel_qfl(&a, &cfg, &params, rule)?;
            worst_par = worst_par.max(par.max_abs_diff(&seq));
        }
    }
    results.push(prop(
        "restricted_layer_matches_dense_baseline",
        1e-10,
        worst_seq,
        "matched block weights, 4 shapes up to 5×16".into(),
    ));
    results.push(prop(
        "branch_recombinations_match_the_single_circuit",
        1e-10,
        worst_par,
        "linear and spectral rules".into(),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(402);
    let cfg = crate::qfl::QflConfig::new(2, 4, 2);
    let params = QflParams::init(&cfg, QflVariant::Sequential, &mut rng)?;
    let mut worst_gate = 0.0f64;
    for _ in 0..5 {
        let a = random_unit_cmat(&mut rng, 2, 4);
        let sem = sequential_qfl(&a, &cfg, &params, UqftPath::Semantic)?;
        let gate = sequential_qfl(&a, &cfg, &params, UqftPath::Gate)?;
        worst_gate = worst_gate.max(sem.max_abs_diff(&gate));
    }
    results.push(prop(
        "gate_path_matches_semantic_layer",
        1e-10,
        worst_gate,
        "explicit two-register circuit, 2×4 activations".into(),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(403);
    let cfg = crate::qfl::QflConfig::new(3, 8, 2);
    let (layout, _) = cfg.composite_layout()?;
    let params = QflParams::Composite {
        thetas: vec![0.0; layout.slot_count()],
        trainable: vec![true; layout.slot_count()],
        layout,
    };
    let mut worst_id = 0.0f64;
    for _ in 0..5 {
        let a = random_unit_cmat(&mut rng, 3, 8);
        let out = composite_qfl(&a, &cfg, &params)?;
        worst_id = worst_id.max(out.max_abs_diff(&a));
    }
    results.push(prop(
        "composite_block_at_zero_angles_is_identity",
        1e-12,
        worst_id,
        "post-selection keeps the input column exactly".into(),
    ));

    Ok(SuiteReport { suite: "equiv".into(), results })
}

// ---------------------------------------------------------------------------
// grad: analytic gradients against central finite differences
// ---------------------------------------------------------------------------

fn synthetic_dataset(n_samples: usize, resolution: usize, seed: u64) -> Result<Dataset> {
    let grf = GrfSpec::default();
    let mut inputs = Vec::with_capacity(n_samples);
    let mut targets = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        inputs.push(crate::pde::grf_sample(resolution, &grf, &mut rng)?);
        targets.push(crate::pde::grf_sample(resolution, &grf, &mut rng)?);
    }
    Ok(Dataset {
        meta: DatasetMeta {
            n_samples,
            resolution,
            nu: 0.0,
            t_final: 0.0,
            seed,
            grf,
        },
        grid: unit_grid(resolution),
        inputs,
        targets,
    })
}

fn fd_check(config: QfnoConfig, ds: &Dataset) -> Result<f64> {
    let model = QfnoModel::new(config)?;
    let idx: Vec<usize> = (0..ds.inputs.len()).collect();
    let (_, grad) = grad_batch(&model, ds, &idx)?;
    let params = model.flat_params();
    let h = 1e-5;
    let mut worst = 0.0f64;
    let stride = (params.len() / 16).max(1);
    for i in (0..params.len()).step_by(stride) {
        let mut probe = model.clone();
        let mut shifted = params.clone();
        shifted[i] = params[i] + h;
        probe.set_flat_params(&shifted)?;
        let up = batch_loss(&probe, ds, &idx)?;
        shifted[i] = params[i] - h;
        probe.set_flat_params(&shifted)?;
        let down = batch_loss(&probe, ds, &idx)?;
        let fd = (up - down) / (2.0 * h);
        let rel = (grad[i] - fd).abs() / grad[i].abs().max(fd.abs()).max(1e-8);
        worst = worst.max(rel);
    }
    Ok(worst)
}

fn grad_suite() -> Result<SuiteReport> {
    let mut results = Vec::new();
    let ds = synthetic_dataset(3, 8, 77)?;
    let cases = [
        ("classical", QflVariant::Classical),
        ("sequential", QflVariant::Sequential),
        ("parallel", QflVariant::Parallel),
        ("composite", QflVariant::Composite),
    ];
    for (label, variant) in cases {
        let mut config = QfnoConfig::new(variant, 3, 8, 2, 1);
        config.seed = 11;
        if variant == QflVariant::Parallel {
            config.aggregation = ParallelAggregation::Mean;
        }
        let worst = fd_check(config, &ds)?;
        results.push(prop(
            &format!("fd_agreement_{label}"),
            1e-4,
            worst,
            "central differences at h=1e-5, every 16th parameter".into(),
        ));
    }
    Ok(SuiteReport { suite: "grad".into(), results })
}
