//! Python bindings for the restricted-subspace simulator and the operator
//! models. Vectors cross the boundary as plain lists (complex where the
//! amplitudes are complex); matrices as lists of row lists.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use qfno_core::loader::{complexify, loader_plan};
use qfno_core::mat::{CMat, RMat};
use qfno_core::ortho::{self, LayoutShape};
use qfno_core::pde;
use qfno_core::qfl::QflVariant;
use qfno_core::qfno::{self, QfnoConfig, QfnoModel};
use qfno_core::subspace::{
    amp_estimates, dense_reference_sim, measure_sample, Gate, PairState, Register, UnaryState,
};
use qfno_core::uqft;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;

fn err(e: qfno_core::error::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn cmat_rows(m: &CMat) -> Vec<Vec<Complex64>> {
    (0..m.rows).map(|r| m.row(r).to_vec()).collect()
}

fn rmat_rows(m: &RMat) -> Vec<Vec<f64>> {
    (0..m.rows).map(|r| m.row(r).to_vec()).collect()
}

fn parse_shape(name: &str) -> PyResult<LayoutShape> {
    match name {
        "butterfly" => Ok(LayoutShape::Butterfly),
        "pyramid" => Ok(LayoutShape::Pyramid),
        other => Err(PyValueError::new_err(format!("unknown layout shape {other:?}"))),
    }
}

fn parse_variant(name: &str) -> PyResult<QflVariant> {
    match name {
        "classical" => Ok(QflVariant::Classical),
        "sequential" => Ok(QflVariant::Sequential),
        "parallel" => Ok(QflVariant::Parallel),
        "composite" => Ok(QflVariant::Composite),
        other => Err(PyValueError::new_err(format!("unknown variant {other:?}"))),
    }
}

fn variant_name(v: QflVariant) -> &'static str {
    match v {
        QflVariant::Classical => "classical",
        QflVariant::Sequential => "sequential",
        QflVariant::Parallel => "parallel",
        QflVariant::Composite => "composite",
    }
}

fn build_layout(shape: LayoutShape, n: usize) -> PyResult<ortho::Layout> {
    match shape {
        LayoutShape::Butterfly => ortho::Layout::butterfly(n).map_err(err),
        LayoutShape::Pyramid => ortho::Layout::pyramid(n).map_err(err),
    }
}

/// Hamming-weight-preserving circuit on one unary register.
#[pyclass(name = "Circuit")]
struct PyCircuit {
    inner: qfno_core::subspace::Circuit,
}

#[pymethods]
impl PyCircuit {
    #[new]
    fn new(n: usize) -> Self {
        PyCircuit { inner: qfno_core::subspace::Circuit::single(n) }
    }

    fn rbs(&mut self, p: usize, q: usize, theta: f64) {
        self.inner.push(Gate::rbs(Register::Top, p, q, theta));
    }

    fn phase(&mut self, p: usize, phi: Complex64) {
        self.inner.push(Gate::phase(Register::Top, p, phi));
    }

    fn z(&mut self, p: usize) {
        self.inner.push(Gate::z(Register::Top, p));
    }

    fn adjoint(&self) -> Self {
        PyCircuit { inner: self.inner.adjoint() }
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.layout.total_qubits()
    }

    fn gate_count(&self) -> usize {
        self.inner.gate_count()
    }

    fn depth(&self) -> usize {
        self.inner.measured_depth()
    }

    /// Evolve a one-hot-sector state, given as one amplitude per line.
    fn simulate_unary(&self, amps: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        let mut state = UnaryState::from_amps(amps);
        state.apply_circuit(&self.inner).map_err(err)?;
        Ok(state.amps)
    }

    /// Action on the one-hot sector as an n×n matrix (columns = basis images).
    fn unary_matrix(&self) -> PyResult<Vec<Vec<Complex64>>> {
        let n = self.inner.layout.total_qubits();
        let mut m = CMat::zeros(n, n);
        for k in 0..n {
            let mut state = UnaryState::basis(n, k);
            state.apply_circuit(&self.inner).map_err(err)?;
            m.set_col(k, &state.amps);
        }
        Ok(cmat_rows(&m))
    }

    /// Reference simulation over all 2^n basis states; input indexed by bitmask.
    fn dense_simulate(&self, input: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        dense_reference_sim(&self.inner, &input).map_err(err)
    }
}

/// Unary quantum Fourier transform circuit on n = 2^a lines.
#[pyfunction]
#[pyo3(signature = (n, inverse = false))]
fn uqft_circuit(n: usize, inverse: bool) -> PyResult<PyCircuit> {
    let circuit = uqft::build_uqft(n, inverse).map_err(err)?;
    Ok(PyCircuit { inner: (*circuit).clone() })
}

/// The unitary DFT matrix F_n/√n the transform circuit realizes (up to the
/// bit-reversal output ordering).
#[pyfunction]
fn dft_matrix(n: usize) -> Vec<Vec<Complex64>> {
    cmat_rows(&uqft::dft_matrix(n).unitary())
}

#[pyfunction]
fn bit_reversal_permutation(n: usize) -> PyResult<Vec<usize>> {
    uqft::bit_reversal_permutation(n).map_err(err)
}

/// Circuit that prepares x/‖x‖ on the one-hot sector from |e_0⟩.
#[pyfunction]
fn loader_circuit(x: Vec<f64>) -> PyResult<PyCircuit> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(PyValueError::new_err("cannot load the zero vector"));
    }
    let scaled: Vec<f64> = x.iter().map(|v| v / norm).collect();
    let plan = loader_plan(&complexify(&scaled)).map_err(err)?;
    Ok(PyCircuit { inner: plan.as_circuit() })
}

#[pyfunction]
fn layout_slot_count(shape: &str, n: usize) -> PyResult<usize> {
    Ok(build_layout(parse_shape(shape)?, n)?.slot_count())
}

/// Orthogonal matrix realized by a plane-rotation layout with the given angles.
#[pyfunction]
fn orthogonal_layer(shape: &str, n: usize, thetas: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
    let layout = build_layout(parse_shape(shape)?, n)?;
    let w = ortho::unary_weight(&layout, &thetas).map_err(err)?;
    Ok(rmat_rows(&w))
}

/// Order-2 compound: action of an n×n matrix on unordered index pairs.
#[pyfunction]
fn compound_order2(w: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    rmat_rows(&ortho::compound_order2(&RMat::from_rows(w)))
}

/// Sample a two-register amplitude matrix; returns |amplitude| estimates.
#[pyfunction]
fn measure_amplitudes(amps: Vec<Vec<Complex64>>, shots: u64, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let state = PairState::from_amps(CMat::from_rows(amps));
    let counts = measure_sample(&state, shots, seed).map_err(err)?;
    Ok(rmat_rows(&amp_estimates(&counts)))
}

fn grf_spec(amplitude: Option<f64>, lambda: Option<f64>, decay: Option<f64>) -> pde::GrfSpec {
    let base = pde::GrfSpec::default();
    pde::GrfSpec {
        amplitude: amplitude.unwrap_or(base.amplitude),
        lambda: lambda.unwrap_or(base.lambda),
        decay: decay.unwrap_or(base.decay),
    }
}

/// Zero-mean periodic random field with spectral decay (one draw per call).
#[pyfunction]
#[pyo3(signature = (n, seed, amplitude = None, lambda = None, decay = None))]
fn grf_sample(
    n: usize,
    seed: u64,
    amplitude: Option<f64>,
    lambda: Option<f64>,
    decay: Option<f64>,
) -> PyResult<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pde::grf_sample(n, &grf_spec(amplitude, lambda, decay), &mut rng).map_err(err)
}

/// Integrate the viscous Burgers equation on an upsampled grid and return the
/// solution decimated back to the input resolution.
#[pyfunction]
#[pyo3(signature = (u0, nu, t_end, dt = 1e-3))]
fn burgers_solve(u0: Vec<f64>, nu: f64, t_end: f64, dt: f64) -> PyResult<Vec<f64>> {
    pde::solve_on_fine_grid(&u0, nu, t_end, dt).map_err(err)
}

#[pyfunction]
fn unit_grid(n: usize) -> Vec<f64> {
    pde::unit_grid(n)
}

/// Paired (initial condition, solution) samples at one resolution.
#[pyclass(name = "Dataset")]
struct PyDataset {
    inner: pde::Dataset,
}

#[pymethods]
impl PyDataset {
    #[staticmethod]
    #[pyo3(signature = (count, resolution, seed, nu = 0.1, t_end = 1.0, dt = 1e-3, amplitude = None, lambda = None, decay = None))]
    #[allow(clippy::too_many_arguments)]
    fn generate(
        count: usize,
        resolution: usize,
        seed: u64,
        nu: f64,
        t_end: f64,
        dt: f64,
        amplitude: Option<f64>,
        lambda: Option<f64>,
        decay: Option<f64>,
    ) -> PyResult<Self> {
        let mut spec = pde::DatasetSpec::new(count, resolution, seed);
        spec.nu = nu;
        spec.t_final = t_end;
        spec.dt = dt;
        spec.grf = grf_spec(amplitude, lambda, decay);
        Ok(PyDataset { inner: pde::make_dataset(&spec).map_err(err)? })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyDataset { inner: pde::read_dataset(&path).map_err(err)? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        pde::write_dataset(&self.inner, &path).map_err(err)
    }

    #[getter]
    fn inputs(&self) -> Vec<Vec<f64>> {
        self.inner.inputs.clone()
    }

    #[getter]
    fn targets(&self) -> Vec<Vec<f64>> {
        self.inner.targets.clone()
    }

    #[getter]
    fn grid(&self) -> Vec<f64> {
        self.inner.grid.clone()
    }

    #[getter]
    fn resolution(&self) -> usize {
        self.inner.meta.resolution
    }

    fn __len__(&self) -> usize {
        self.inner.inputs.len()
    }
}

/// Operator model: lift, stacked Fourier layers, readout.
#[pyclass(name = "Model")]
struct PyModel {
    inner: QfnoModel,
}

#[pymethods]
impl PyModel {
    #[new]
    #[pyo3(signature = (variant, n_c, n_s, k_modes, t_layers, seed = 0))]
    fn new(variant: &str, n_c: usize, n_s: usize, k_modes: usize, t_layers: usize, seed: u64) -> PyResult<Self> {
        let mut config = QfnoConfig::new(parse_variant(variant)?, n_c, n_s, k_modes, t_layers);
        config.seed = seed;
        Ok(PyModel { inner: QfnoModel::new(config).map_err(err)? })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyModel { inner: qfno::load_model(&path).map_err(err)? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        qfno::save_model(&self.inner, &path).map_err(err)
    }

    #[getter]
    fn variant(&self) -> &'static str {
        variant_name(self.inner.config.variant)
    }

    #[getter]
    fn n_c(&self) -> usize {
        self.inner.config.n_c
    }

    #[getter]
    fn n_s(&self) -> usize {
        self.inner.config.n_s
    }

    #[getter]
    fn k_modes(&self) -> usize {
        self.inner.config.k_modes
    }

    #[getter]
    fn t_layers(&self) -> usize {
        self.inner.config.t_layers
    }

    /// All trainable parameters in checkpoint order.
    fn parameters(&self) -> Vec<f64> {
        self.inner.flat_params()
    }

    fn set_parameters(&mut self, vals: Vec<f64>) -> PyResult<()> {
        self.inner.set_flat_params(&vals).map_err(err)
    }

    fn predict(&self, u0: Vec<f64>) -> PyResult<Vec<f64>> {
        let grid = pde::unit_grid(self.inner.config.n_s);
        self.inner.predict(&u0, &grid).map_err(err)
    }

    /// Mean relative L2 error over a dataset.
    fn evaluate(&self, ds: &PyDataset) -> PyResult<f64> {
        Ok(qfno::evaluate(&self.inner, &ds.inner).map_err(err)?.rel_err_mean)
    }

    /// Train in place; returns per-epoch (train loss, test relative error).
    #[pyo3(signature = (train_set, test_set, epochs = None, learning_rate = None, batch_size = None))]
    fn train(
        &mut self,
        train_set: &PyDataset,
        test_set: &PyDataset,
        epochs: Option<usize>,
        learning_rate: Option<f64>,
        batch_size: Option<usize>,
    ) -> PyResult<Vec<(f64, f64)>> {
        if let Some(e) = epochs {
            self.inner.config.epochs = e;
        }
        if let Some(lr) = learning_rate {
            self.inner.config.learning_rate = lr;
        }
        if let Some(b) = batch_size {
            self.inner.config.batch_size = b;
        }
        let report = qfno::train(&mut self.inner, &train_set.inner, &test_set.inner, |_| {}).map_err(err)?;
        Ok(report.epochs.iter().map(|s| (s.train_loss, s.test_rel_err)).collect())
    }
}

#[pymodule]
fn qfno_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyDataset>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(uqft_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(dft_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(bit_reversal_permutation, m)?)?;
    m.add_function(wrap_pyfunction!(loader_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(layout_slot_count, m)?)?;
    m.add_function(wrap_pyfunction!(orthogonal_layer, m)?)?;
    m.add_function(wrap_pyfunction!(compound_order2, m)?)?;
    m.add_function(wrap_pyfunction!(measure_amplitudes, m)?)?;
    m.add_function(wrap_pyfunction!(grf_sample, m)?)?;
    m.add_function(wrap_pyfunction!(burgers_solve, m)?)?;
    m.add_function(wrap_pyfunction!(unit_grid, m)?)?;
    Ok(())
}
