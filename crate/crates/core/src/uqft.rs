//! Unary-basis quantum Fourier transform.
//!
//! A ladder of phase gates and RBS(−π/4) rotations whose weight-1 restriction
//! equals the scaled DFT matrix F_n/√n with ω = e^{+i2π/n}, applied after a
//! bit-reversal input permutation. The semantic path computes the same
//! transform with an FFT; the explicit DFT matrix ([`dft_matrix`]) is the
//! oracle both are checked against, so the three routes stay independent.

use crate::error::{Error, Result};
use crate::mat::CMat;
use crate::subspace::{Circuit, Gate, PairState, Register};
use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Explicit DFT matrix with entries ω^{jk}, ω = e^{+i2π/n}; F/√n is unitary.
#[derive(Debug, Clone)]
pub struct DftOracle {
    pub n: usize,
    pub f: CMat,
}

impl DftOracle {
    /// F scaled to the unitary form F/√n.
    pub fn unitary(&self) -> CMat {
        self.f.scale(Complex64::new(1.0 / (self.n as f64).sqrt(), 0.0))
    }
}

/// Builds the n×n DFT matrix, entry (j, k) = ω^{jk} with zero-based exponents.
pub fn dft_matrix(n: usize) -> DftOracle {
    // Reduce jk mod n before exponentiating to keep the angle well inside
    // the range where sin/cos are exact to machine precision.
    let f = CMat::from_fn(n, n, |j, k| {
        let e = ((j * k) % n) as f64;
        Complex64::from_polar(1.0, 2.0 * PI * e / n as f64)
    });
    DftOracle { n, f }
}

/// Permutation π with π(i) = bit-reversal of i in log2(n) bits. Applying the
/// ladder circuit to the permuted input realizes F_n/√n on the original input.
pub fn bit_reversal_permutation(n: usize) -> Result<Vec<usize>> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let bits = n.trailing_zeros();
    Ok((0..n)
        .map(|i| {
            if bits == 0 {
                0
            } else {
                (i as u64).reverse_bits().wrapping_shr(64 - bits) as usize
            }
        })
        .collect())
}

fn build_forward(n: usize) -> Circuit {
    let mut circ = Circuit::single(n);
    let mut m = 2;
    while m <= n {
        for block in (0..n).step_by(m) {
            for t in 0..m / 2 {
                let i = block + t;
                let j = i + m / 2;
                // Site computes (a_i + ω a_j, a_i − ω a_j)/√2 with
                // ω = e^{+i2πt/m}: a phase on the j wire, then a −π/4 mix.
                let omega = Complex64::from_polar(1.0, 2.0 * PI * t as f64 / m as f64);
                circ.push(Gate::phase(Register::Top, j, -omega));
                circ.push(Gate::rbs(Register::Top, j, i, -PI / 4.0));
            }
        }
        m *= 2;
    }
    circ
}

/// The transform circuit on n qubits (log2(n) stages, ≤ n·log2(n) gates).
/// `inverse` yields the adjoint circuit. Circuits are cached per (n, inverse).
pub fn build_uqft(n: usize, inverse: bool) -> Result<Arc<Circuit>> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<Circuit>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("uqft cache poisoned");
    let entry = guard.entry((n, inverse)).or_insert_with(|| {
        let fwd = build_forward(n);
        Arc::new(if inverse { fwd.adjoint() } else { fwd }.with_layers())
    });
    Ok(Arc::clone(entry))
}

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn fft_plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|plans| {
        Arc::clone(plans.borrow_mut().entry((len, inverse)).or_insert_with(|| {
            // Our forward convention is ω = e^{+i2π/n}, which is the FFT
            // library's "inverse" direction; both are rescaled by 1/√n.
            let dir = if inverse { FftDirection::Forward } else { FftDirection::Inverse };
            FftPlanner::new().plan_fft(len, dir)
        }))
    })
}

/// In-place length-n transform of a vector: x ↦ F x/√n (or F†x/√n).
pub fn dft_vec_inplace(v: &mut [Complex64], inverse: bool) {
    let n = v.len();
    fft_plan(n, inverse).process(v);
    let scale = 1.0 / (n as f64).sqrt();
    for a in v {
        *a *= scale;
    }
}

/// Row-wise transform of a matrix: every row r ↦ F r/√n (or F†r/√n).
pub fn dft_rows(m: &CMat, inverse: bool) -> CMat {
    let mut out = m.clone();
    for r in 0..out.rows {
        dft_vec_inplace(out.row_mut(r), inverse);
    }
    out
}

/// Which implementation route to use for row transforms of pair states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UqftPath {
    /// FFT on the amplitudes directly.
    Semantic,
    /// Bit-reversal permutation plus the gate ladder on the bottom register.
    Gate,
}

/// Replaces every row of the state's amplitude matrix by its (inverse) DFT
/// scaled by 1/√N_s. Both paths agree to 1e−10.
pub fn apply_uqft_rows(state: &PairState, inverse: bool, path: UqftPath) -> Result<PairState> {
    let n = state.n_bot;
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut out = state.clone();
    match path {
        UqftPath::Semantic => {
            for r in 0..out.amps.rows {
                dft_vec_inplace(out.amps.row_mut(r), inverse);
            }
        }
        UqftPath::Gate => {
            let perm = bit_reversal_permutation(n)?;
            let permute = |st: &mut PairState| {
                let src = st.amps.clone();
                for i in 0..n {
                    let col = src.col(perm[i]);
                    st.amps.set_col(i, &col);
                }
            };
            let circ = build_uqft(n, inverse)?;
            // Forward is (permute, ladder); the inverse undoes them in the
            // opposite order, and bit reversal is its own inverse.
            if !inverse {
                permute(&mut out);
            }
            for g in &circ.gates {
                out.apply_gate(&g.retarget(Register::Bottom))?;
            }
            if inverse {
                permute(&mut out);
            }
        }
    }
    Ok(out)
}
