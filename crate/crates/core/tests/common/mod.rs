#![allow(dead_code)]

use num_complex::Complex64;
use qfno_core::mat::CMat;
use qfno_core::subspace::{index_pair, pair_count, Circuit, Gate, Register};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit(rng: &mut impl Rng, dim: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

pub fn random_unit_cmat(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat {
    let m = CMat::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let norm = m.frob_norm();
    m.scale(Complex64::new(1.0 / norm, 0.0))
}

/// Real-valued unit activation, the shape the lift actually produces.
pub fn random_real_unit_cmat(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat {
    let m = CMat::from_fn(rows, cols, |_, _| Complex64::new(rng.random_range(-1.0..1.0), 0.0));
    let norm = m.frob_norm();
    m.scale(Complex64::new(1.0 / norm, 0.0))
}

pub fn random_single_circuit(n: usize, gates: usize, rng: &mut impl Rng) -> Circuit {
    let mut circ = Circuit::single(n);
    for _ in 0..gates {
        match rng.random_range(0..4) {
            0 | 1 => {
                let p = rng.random_range(0..n);
                let mut q = rng.random_range(0..n);
                while q == p {
                    q = rng.random_range(0..n);
                }
                circ.push(Gate::rbs(Register::Top, p, q, rng.random_range(-3.0..3.0)));
            }
            2 => {
                let phi = Complex64::from_polar(1.0, rng.random_range(-3.0..3.0));
                circ.push(Gate::phase(Register::Top, rng.random_range(0..n), phi));
            }
            _ => circ.push(Gate::z(Register::Top, rng.random_range(0..n))),
        }
    }
    circ
}

pub fn random_pair_circuit(n_top: usize, n_bot: usize, gates: usize, rng: &mut impl Rng) -> Circuit {
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
                let targets: Vec<usize> =
                    (0..n_top).filter(|_| rng.random_range(0..2) == 0).collect();
                circ.push(Gate::AntiControlledZ { control: rng.random_range(0..n_bot), targets });
            }
        }
    }
    circ
}

/// One-hot sector amplitudes as a dense 2^n vector: basis i sits at 1 << i.
pub fn embed_one_hot(amps: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut dense = vec![Complex64::ZERO; 1 << n];
    for (i, &a) in amps.iter().enumerate() {
        dense[1 << i] = a;
    }
    dense
}

/// Two-hot sector amplitudes as a dense vector: pair k = (p, q) at (1<<p)|(1<<q).
pub fn embed_two_hot(amps: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut dense = vec![Complex64::ZERO; 1 << n];
    for (k, &a) in amps.iter().enumerate() {
        let (p, q) = index_pair(n, k);
        dense[(1 << p) | (1 << q)] = a;
    }
    dense
}

/// Register-pair amplitudes as a dense vector over n_top + n_bot qubits:
/// cell (i, j) at (1<<i) | (1<<(n_top+j)).
pub fn embed_pair(amps: &CMat, n_top: usize, n_bot: usize) -> Vec<Complex64> {
    let mut dense = vec![Complex64::ZERO; 1 << (n_top + n_bot)];
    for i in 0..n_top {
        for j in 0..n_bot {
            dense[(1 << i) | (1 << (n_top + j))] = amps[(i, j)];
        }
    }
    dense
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn two_hot_dim(n: usize) -> usize {
    pair_count(n)
}
