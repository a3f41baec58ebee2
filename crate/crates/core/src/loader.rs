//! Amplitude encoding of classical vectors and matrices.
//!
//! Semantic loading assigns normalized amplitudes directly. For vectors there
//! is also a gate-level plan: a binary tree of RBS angles computed from
//! recursive sub-norms (θ = atan2(‖right half‖, ‖left half‖)), with per-leaf
//! phase gates carrying signs, replayed from the first basis state. Matrix
//! loading is semantic-only and reports a gate-depth estimate instead of
//! materializing the controlled row loaders.

use crate::error::{Error, Result};
use crate::mat::CMat;
use crate::subspace::{Amplitude, Circuit, Gate, PairState, Register, UnaryState};

/// Gate-level recipe that rebuilds a unit vector from the first basis state.
#[derive(Debug, Clone)]
pub struct LoaderPlan {
    /// Padded target length (power of two).
    pub n: usize,
    /// (p, q, θ) per binary-tree node in breadth-first order; each level's
    /// nodes touch disjoint qubit pairs, so one level is one parallel layer.
    pub nodes: Vec<(usize, usize, f64)>,
    /// Unit scalar per leaf restoring sign/phase; 1 where the entry was zero.
    pub leaf_phases: Vec<Amplitude>,
}

impl LoaderPlan {
    /// The plan as a circuit: log2(n) RBS levels, then one phase layer.
    pub fn as_circuit(&self) -> Circuit {
        let mut circ = Circuit::single(self.n);
        for &(p, q, theta) in &self.nodes {
            circ.push(Gate::rbs(Register::Top, p, q, theta));
        }
        for (i, phi) in self.leaf_phases.iter().enumerate() {
            if (phi - Amplitude::ONE).norm() > 1e-15 {
                circ.push(Gate::phase(Register::Top, i, *phi));
            }
        }
        circ
    }

    /// Runs the circuit on the first basis state.
    pub fn replay(&self) -> Result<UnaryState> {
        let mut state = UnaryState::basis(self.n, 0);
        state.apply_circuit(&self.as_circuit())?;
        Ok(state)
    }
}

fn norm_of(x: &[Amplitude]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub fn complexify(x: &[f64]) -> Vec<Amplitude> {
    x.iter().map(|&v| Amplitude::new(v, 0.0)).collect()
}

/// Encodes x as a weight-1 state with amplitudes x/‖x‖. With `normalize`
/// unset the input must already be unit to 1e−8.
pub fn load_vector(x: &[Amplitude], normalize: bool) -> Result<UnaryState> {
    let norm = norm_of(x);
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    if !normalize && (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { norm, tol: 1e-8 });
    }
    let scale = if normalize { 1.0 / norm } else { 1.0 };
    Ok(UnaryState::from_amps(x.iter().map(|a| a * scale).collect()))
}

/// Builds the binary-tree loader plan of a unit vector, zero-padding to the
/// next power of two.
pub fn loader_plan(x: &[Amplitude]) -> Result<LoaderPlan> {
    let norm = norm_of(x);
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { norm, tol: 1e-8 });
    }
    let n = x.len().next_power_of_two();
    let mut padded = x.to_vec();
    padded.resize(n, Amplitude::ZERO);

    // Breadth-first over blocks: level ℓ has 2^ℓ blocks of length n/2^ℓ.
    let mut nodes = Vec::new();
    let mut len = n;
    while len >= 2 {
        for start in (0..n).step_by(len) {
            let half = len / 2;
            let nl = norm_of(&padded[start..start + half]);
            let nr = norm_of(&padded[start + half..start + len]);
            nodes.push((start, start + half, nr.atan2(nl)));
        }
        len /= 2;
    }
    let leaf_phases = padded
        .iter()
        .map(|a| if a.norm() > 0.0 { a / a.norm() } else { Amplitude::ONE })
        .collect();
    Ok(LoaderPlan { n, nodes, leaf_phases })
}

/// Encodes a matrix as a pair state with amplitudes a_ij/‖A‖_F.
pub fn load_matrix(a: &CMat, normalize: bool) -> Result<PairState> {
    let norm = a.frob_norm();
    if norm == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    if !normalize && (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { norm, tol: 1e-8 });
    }
    let scale = Amplitude::new(if normalize { 1.0 / norm } else { 1.0 }, 0.0);
    Ok(PairState::from_amps(a.scale(scale)))
}

/// Gate-depth estimate of the controlled matrix loader for an N_c×N_s matrix:
/// log2(N_c) to address rows plus 2·N_c·log2(N_s) of controlled row loads.
/// The circuit itself is never materialized.
pub fn matrix_loader_depth(n_c: usize, n_s: usize) -> f64 {
    (n_c as f64).log2() + 2.0 * n_c as f64 * (n_s as f64).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(v: f64) -> Amplitude {
        Amplitude::new(v, 0.0)
    }

    #[test]
    fn basis_vector_loads_to_itself() {
        let s = load_vector(&complexify(&[1.0, 0.0, 0.0, 0.0]), false).unwrap();
        assert_eq!(s.amps[0], Amplitude::ONE);
        assert_eq!(s.amps[1], Amplitude::ZERO);
    }

    #[test]
    fn three_four_five_normalizes() {
        let s = load_vector(&complexify(&[3.0, 4.0]), true).unwrap();
        assert!((s.amps[0].re - 0.6).abs() < 1e-15);
        assert!((s.amps[1].re - 0.8).abs() < 1e-15);
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(matches!(load_vector(&[Amplitude::ZERO; 4], true), Err(Error::ZeroVector)));
    }

    #[test]
    fn unnormalized_rejected_without_flag() {
        assert!(matches!(
            load_vector(&complexify(&[3.0, 4.0]), false),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn plan_replay_equals_semantic_load() {
        let x = [re(0.5), re(-0.5), Amplitude::new(0.0, 0.5), re(0.5)];
        let plan = loader_plan(&x).unwrap();
        let replayed = plan.replay().unwrap();
        let direct = load_vector(&x, false).unwrap();
        assert!(replayed.max_abs_diff(&direct) < 1e-12);
    }

    #[test]
    fn two_element_plan_is_single_rbs() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plan = loader_plan(&[re(r), re(r)]).unwrap();
        assert_eq!(plan.nodes.len(), 1);
        let replayed = plan.replay().unwrap();
        assert!((replayed.amps[0].re - r).abs() < 1e-12);
        assert!((replayed.amps[1].re - r).abs() < 1e-12);
    }

    #[test]
    fn plan_depth_is_levels_plus_sign_layer() {
        // 8 entries with a sign flip: 3 RBS levels plus one phase layer.
        let mut x = vec![re(1.0); 8];
        x[3] = re(-1.0);
        let norm = (8.0f64).sqrt();
        for a in &mut x {
            *a /= norm;
        }
        let plan = loader_plan(&x).unwrap();
        assert_eq!(plan.as_circuit().depth(), 4);
    }

    #[test]
    fn padding_matches_padded_load() {
        let x = [re(0.5), re(0.5), re(0.5), re(0.1), re(0.2), re(0.4)];
        let norm = norm_of(&x);
        let unit: Vec<Amplitude> = x.iter().map(|a| a / norm).collect();
        let plan = loader_plan(&unit).unwrap();
        assert_eq!(plan.n, 8);
        let replayed = plan.replay().unwrap();
        for i in 0..6 {
            assert!((replayed.amps[i] - unit[i]).norm() < 1e-12);
        }
        for i in 6..8 {
            assert!(replayed.amps[i].norm() < 1e-12);
        }
    }

    #[test]
    fn loading_is_idempotent() {
        let x = complexify(&[0.1, -0.7, 0.3, 0.9]);
        let once = load_vector(&x, true).unwrap();
        let twice = load_vector(&once.amps, true).unwrap();
        assert!(once.max_abs_diff(&twice) < 1e-15);
    }

    #[test]
    fn row_matrix_matches_vector_load() {
        let row = [re(0.3), re(-0.4), re(0.5), re(0.1)];
        let m = CMat::from_rows(vec![row.to_vec()]);
        let pair = load_matrix(&m, true).unwrap();
        let vec = load_vector(&row, true).unwrap();
        for j in 0..4 {
            assert!((pair.amps[(0, j)] - vec.amps[j]).norm() < 1e-15);
        }
    }

    #[test]
    fn diagonal_matrix_example() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let m = CMat::from_rows(vec![vec![re(r), re(0.0)], vec![re(0.0), re(r)]]);
        let pair = load_matrix(&m, false).unwrap();
        assert!((pair.amps[(0, 0)].re - r).abs() < 1e-15);
        assert!((pair.amps[(1, 1)].re - r).abs() < 1e-15);
        assert!((pair.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_rejected() {
        assert!(matches!(load_matrix(&CMat::zeros(2, 3), true), Err(Error::ZeroMatrix)));
    }

    #[test]
    fn depth_estimate_formula() {
        assert!((matrix_loader_depth(8, 64) - (3.0 + 2.0 * 8.0 * 6.0)).abs() < 1e-12);
    }
}
