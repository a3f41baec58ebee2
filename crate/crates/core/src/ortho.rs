//! Trainable orthogonal circuit layers.
//!
//! A [`Layout`] fixes which qubit pairs carry RBS rotations and in what
//! order; a theta vector gives one angle per slot. On top of that sit the
//! Z-index-set construction, reversed circuits, the controlled parameterized
//! circuit (P, anti-controlled Z, P′, anti-controlled Z), the effective
//! weight W = W_{P′}·W_P, and order-2 compound matrices.

use crate::error::{Error, Result};
use crate::mat::RMat;
use crate::subspace::{pair_count, Circuit, Gate, Register};
use num_complex::Complex64;
use rand::Rng;

pub type ThetaVector = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutShape {
    Butterfly,
    Pyramid,
}

/// Ordered RBS slots grouped into parallel layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub shape: LayoutShape,
    pub n: usize,
    pub slots: Vec<(usize, usize)>,
    /// Slot indices per parallel layer; butterfly has log2(n) layers of n/2.
    pub layers: Vec<Vec<usize>>,
}

impl Layout {
    /// Strided all-to-all mixing: layers at stride n/2, n/4, …, 1 with
    /// (n/2)·log2(n) slots total. Requires n a power of two.
    pub fn butterfly(n: usize) -> Result<Self> {
        if !n.is_power_of_two() || n < 2 {
            return Err(Error::NotPowerOfTwo(n));
        }
        let mut slots = Vec::new();
        let mut layers = Vec::new();
        let mut stride = n / 2;
        while stride >= 1 {
            let mut layer = Vec::new();
            for block in (0..n).step_by(2 * stride) {
                for t in 0..stride {
                    layer.push(slots.len());
                    slots.push((block + t, block + t + stride));
                }
            }
            layers.push(layer);
            stride /= 2;
        }
        Ok(Layout { shape: LayoutShape::Butterfly, n, slots, layers })
    }

    /// Nearest-neighbor staircases with n(n−1)/2 slots.
    pub fn pyramid(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedLayout(format!("pyramid needs ≥ 2 qubits, got {n}")));
        }
        let mut slots = Vec::new();
        for c in 0..n - 1 {
            for r in (0..=c).rev() {
                slots.push((r, r + 1));
            }
        }
        let layers = greedy_layers(n, &slots);
        Ok(Layout { shape: LayoutShape::Pyramid, n, slots, layers })
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }
}

fn greedy_layers(n: usize, slots: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut frontier = vec![0usize; n];
    let mut layers: Vec<Vec<usize>> = Vec::new();
    for (idx, &(p, q)) in slots.iter().enumerate() {
        let layer = frontier[p].max(frontier[q]);
        if layer == layers.len() {
            layers.push(Vec::new());
        }
        layers[layer].push(idx);
        frontier[p] = layer + 1;
        frontier[q] = layer + 1;
    }
    layers
}

/// Butterfly over the next power of two ≥ m, with a mask marking the slots
/// whose endpoints both lie on real (unpadded) qubits. Frozen slots keep
/// θ = 0, which leaves the restriction on real indices untouched.
pub fn butterfly_padded(m: usize) -> Result<(Layout, Vec<bool>)> {
    let layout = Layout::butterfly(m.next_power_of_two().max(2))?;
    let mask = layout.slots.iter().map(|&(p, q)| p < m && q < m).collect();
    Ok((layout, mask))
}

/// Independent uniform angles on [−π/√n, π/√n].
pub fn init_thetas(layout: &Layout, rng: &mut impl Rng) -> ThetaVector {
    let bound = std::f64::consts::PI / (layout.n as f64).sqrt();
    (0..layout.slot_count()).map(|_| rng.random_range(-bound..bound)).collect()
}

fn check_len(layout: &Layout, thetas: &[f64]) -> Result<()> {
    if thetas.len() != layout.slot_count() {
        return Err(Error::LengthMismatch { expected: layout.slot_count(), got: thetas.len() });
    }
    Ok(())
}

/// RBS circuit in slot order; its weight-1 restriction is real orthogonal.
pub fn build_param_circuit(layout: &Layout, thetas: &[f64]) -> Result<Circuit> {
    check_len(layout, thetas)?;
    let mut circ = Circuit::single(layout.n);
    for (&(p, q), &th) in layout.slots.iter().zip(thetas) {
        circ.push(Gate::rbs(Register::Top, p, q, th));
    }
    Ok(circ)
}

/// Same gates in reversed slot order: P′(θ) = P†(−θ).
pub fn build_reversed(layout: &Layout, thetas: &[f64]) -> Result<Circuit> {
    check_len(layout, thetas)?;
    let mut circ = Circuit::single(layout.n);
    for (&(p, q), &th) in layout.slots.iter().zip(thetas).rev() {
        circ.push(Gate::rbs(Register::Top, p, q, th));
    }
    Ok(circ)
}

/// A qubit set hitting every slot exactly once. For the butterfly it is built
/// by recursive doubling: I over 2m qubits = I over m ∪ (complement + m);
/// for the pyramid the even indices work since every slot is nearest-neighbor.
pub fn z_index_set(layout: &Layout) -> Result<Vec<usize>> {
    match layout.shape {
        LayoutShape::Pyramid => Ok((0..layout.n).step_by(2).collect()),
        LayoutShape::Butterfly => {
            // Base case over 2 qubits: the set {0}.
            let mut set = vec![true, false];
            while set.len() < layout.n {
                let m = set.len();
                let mut next = Vec::with_capacity(2 * m);
                next.extend_from_slice(&set);
                next.extend(set.iter().map(|b| !b));
                set = next;
            }
            Ok((0..layout.n).filter(|&i| set[i]).collect())
        }
    }
}

/// The controlled parameterized circuit on a register pair: P on the top
/// register, anti-controlled Z on the Z-index set, P′, anti-controlled Z.
/// Column `control` of a pair state is mapped by W_{P′}·W_P; all other
/// columns are left untouched.
pub fn build_controlled_param(
    layout: &Layout,
    thetas: &[f64],
    n_bot: usize,
    control: usize,
) -> Result<Circuit> {
    check_len(layout, thetas)?;
    if control >= n_bot {
        return Err(Error::IndexOutOfRange { index: control, size: n_bot });
    }
    let zset = z_index_set(layout)?;
    let mut circ = Circuit::pair(layout.n, n_bot);
    for (&(p, q), &th) in layout.slots.iter().zip(thetas) {
        circ.push(Gate::rbs(Register::Top, p, q, th));
    }
    circ.push(Gate::AntiControlledZ { control, targets: zset.clone() });
    for (&(p, q), &th) in layout.slots.iter().zip(thetas).rev() {
        circ.push(Gate::rbs(Register::Top, p, q, th));
    }
    circ.push(Gate::AntiControlledZ { control, targets: zset });
    Ok(circ)
}

#[inline]
pub(crate) fn rotate_real(v: &mut [f64], p: usize, q: usize, c: f64, s: f64) {
    let (aq, ap) = (v[q], v[p]);
    v[q] = c * aq + s * ap;
    v[p] = c * ap - s * aq;
}

#[inline]
pub(crate) fn rotate_complex(v: &mut [Complex64], p: usize, q: usize, c: f64, s: f64) {
    let (aq, ap) = (v[q], v[p]);
    v[q] = c * aq + s * ap;
    v[p] = c * ap - s * aq;
}

/// Applies the weight-1 action of the slot chain to a complex vector, in slot
/// order or reversed. Chaining forward then reversed applies the effective
/// weight W = W_{P′}·W_P.
pub fn apply_chain(v: &mut [Complex64], layout: &Layout, thetas: &[f64], reversed: bool) {
    debug_assert_eq!(thetas.len(), layout.slot_count());
    if reversed {
        for (&(p, q), &th) in layout.slots.iter().zip(thetas).rev() {
            let (s, c) = th.sin_cos();
            rotate_complex(v, p, q, c, s);
        }
    } else {
        for (&(p, q), &th) in layout.slots.iter().zip(thetas) {
            let (s, c) = th.sin_cos();
            rotate_complex(v, p, q, c, s);
        }
    }
}

/// The effective weight W_{P′}·W_P as an explicit orthogonal matrix.
pub fn unary_weight(layout: &Layout, thetas: &[f64]) -> Result<RMat> {
    check_len(layout, thetas)?;
    let n = layout.n;
    let mut w = RMat::zeros(n, n);
    for k in 0..n {
        let mut col = vec![0.0; n];
        col[k] = 1.0;
        for (&(p, q), &th) in layout.slots.iter().zip(thetas) {
            let (s, c) = th.sin_cos();
            rotate_real(&mut col, p, q, c, s);
        }
        for (&(p, q), &th) in layout.slots.iter().zip(thetas).rev() {
            let (s, c) = th.sin_cos();
            rotate_real(&mut col, p, q, c, s);
        }
        for r in 0..n {
            w[(r, k)] = col[r];
        }
    }
    Ok(w)
}

/// All 2×2 minors of W: entry ((a,b),(c,d)) = W_ac·W_bd − W_ad·W_bc with
/// pairs in lexicographic order.
pub fn compound_order2(w: &RMat) -> RMat {
    assert_eq!(w.rows, w.cols);
    let m = w.rows;
    let dim = pair_count(m);
    let mut pairs = Vec::with_capacity(dim);
    for a in 0..m {
        for b in a + 1..m {
            pairs.push((a, b));
        }
    }
    let mut out = RMat::zeros(dim, dim);
    for (ri, &(a, b)) in pairs.iter().enumerate() {
        for (ci, &(c, d)) in pairs.iter().enumerate() {
            out[(ri, ci)] = w[(a, c)] * w[(b, d)] - w[(a, d)] * w[(b, c)];
        }
    }
    out
}
