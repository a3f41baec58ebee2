//! Hamming-weight-restricted state-vector simulation.
//!
//! The gate set here (RBS rotations, single-qubit phases, and the
//! anti-controlled Z block) never moves amplitude between Hamming-weight
//! sectors, so states are stored only on the sector they occupy:
//!
//! * [`UnaryState`]: weight-1 states of one register, n amplitudes, with
//!   qubit `i` hot ↔ basis vector `e_i`.
//! * [`PairState`]: one hot qubit per register of a top/bottom register
//!   pair; amplitude `(i, j)` is the coefficient of `e_i ⊗ e_j`.
//! * [`Hw2State`]: weight-2 states of one register, indexed by
//!   lexicographically ordered qubit pairs `(p, q)`, `p < q`.
//!
//! [`dense_reference_sim`] runs the same circuits on the full `2^n` state
//! vector and is the oracle the restricted kernels are tested against.
//!
//! Index conventions, fixed once and used everywhere: dense basis index bit
//! `i` is qubit `i` of the register; in a register pair the top register
//! occupies bits `0..n_top` and the bottom register bits `n_top..n_top+n_bot`.
//! The RBS matrix is expressed in the basis |b_p b_q⟩ ∈ {00, 01, 10, 11}, so
//! the `01` row is "qubit q hot" and the `10` row is "qubit p hot".

use crate::error::{Error, Result};
use crate::mat::{CMat, RMat};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Amplitude = Complex64;

/// Weight-2 sector dimension C(n,2) grows quadratically; cap the register size.
pub const HW2_QUBIT_CAP: usize = 64;
/// Dense simulation allocates 2^n amplitudes; cap the total qubit count.
pub const DENSE_QUBIT_CAP: usize = 12;

/// Which register of a [`CircuitLayout::Pair`] a gate acts on. Single-register
/// circuits tag their gates `Top` by convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Register {
    Top,
    Bottom,
}

/// A Hamming-weight-preserving gate.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// Planar rotation on the {|01⟩, |10⟩} span of qubits (p, q);
    /// identity on |00⟩ and |11⟩.
    Rbs { reg: Register, p: usize, q: usize, theta: f64 },
    /// Multiplies the amplitude of every basis state with qubit p hot by the
    /// unit scalar phi.
    Phase { reg: Register, p: usize, phi: Amplitude },
    /// Z on qubit p, i.e. `Phase(p, -1)`.
    ZGate { reg: Register, p: usize },
    /// When the bottom-register `control` qubit is cold, applies Z to every
    /// top-register qubit in `targets`; when it is hot, does nothing. Modeled
    /// as one composite gate.
    AntiControlledZ { control: usize, targets: Vec<usize> },
}

impl Gate {
    pub fn rbs(reg: Register, p: usize, q: usize, theta: f64) -> Self {
        debug_assert_ne!(p, q);
        Gate::Rbs { reg, p, q, theta }
    }

    pub fn phase(reg: Register, p: usize, phi: Amplitude) -> Self {
        debug_assert!((phi.norm() - 1.0).abs() < 1e-9);
        Gate::Phase { reg, p, phi }
    }

    pub fn z(reg: Register, p: usize) -> Self {
        Gate::ZGate { reg, p }
    }

    /// The inverse gate.
    pub fn inverse(&self) -> Gate {
        match self {
            Gate::Rbs { reg, p, q, theta } => Gate::Rbs { reg: *reg, p: *p, q: *q, theta: -theta },
            Gate::Phase { reg, p, phi } => Gate::Phase { reg: *reg, p: *p, phi: phi.conj() },
            Gate::ZGate { .. } | Gate::AntiControlledZ { .. } => self.clone(),
        }
    }

    /// Re-tags a single-register gate onto the given register.
    /// Panics on AntiControlledZ, which is inherently two-register.
    pub fn retarget(&self, reg: Register) -> Gate {
        match self {
            Gate::Rbs { p, q, theta, .. } => Gate::Rbs { reg, p: *p, q: *q, theta: *theta },
            Gate::Phase { p, phi, .. } => Gate::Phase { reg, p: *p, phi: *phi },
            Gate::ZGate { p, .. } => Gate::ZGate { reg, p: *p },
            Gate::AntiControlledZ { .. } => panic!("cannot retarget a two-register gate"),
        }
    }

    fn check_bounds(&self, layout: &CircuitLayout) -> Result<()> {
        let size = |reg: &Register| match (layout, reg) {
            (CircuitLayout::Single { n }, _) => *n,
            (CircuitLayout::Pair { n_top, .. }, Register::Top) => *n_top,
            (CircuitLayout::Pair { n_bot, .. }, Register::Bottom) => *n_bot,
        };
        let check = |index: usize, size: usize| {
            if index < size {
                Ok(())
            } else {
                Err(Error::IndexOutOfRange { index, size })
            }
        };
        match self {
            Gate::Rbs { reg, p, q, .. } => {
                check(*p, size(reg))?;
                check(*q, size(reg))
            }
            Gate::Phase { reg, p, .. } | Gate::ZGate { reg, p } => check(*p, size(reg)),
            Gate::AntiControlledZ { control, targets } => match layout {
                CircuitLayout::Single { .. } => {
                    Err(Error::UnsupportedGateForRegisterShape { gate: "AntiControlledZ" })
                }
                CircuitLayout::Pair { n_top, n_bot } => {
                    check(*control, *n_bot)?;
                    for &t in targets {
                        check(t, *n_top)?;
                    }
                    Ok(())
                }
            },
        }
    }

    /// Global qubit ids the gate touches (top bits first, bottom offset by n_top).
    fn support(&self, n_top: usize) -> Vec<usize> {
        let base = |reg: &Register| if *reg == Register::Bottom { n_top } else { 0 };
        match self {
            Gate::Rbs { reg, p, q, .. } => vec![base(reg) + p, base(reg) + q],
            Gate::Phase { reg, p, .. } | Gate::ZGate { reg, p } => vec![base(reg) + p],
            Gate::AntiControlledZ { control, targets } => {
                let mut s: Vec<usize> = targets.clone();
                s.push(n_top + control);
                s
            }
        }
    }

    /// Depth charged when scheduling: the composite anti-controlled Z
    /// serializes one controlled-Z per target on the shared control qubit.
    fn depth_cost(&self) -> usize {
        match self {
            Gate::AntiControlledZ { targets, .. } => targets.len().max(1),
            _ => 1,
        }
    }
}

/// Register shape a circuit acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircuitLayout {
    Single { n: usize },
    Pair { n_top: usize, n_bot: usize },
}

impl CircuitLayout {
    pub fn total_qubits(&self) -> usize {
        match self {
            CircuitLayout::Single { n } => *n,
            CircuitLayout::Pair { n_top, n_bot } => n_top + n_bot,
        }
    }

    fn n_top(&self) -> usize {
        match self {
            CircuitLayout::Single { n } => *n,
            CircuitLayout::Pair { n_top, .. } => *n_top,
        }
    }
}

/// An ordered gate list over a fixed register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub layout: CircuitLayout,
    pub gates: Vec<Gate>,
    /// Parallel schedule (gate indices per layer), built on demand.
    depth_layers: Option<Vec<Vec<usize>>>,
}

impl Circuit {
    pub fn single(n: usize) -> Self {
        Circuit { layout: CircuitLayout::Single { n }, gates: Vec::new(), depth_layers: None }
    }

    pub fn pair(n_top: usize, n_bot: usize) -> Self {
        Circuit { layout: CircuitLayout::Pair { n_top, n_bot }, gates: Vec::new(), depth_layers: None }
    }

    pub fn push(&mut self, gate: Gate) {
        self.depth_layers = None;
        self.gates.push(gate);
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) {
        self.depth_layers = None;
        self.gates.extend(gates);
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Checks every gate against the layout bounds.
    pub fn validate(&self) -> Result<()> {
        for g in &self.gates {
            g.check_bounds(&self.layout)?;
        }
        Ok(())
    }

    /// Reversed gate order with each gate inverted.
    pub fn adjoint(&self) -> Circuit {
        Circuit {
            layout: self.layout,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            depth_layers: None,
        }
    }

    /// Greedy as-soon-as-possible layering: a gate lands on the first layer
    /// after every earlier gate that shares a qubit with it.
    pub fn layered_schedule(&self) -> Vec<Vec<usize>> {
        if let Some(layers) = &self.depth_layers {
            return layers.clone();
        }
        let n_top = self.layout.n_top();
        let mut frontier = vec![0usize; self.layout.total_qubits()];
        let mut layers: Vec<Vec<usize>> = Vec::new();
        for (idx, gate) in self.gates.iter().enumerate() {
            let support = gate.support(n_top);
            let layer = support.iter().map(|&q| frontier[q]).max().unwrap_or(0);
            if layer == layers.len() {
                layers.push(Vec::new());
            }
            layers[layer].push(idx);
            for q in support {
                frontier[q] = layer + 1;
            }
        }
        layers
    }

    /// Computes and caches the parallel schedule.
    pub fn with_layers(mut self) -> Self {
        self.depth_layers = Some(self.layered_schedule());
        self
    }

    /// Number of parallel layers.
    pub fn depth(&self) -> usize {
        self.layered_schedule().len()
    }

    /// Depth with composite gates charged their serialized cost
    /// (see [`Gate::depth_cost`]).
    pub fn measured_depth(&self) -> usize {
        self.layered_schedule()
            .iter()
            .map(|layer| layer.iter().map(|&i| self.gates[i].depth_cost()).max().unwrap_or(1))
            .sum()
    }
}

/// The 4×4 RBS unitary in basis order |00⟩, |01⟩, |10⟩, |11⟩.
pub fn rbs_matrix(theta: f64) -> CMat {
    let (s, c) = theta.sin_cos();
    let re = |x: f64| Complex64::new(x, 0.0);
    CMat::from_rows(vec![
        vec![re(1.0), re(0.0), re(0.0), re(0.0)],
        vec![re(0.0), re(c), re(s), re(0.0)],
        vec![re(0.0), re(-s), re(c), re(0.0)],
        vec![re(0.0), re(0.0), re(0.0), re(1.0)],
    ])
}

/// Givens action of the RBS middle block: `a_q` is the |01⟩-role amplitude
/// (qubit q hot), `a_p` the |10⟩ role. Returns (a_q', a_p').
#[inline]
pub(crate) fn rbs_rotate(c: f64, s: f64, a_q: Amplitude, a_p: Amplitude) -> (Amplitude, Amplitude) {
    (c * a_q + s * a_p, c * a_p - s * a_q)
}

// ---------------------------------------------------------------------------
// Weight-1 states of a single register
// ---------------------------------------------------------------------------

/// A superposition over the weight-1 basis of one register.
#[derive(Debug, Clone, PartialEq)]
pub struct UnaryState {
    pub n: usize,
    pub amps: Vec<Amplitude>,
}

impl UnaryState {
    pub fn basis(n: usize, hot: usize) -> Self {
        assert!(hot < n);
        let mut amps = vec![Amplitude::ZERO; n];
        amps[hot] = Amplitude::ONE;
        UnaryState { n, amps }
    }

    pub fn from_amps(amps: Vec<Amplitude>) -> Self {
        UnaryState { n: amps.len(), amps }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &UnaryState) -> f64 {
        assert_eq!(self.n, other.n);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.check_bounds(&CircuitLayout::Single { n: self.n })?;
        match gate {
            Gate::Rbs { p, q, theta, .. } => {
                let (s, c) = theta.sin_cos();
                let (aq, ap) = rbs_rotate(c, s, self.amps[*q], self.amps[*p]);
                self.amps[*q] = aq;
                self.amps[*p] = ap;
            }
            Gate::Phase { p, phi, .. } => self.amps[*p] *= phi,
            Gate::ZGate { p, .. } => self.amps[*p] = -self.amps[*p],
            Gate::AntiControlledZ { .. } => unreachable!("rejected by bounds check"),
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        expect_single(circuit, self.n)?;
        for g in &circuit.gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }
}

fn expect_single(circuit: &Circuit, n: usize) -> Result<()> {
    match circuit.layout {
        CircuitLayout::Single { n: m } if m == n => Ok(()),
        CircuitLayout::Single { n: m } => Err(Error::LengthMismatch { expected: n, got: m }),
        CircuitLayout::Pair { .. } => {
            Err(Error::ShapeMismatch("expected a single-register circuit".into()))
        }
    }
}

// ---------------------------------------------------------------------------
// One-hot-per-register states of a register pair
// ---------------------------------------------------------------------------

/// A superposition over products of weight-1 states of two registers.
/// `amps[(i, j)]` is the coefficient of top `e_i` with bottom `e_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairState {
    pub n_top: usize,
    pub n_bot: usize,
    pub amps: CMat,
}

impl PairState {
    pub fn basis(n_top: usize, n_bot: usize, i: usize, j: usize) -> Self {
        assert!(i < n_top && j < n_bot);
        let mut amps = CMat::zeros(n_top, n_bot);
        amps[(i, j)] = Amplitude::ONE;
        PairState { n_top, n_bot, amps }
    }

    pub fn from_amps(amps: CMat) -> Self {
        PairState { n_top: amps.rows, n_bot: amps.cols, amps }
    }

    pub fn norm(&self) -> f64 {
        self.amps.frob_norm()
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.check_bounds(&CircuitLayout::Pair { n_top: self.n_top, n_bot: self.n_bot })?;
        match gate {
            Gate::Rbs { reg: Register::Top, p, q, theta } => {
                let (s, c) = theta.sin_cos();
                for j in 0..self.n_bot {
                    let (aq, ap) = rbs_rotate(c, s, self.amps[(*q, j)], self.amps[(*p, j)]);
                    self.amps[(*q, j)] = aq;
                    self.amps[(*p, j)] = ap;
                }
            }
            Gate::Rbs { reg: Register::Bottom, p, q, theta } => {
                let (s, c) = theta.sin_cos();
                for i in 0..self.n_top {
                    let (aq, ap) = rbs_rotate(c, s, self.amps[(i, *q)], self.amps[(i, *p)]);
                    self.amps[(i, *q)] = aq;
                    self.amps[(i, *p)] = ap;
                }
            }
            Gate::Phase { reg: Register::Top, p, phi } => {
                for v in self.amps.row_mut(*p) {
                    *v *= phi;
                }
            }
            Gate::Phase { reg: Register::Bottom, p, phi } => {
                for i in 0..self.n_top {
                    self.amps[(i, *p)] *= phi;
                }
            }
            Gate::ZGate { reg, p } => {
                return self.apply_gate(&Gate::Phase {
                    reg: *reg,
                    p: *p,
                    phi: -Amplitude::ONE,
                });
            }
            Gate::AntiControlledZ { control, targets } => {
                // Every basis state has exactly one hot bottom qubit, so the
                // control is cold precisely on columns other than `control`.
                for &t in targets {
                    for j in 0..self.n_bot {
                        if j != *control {
                            self.amps[(t, j)] = -self.amps[(t, j)];
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        match circuit.layout {
            CircuitLayout::Pair { n_top, n_bot } if n_top == self.n_top && n_bot == self.n_bot => {}
            _ => return Err(Error::ShapeMismatch("circuit layout does not match pair state".into())),
        }
        for g in &circuit.gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &PairState) -> f64 {
        self.amps.max_abs_diff(&other.amps)
    }
}

// ---------------------------------------------------------------------------
// Weight-2 states of a single register
// ---------------------------------------------------------------------------

/// Number of weight-2 basis states of n qubits.
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Lexicographic index of the pair {p, q}, p < q, among all C(n,2) pairs.
pub fn pair_index(n: usize, p: usize, q: usize) -> usize {
    debug_assert!(p < q && q < n);
    // Pairs starting with 0..p occupy (n-1) + (n-2) + ... + (n-p) slots.
    p * (2 * n - p - 1) / 2 + (q - p - 1)
}

/// Inverse of [`pair_index`].
pub fn index_pair(n: usize, mut idx: usize) -> (usize, usize) {
    for p in 0..n - 1 {
        let block = n - 1 - p;
        if idx < block {
            return (p, p + 1 + idx);
        }
        idx -= block;
    }
    panic!("pair index out of range");
}

/// A superposition over the weight-2 basis of one register.
#[derive(Debug, Clone, PartialEq)]
pub struct Hw2State {
    pub n: usize,
    pub amps: Vec<Amplitude>,
}

impl Hw2State {
    pub fn new(n: usize) -> Result<Self> {
        if n > HW2_QUBIT_CAP {
            return Err(Error::SectorCapExceeded { qubits: n, cap: HW2_QUBIT_CAP });
        }
        Ok(Hw2State { n, amps: vec![Amplitude::ZERO; pair_count(n)] })
    }

    pub fn basis(n: usize, p: usize, q: usize) -> Result<Self> {
        let mut s = Self::new(n)?;
        s.amps[pair_index(n, p.min(q), p.max(q))] = Amplitude::ONE;
        Ok(s)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn amp(&self, p: usize, q: usize) -> Amplitude {
        self.amps[pair_index(self.n, p.min(q), p.max(q))]
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.check_bounds(&CircuitLayout::Single { n: self.n })?;
        match gate {
            Gate::Rbs { p, q, theta, .. } => {
                let (s, c) = theta.sin_cos();
                // {p,q} itself is the |11⟩ sector of the gate: untouched.
                for r in 0..self.n {
                    if r == *p || r == *q {
                        continue;
                    }
                    let iq = pair_index(self.n, r.min(*q), r.max(*q));
                    let ip = pair_index(self.n, r.min(*p), r.max(*p));
                    let (aq, ap) = rbs_rotate(c, s, self.amps[iq], self.amps[ip]);
                    self.amps[iq] = aq;
                    self.amps[ip] = ap;
                }
            }
            Gate::Phase { p, phi, .. } => {
                for r in 0..self.n {
                    if r != *p {
                        let i = pair_index(self.n, r.min(*p), r.max(*p));
                        self.amps[i] *= phi;
                    }
                }
            }
            Gate::ZGate { p, .. } => {
                for r in 0..self.n {
                    if r != *p {
                        let i = pair_index(self.n, r.min(*p), r.max(*p));
                        self.amps[i] = -self.amps[i];
                    }
                }
            }
            Gate::AntiControlledZ { .. } => unreachable!("rejected by bounds check"),
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        expect_single(circuit, self.n)?;
        for g in &circuit.gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Hw2State) -> f64 {
        assert_eq!(self.n, other.n);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// Restricted matrices and the dense oracle
// ---------------------------------------------------------------------------

/// Weight sector selector for [`restricted_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    Hw1,
    Hw2,
}

/// The circuit's action on one weight sector as an explicit matrix, built by
/// pushing each basis state through the circuit (column k = circuit on basis k).
pub fn restricted_matrix(circuit: &Circuit, sector: Sector) -> Result<CMat> {
    let n = match circuit.layout {
        CircuitLayout::Single { n } => n,
        CircuitLayout::Pair { .. } => {
            return Err(Error::ShapeMismatch("restricted matrices require a single register".into()))
        }
    };
    match sector {
        Sector::Hw1 => {
            let mut m = CMat::zeros(n, n);
            for k in 0..n {
                let mut state = UnaryState::basis(n, k);
                state.apply_circuit(circuit)?;
                m.set_col(k, &state.amps);
            }
            Ok(m)
        }
        Sector::Hw2 => {
            let dim = pair_count(n);
            let mut m = CMat::zeros(dim, dim);
            for k in 0..dim {
                let (p, q) = index_pair(n, k);
                let mut state = Hw2State::basis(n, p, q)?;
                state.apply_circuit(circuit)?;
                m.set_col(k, &state.amps);
            }
            Ok(m)
        }
    }
}

/// Full 2^n state-vector simulation used as the verification oracle.
/// The dense index of top `e_i` ⊗ bottom `e_j` is `(1 << i) | (1 << (n_top + j))`.
pub fn dense_reference_sim(circuit: &Circuit, input: &[Amplitude]) -> Result<Vec<Amplitude>> {
    let n = circuit.layout.total_qubits();
    if n > DENSE_QUBIT_CAP {
        return Err(Error::QubitCapExceeded { qubits: n, cap: DENSE_QUBIT_CAP });
    }
    let dim = 1usize << n;
    if input.len() != dim {
        return Err(Error::LengthMismatch { expected: dim, got: input.len() });
    }
    circuit.validate()?;
    let n_top = circuit.layout.n_top();
    let global = |reg: &Register, i: usize| if *reg == Register::Bottom { n_top + i } else { i };

    let mut v = input.to_vec();
    for gate in &circuit.gates {
        match gate {
            Gate::Rbs { reg, p, q, theta } => {
                let (bp, bq) = (1usize << global(reg, *p), 1usize << global(reg, *q));
                let (s, c) = theta.sin_cos();
                for x in 0..dim {
                    // x is the q-hot (|01⟩-role) representative of its pair.
                    if x & bq != 0 && x & bp == 0 {
                        let y = x ^ bp ^ bq;
                        let (aq, ap) = rbs_rotate(c, s, v[x], v[y]);
                        v[x] = aq;
                        v[y] = ap;
                    }
                }
            }
            Gate::Phase { reg, p, phi } => {
                let bp = 1usize << global(reg, *p);
                for x in 0..dim {
                    if x & bp != 0 {
                        v[x] *= phi;
                    }
                }
            }
            Gate::ZGate { reg, p } => {
                let bp = 1usize << global(reg, *p);
                for x in 0..dim {
                    if x & bp != 0 {
                        v[x] = -v[x];
                    }
                }
            }
            Gate::AntiControlledZ { control, targets } => {
                let bc = 1usize << (n_top + control);
                let tmask: usize = targets.iter().map(|&t| 1usize << t).sum();
                for x in 0..dim {
                    if x & bc == 0 && (x & tmask).count_ones() % 2 == 1 {
                        v[x] = -v[x];
                    }
                }
            }
        }
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Measurement
// ---------------------------------------------------------------------------

/// Outcome counts of repeated computational-basis measurement of a [`PairState`].
#[derive(Debug, Clone, PartialEq)]
pub struct CountMatrix {
    pub n_top: usize,
    pub n_bot: usize,
    pub shots: u64,
    counts: Vec<u64>,
}

impl CountMatrix {
    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.n_bot + j]
    }
}

/// Samples `shots` outcomes from the Born distribution |amps(i,j)|².
/// Deterministic for a fixed seed.
pub fn measure_sample(state: &PairState, shots: u64, seed: u64) -> Result<CountMatrix> {
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { norm, tol: 1e-8 });
    }
    let cells = state.n_top * state.n_bot;
    let mut cdf = Vec::with_capacity(cells);
    let mut acc = 0.0;
    for p in state.amps.data().iter().map(|a| a.norm_sqr()) {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let mut counts = vec![0u64; cells];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * total;
        let k = cdf.partition_point(|&c| c <= u).min(cells - 1);
        counts[k] += 1;
    }
    Ok(CountMatrix { n_top: state.n_top, n_bot: state.n_bot, shots, counts })
}

/// Square-root post-processing of counts: estimates |amps| as sqrt(count/shots).
pub fn amp_estimates(counts: &CountMatrix) -> RMat {
    RMat::from_fn(counts.n_top, counts.n_bot, |i, j| {
        (counts.count(i, j) as f64 / counts.shots as f64).sqrt()
    })
}
