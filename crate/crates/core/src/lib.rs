//! Quantum Fourier neural operators on Hamming-weight-restricted simulators.
//!
//! The crate simulates circuits built from RBS (reconfigurable beam splitter)
//! rotations, phases, and anti-controlled Z blocks directly on the weight-1
//! and weight-2 sectors they preserve, builds the unary-basis QFT and
//! trainable orthogonal layers on top of them, and assembles those into
//! Fourier-layer neural operators trained on 1D Burgers' data.
//!
//! Module map:
//! * [`subspace`]: gates, circuits, restricted states, dense oracle, measurement
//! * [`loader`]: amplitude encoding of vectors/matrices + gate-level loader plans
//! * [`uqft`]: unary-basis quantum Fourier transform (gate and semantic paths)
//! * [`ortho`]: butterfly/pyramid parameterized layers, Z-index sets, compounds
//! * [`qfl`]: the four Fourier-layer variants and complexity accounting
//! * [`qfno`]: full network, analytic gradients, optimizer, checkpoints
//! * [`pde`]: Burgers' data synthesis and dataset file formats
//! * [`verify`]: named invariant suites shared by the CLI and the tests

pub mod error;
pub mod loader;
pub mod mat;
pub mod ortho;
pub mod pde;
pub mod qfl;
pub mod qfno;
pub mod subspace;
pub mod uqft;
pub mod verify;

pub use error::{Error, Result};
