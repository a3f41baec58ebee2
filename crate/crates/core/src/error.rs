//! Crate-wide error type.

/// Errors shared by the simulator, layers, training, and data modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("qubit index {index} out of range for register of {size} qubits")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("gate {gate} is not supported on this register shape")]
    UnsupportedGateForRegisterShape { gate: &'static str },

    #[error("weight-2 sector for {qubits} qubits exceeds the cap of {cap}")]
    SectorCapExceeded { qubits: usize, cap: usize },

    #[error("dense reference simulation is capped at {cap} qubits, got {qubits}")]
    QubitCapExceeded { qubits: usize, cap: usize },

    #[error("state norm {norm} is not 1 within {tol}")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("expected length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("cannot load a vector with zero norm")]
    ZeroVector,

    #[error("cannot load a matrix with zero Frobenius norm")]
    ZeroMatrix,

    #[error("unsupported layout: {0}")]
    UnsupportedLayout(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("relative error is undefined for a zero-norm target")]
    ZeroTarget,

    #[error("loss became non-finite ({0})")]
    NonFiniteLoss(f64),

    #[error("document schema version {found} is not readable by this build (supports {supported})")]
    SchemaVersionMismatch { found: u64, supported: u64 },

    #[error("malformed document: {0}")]
    MalformedDocument(String),

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("time stepping unstable: max|u| grew from {initial:.3e} to {reached:.3e}")]
    UnstableStep { initial: f64, reached: f64 },

    #[error("bad resolution: {0}")]
    BadResolution(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
