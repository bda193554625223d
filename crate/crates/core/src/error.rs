use thiserror::Error;

use crate::locc::{Party, QubitId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..={max}", max = crate::MAX_QUBITS)]
    QubitCount(usize),

    #[error("amplitude vector of length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("invalid bit value {0}; expected 0 or 1")]
    InvalidBit(u8),

    #[error("qubit index {index} out of range for {n_qubits} qubits (indices are 1-based)")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),

    #[error("gate of arity {arity} given {targets} target(s)")]
    ArityMismatch { arity: usize, targets: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not unitary (max |U†U - I| entry = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("conditional rule does not define a unitary gate (max |G†G - I| entry = {deviation:.3e})")]
    NonUnitaryResult { deviation: f64 },

    #[error("global phase must have modulus 1, got {0}")]
    PhaseModulus(f64),

    #[error("unknown gate name `{0}`")]
    UnknownGate(String),

    #[error("gate `{0}` requires a phase parameter")]
    MissingPhase(&'static str),

    #[error("draw {0} outside [0, 1)")]
    InvalidDraw(f64),

    #[error("qubit {0} is still entangled or in superposition and cannot be removed")]
    NotDisentangled(usize),

    #[error("measurement outcome {bit} has zero probability")]
    ZeroProbabilityBranch { bit: u8 },

    #[error("{party} does not own qubit {qubit}")]
    Ownership { party: Party, qubit: QubitId },

    #[error("qubit {0} is not live in this system")]
    UnknownQubit(QubitId),

    #[error("qubits {0} and {1} are both held by {2}; the protocol needs one per party")]
    SameParty(QubitId, QubitId, Party),

    #[error("{0} cannot teleport to itself")]
    SelfTeleport(Party),

    #[error("{0} qubits listed for a {1}-qubit system")]
    OwnerCount(usize, usize),

    #[error("protocol exceeded {0} measurement events")]
    TooManyMeasurements(usize),
}
