use thiserror::Error;

/// Errors raised across synthesis, simulation and the dense oracles.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pauli string length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid pauli character {0:?} (expected one of I, X, Y, Z)")]
    InvalidPauliChar(char),

    #[error("coefficient must be finite, got {0}")]
    NonFiniteCoefficient(f64),

    #[error("{what} needs {n_qubits} qubits but the cap is {cap}")]
    TooManyQubits {
        what: &'static str,
        n_qubits: usize,
        cap: usize,
    },

    #[error("identity pauli string cannot be synthesised (it contributes a global factor only)")]
    IdentityString,

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("circuit contains a mid-circuit measurement; no unitary exists")]
    MeasurementInUnitary,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state annihilated at measurement {index}: success probability {probability:e}")]
    StateAnnihilated { index: usize, probability: f64 },

    #[error("non-hermitian input: residual {0:e}")]
    NonHermitian(f64),

    #[error("fermion mode {mode} out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("no ground-state overlap in the initial state")]
    NoGroundOverlap,

    #[error("no successful shots to build statistics from")]
    NoStatistics,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
