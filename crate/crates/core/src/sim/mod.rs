//! Dense statevector simulation of Pauli-exponential programs with
//! depolarizing, rotation-bias and memory noise.

mod circuit;
mod noise;
mod pauli;
mod state;

use thiserror::Error;

pub use circuit::{
    build_qpe_circuit, coherent_outcome_prob, controlled_pauli_exp, eigenstate_prep_angles,
    exact_outcome_prob, outcome_prob_under, parity_state_angles, repetition_times, run_shot,
    GateOp, InitKind, QpeCircuit, QpeParams, ANCILLA, SYSTEM,
};
pub use noise::{
    asap_layers, execute, global_error_rate, inject_faults, random_two_qubit_pauli, rotation_bias,
    ExecReport, NoiseMode, NoiseModel,
};
pub use pauli::{Pauli, PauliString};
pub use state::{basis_pauli, Basis, Clifford1, StateVector, MAX_QUBITS};

use crate::hamiltonian::HamiltonianError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("qubit count {0} outside 1..=12")]
    QubitCount(usize),
    #[error("amplitude vector of length {0} is not 2^n for n in 1..=12")]
    AmplitudeLength(usize),
    #[error("state is not normalized: |ψ|² = {0}")]
    NotNormalized(f64),
    #[error("non-finite value")]
    NonFinite,
    #[error("qubit {0} out of range for a {1}-qubit register")]
    QubitOutOfRange(usize, usize),
    #[error("empty Pauli string")]
    EmptyPauli,
    #[error("Pauli string repeats a qubit")]
    RepeatedQubit,
    #[error("cannot parse Pauli factor {0:?}")]
    Parse(String),
    #[error("projection has zero norm")]
    ZeroProjection,
    #[error("resetting qubit {0} from a superposition needs a random source")]
    NondeterministicReset(usize),
    #[error("measurement needs a random source")]
    MeasurementNeedsRng,
    #[error("invalid noise model: {0}")]
    InvalidNoise(&'static str),
    #[error("repetition count k must be at least 1")]
    InvalidDepth,
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}
