//! Bayesian quantum phase estimation with analytic experiment design, run
//! against a noisy statevector simulation of the Trotterized H2 circuit, with
//! and without the [[6,4,2]] error-detection code.

pub mod calibration;
pub mod circular;
pub mod design;
pub mod hamiltonian;
pub mod iceberg;
pub mod linalg;
pub mod runner;
pub mod sim;
