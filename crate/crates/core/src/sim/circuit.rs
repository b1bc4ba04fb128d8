use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::noise::{execute, global_error_rate, NoiseMode, NoiseModel};
use super::pauli::{Pauli, PauliString};
use super::state::{basis_pauli, Basis, Clifford1, StateVector};
use super::SimError;
use crate::hamiltonian::{validate_split, SpinHamiltonian};

/// QPE ancilla in the unencoded layout.
pub const ANCILLA: usize = 0;
/// System qubits 1 and 2 of the Hamiltonian.
pub const SYSTEM: [usize; 2] = [1, 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GateOp {
    /// `e^{-iθP/2}`, with the number of native two-qubit gates it compiles to.
    PauliExp {
        pauli: PauliString,
        theta: f64,
        cost_2q: u32,
    },
    Clifford1Q {
        gate: Clifford1,
        qubit: usize,
    },
    Prep {
        qubit: usize,
        basis: Basis,
    },
    Measure {
        qubit: usize,
        basis: Basis,
        target: usize,
    },
}

impl GateOp {
    pub fn rotation(pauli: PauliString, theta: f64) -> Self {
        let cost_2q = default_cost(pauli.weight());
        GateOp::PauliExp {
            pauli,
            theta,
            cost_2q,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            GateOp::PauliExp { pauli, .. } => pauli.support(),
            GateOp::Clifford1Q { qubit, .. }
            | GateOp::Prep { qubit, .. }
            | GateOp::Measure { qubit, .. } => vec![*qubit],
        }
    }

    pub fn cost_2q(&self) -> u32 {
        match self {
            GateOp::PauliExp { cost_2q, .. } => *cost_2q,
            _ => 0,
        }
    }
}

/// Native two-qubit gates for a Pauli exponential of the given weight.
fn default_cost(weight: usize) -> u32 {
    weight.saturating_sub(1) as u32
}

/// `ctrl(e^{-iθP})` on `control = |1⟩` as `R_P(θ) R_{Z_c P}(-θ)`.
pub fn controlled_pauli_exp(control: usize, pauli: &PauliString, theta: f64) -> [GateOp; 2] {
    let mut terms = pauli.terms().to_vec();
    terms.push((control, Pauli::Z));
    let zp = PauliString::new(terms).expect("control outside the target");
    [
        GateOp::rotation(pauli.clone(), theta),
        GateOp::rotation(zp, -theta),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    #[default]
    HartreeFock,
    ExactEigenstate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QpeParams {
    pub k: u32,
    pub beta: f64,
    pub t: f64,
    pub s: u32,
    pub init: InitKind,
    pub t_split: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpeCircuit {
    pub n_qubits: usize,
    pub gates: Vec<GateOp>,
    pub two_qubit_count: u32,
    pub meta: QpeParams,
}

impl QpeCircuit {
    /// Everything before the final ancilla measurement.
    pub fn unitary_part(&self) -> &[GateOp] {
        let end = self
            .gates
            .iter()
            .rposition(|g| !matches!(g, GateOp::Measure { .. }))
            .map_or(0, |i| i + 1);
        &self.gates[..end]
    }
}

/// Rotation angles `(α, φ)` with `R_Z^{(1)}(φ) R_{Y1X2}(α)|00⟩` equal, up to
/// global phase, to the even-parity vector `(a, 0, 0, b)`.
pub fn parity_state_angles(a: num_complex::Complex64, b: num_complex::Complex64) -> (f64, f64) {
    (2.0 * b.norm().atan2(a.norm()), b.arg() - a.arg())
}

/// Preparation angles for the eigenvector of the repetition unitary (the
/// `t1, t2` pair when split) that overlaps the exact ground state most.
pub fn eigenstate_prep_angles(
    h: &SpinHamiltonian,
    t: f64,
    s: u32,
    t_split: Option<(f64, f64)>,
) -> Result<(f64, f64), SimError> {
    let (_, v) = match t_split {
        Some(split) => h.trotter_eigenphase_split(t, s, split)?,
        None => h.trotter_eigenphase(t, s)?,
    };
    Ok(parity_state_angles(v[0], v[3]))
}

/// Time of each of the `k` ctrl-u repetitions, in circuit order.
pub fn repetition_times(k: u32, t: f64, t_split: Option<(f64, f64)>) -> Vec<f64> {
    match t_split {
        None => vec![t; k as usize],
        Some((t1, t2)) => (0..k)
            .map(|r| {
                if r + 1 == k && k % 2 == 1 {
                    t
                } else if r % 2 == 0 {
                    t2
                } else {
                    t1
                }
            })
            .collect(),
    }
}

/// Unencoded Hadamard-test circuit on `[ancilla, system 1, system 2]`.
pub fn build_qpe_circuit(h: &SpinHamiltonian, p: &QpeParams) -> Result<QpeCircuit, SimError> {
    if p.k == 0 {
        return Err(SimError::InvalidDepth);
    }
    if p.s == 0 {
        return Err(crate::hamiltonian::HamiltonianError::InvalidSteps.into());
    }
    if !p.t.is_finite() || p.t == 0.0 {
        return Err(crate::hamiltonian::HamiltonianError::InvalidTime(p.t).into());
    }
    if !p.beta.is_finite() {
        return Err(SimError::NonFinite);
    }
    if let Some(split) = p.t_split {
        validate_split(p.t, split)?;
    }
    let [h1, h2, h3, h4, h5] = h.h;
    let [s1, s2] = SYSTEM;
    let mut gates = vec![GateOp::Clifford1Q {
        gate: Clifford1::H,
        qubit: ANCILLA,
    }];
    if p.init == InitKind::ExactEigenstate {
        let (alpha, phase) = eigenstate_prep_angles(h, p.t, p.s, p.t_split)?;
        gates.push(GateOp::rotation(
            PauliString::new(vec![(s1, Pauli::Y), (s2, Pauli::X)])?,
            alpha,
        ));
        gates.push(GateOp::rotation(PauliString::single(s1, Pauli::Z), phase));
    }
    let yy = PauliString::uniform(&[s1, s2], Pauli::Y);
    let z1 = PauliString::single(s1, Pauli::Z);
    let z2 = PauliString::single(s2, Pauli::Z);
    for t_rep in repetition_times(p.k, p.t, p.t_split) {
        let tau = t_rep / p.s as f64;
        for _ in 0..p.s {
            gates.extend(controlled_pauli_exp(ANCILLA, &yy, h3 * tau));
            gates.extend(controlled_pauli_exp(ANCILLA, &z2, h2 * tau));
            gates.extend(controlled_pauli_exp(ANCILLA, &z1, h1 * tau));
        }
    }
    let kt = p.k as f64 * p.t;
    let [zz, mut zzz] =
        controlled_pauli_exp(ANCILLA, &PauliString::uniform(&[s1, s2], Pauli::Z), h4 * kt);
    if let GateOp::PauliExp { cost_2q, .. } = &mut zzz {
        *cost_2q = 3;
    }
    gates.push(zz);
    gates.push(zzz);
    gates.push(GateOp::rotation(
        PauliString::single(ANCILLA, Pauli::Z),
        p.beta - h5 * kt,
    ));
    gates.push(GateOp::Measure {
        qubit: ANCILLA,
        basis: Basis::X,
        target: 0,
    });
    let two_qubit_count = gates.iter().map(GateOp::cost_2q).sum();
    Ok(QpeCircuit {
        n_qubits: 3,
        gates,
        two_qubit_count,
        meta: *p,
    })
}

fn final_state(circ: &QpeCircuit, noise: &NoiseModel) -> Result<StateVector, SimError> {
    let mut state = StateVector::new(circ.n_qubits)?;
    execute(
        &mut state,
        circ.unitary_part(),
        &noise.coherent_part(),
        None,
    )?;
    Ok(state)
}

/// Noiseless `Pr[m = 0]`.
pub fn exact_outcome_prob(circ: &QpeCircuit) -> Result<f64, SimError> {
    coherent_outcome_prob(circ, &NoiseModel::noiseless())
}

/// `Pr[m = 0]` with the coherent errors of `noise` and no stochastic faults.
pub fn coherent_outcome_prob(circ: &QpeCircuit, noise: &NoiseModel) -> Result<f64, SimError> {
    final_state(circ, noise)?.prob_plus(&basis_pauli(ANCILLA, Basis::X))
}

/// `Pr[m = 0]` under the global depolarizing form: `(1 - q) p + q/2` with
/// `q = 1 - (1 - p2)^{N_2Q}` and `p` the coherent-noise probability.
pub fn outcome_prob_under(circ: &QpeCircuit, noise: &NoiseModel) -> Result<f64, SimError> {
    let p = coherent_outcome_prob(circ, noise)?;
    let q = global_error_rate(noise.p2, circ.two_qubit_count);
    Ok((1.0 - q) * p + q / 2.0)
}

pub fn run_shot(
    circ: &QpeCircuit,
    noise: &NoiseModel,
    rng: &mut dyn RngCore,
) -> Result<u8, SimError> {
    match noise.mode {
        NoiseMode::GlobalAnalytic => {
            let p0 = outcome_prob_under(circ, noise)?;
            Ok(u8::from(rng.random::<f64>() >= p0))
        }
        NoiseMode::CircuitLevel => {
            let mut state = StateVector::new(circ.n_qubits)?;
            let report = execute(&mut state, &circ.gates, noise, Some(rng))?;
            report
                .measurements
                .last()
                .map(|&(_, bit)| bit)
                .ok_or(SimError::MeasurementNeedsRng)
        }
    }
}
