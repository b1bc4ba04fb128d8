use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::circuit::GateOp;
use super::pauli::{Pauli, PauliString};
use super::state::StateVector;
use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    #[default]
    CircuitLevel,
    GlobalAnalytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    #[serde(default)]
    pub p2: f64,
    /// Z-rotation angle `γ` of `e^{iγZ}` per idle layer.
    #[serde(default)]
    pub memory_gamma: f64,
    #[serde(default)]
    pub delta_bar: f64,
    #[serde(default)]
    pub mode: NoiseMode,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::noiseless()
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            p2: 0.0,
            memory_gamma: 0.0,
            delta_bar: 0.0,
            mode: NoiseMode::CircuitLevel,
        }
    }

    pub fn depolarizing(p2: f64, mode: NoiseMode) -> Result<Self, SimError> {
        Self {
            p2,
            mode,
            ..Self::noiseless()
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self, SimError> {
        if !(self.p2.is_finite() && (0.0..=1.0).contains(&self.p2)) {
            return Err(SimError::InvalidNoise("p2 must lie in [0, 1]"));
        }
        if !self.memory_gamma.is_finite() || !self.delta_bar.is_finite() {
            return Err(SimError::InvalidNoise("noise parameters must be finite"));
        }
        Ok(self)
    }

    /// The deterministic part: same coherent errors, no stochastic faults.
    pub fn coherent_part(&self) -> Self {
        Self { p2: 0.0, ..*self }
    }

    pub fn has_coherent_errors(&self) -> bool {
        self.memory_gamma != 0.0 || self.delta_bar != 0.0
    }
}

/// `θ + δ̄ sign(θ)`, with no bias on a zero angle.
pub fn rotation_bias(theta: f64, delta_bar: f64) -> f64 {
    if theta == 0.0 {
        0.0
    } else {
        theta + delta_bar * theta.signum()
    }
}

/// Probability that at least one of `n_2q` gates fails: `1 - (1 - p2)^N`.
pub fn global_error_rate(p2: f64, n_2q: u32) -> f64 {
    -(f64::from(n_2q) * (-p2).ln_1p()).exp_m1()
}

/// As-soon-as-possible layering by qubit dependency. Returns, for each layer,
/// the gate indices it holds in program order.
pub fn asap_layers(gates: &[GateOp]) -> Vec<Vec<usize>> {
    let mut ready: Vec<usize> = Vec::new();
    let mut layers: Vec<Vec<usize>> = Vec::new();
    for (i, g) in gates.iter().enumerate() {
        let qubits = g.qubits();
        let top = qubits
            .iter()
            .map(|&q| ready.get(q).copied().unwrap_or(0))
            .max()
            .unwrap_or(0);
        if layers.len() <= top {
            layers.resize_with(top + 1, Vec::new);
        }
        layers[top].push(i);
        for &q in &qubits {
            if ready.len() <= q {
                ready.resize(q + 1, 0);
            }
            ready[q] = top + 1;
        }
    }
    layers
}

/// One of the 15 non-identity two-qubit Paulis on `(a, b)`, chosen uniformly.
pub fn random_two_qubit_pauli(
    a: usize,
    b: usize,
    rng: &mut (impl RngCore + ?Sized),
) -> PauliString {
    let idx = rng.random_range(1..16usize);
    let letter = |v: usize| match v {
        1 => Some(Pauli::X),
        2 => Some(Pauli::Y),
        3 => Some(Pauli::Z),
        _ => None,
    };
    let mut terms = Vec::with_capacity(2);
    if let Some(p) = letter(idx / 4) {
        terms.push((a, p));
    }
    if let Some(p) = letter(idx % 4) {
        terms.push((b, p));
    }
    PauliString::new(terms).expect("non-identity")
}

/// Applies `count` depolarizing opportunities, each on a uniformly random pair
/// of `qubits`.
pub fn inject_faults(
    state: &mut StateVector,
    qubits: &[usize],
    count: u32,
    p2: f64,
    rng: &mut (impl RngCore + ?Sized),
) -> Result<u32, SimError> {
    let mut hits = 0;
    if p2 == 0.0 || qubits.len() < 2 {
        return Ok(0);
    }
    for _ in 0..count {
        if rng.random::<f64>() >= p2 {
            continue;
        }
        let (a, b) = if qubits.len() == 2 {
            (qubits[0], qubits[1])
        } else {
            let i = rng.random_range(0..qubits.len());
            let mut j = rng.random_range(0..qubits.len() - 1);
            if j >= i {
                j += 1;
            }
            (qubits[i], qubits[j])
        };
        state.apply_pauli(&random_two_qubit_pauli(a, b, rng))?;
        hits += 1;
    }
    Ok(hits)
}

/// Outcome of running a gate list.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExecReport {
    /// Two-qubit gate cost of the executed gates.
    pub two_qubit_gates: u32,
    pub faults: u32,
    /// `(classical target, bit)` in program order.
    pub measurements: Vec<(usize, u8)>,
}

/// Runs `gates` layer by layer. Two-qubit Pauli exponentials get the rotation
/// bias and, when `rng` is given, stochastic faults; idle qubits of every layer
/// get `e^{iγZ}`. Measurements need `rng`.
pub fn execute(
    state: &mut StateVector,
    gates: &[GateOp],
    noise: &NoiseModel,
    mut rng: Option<&mut dyn RngCore>,
) -> Result<ExecReport, SimError> {
    let n = state.n_qubits();
    let mut report = ExecReport::default();
    let idle_angle = -2.0 * noise.memory_gamma;
    for layer in asap_layers(gates) {
        let mut busy = vec![false; n];
        for &i in &layer {
            let g = &gates[i];
            for q in g.qubits() {
                if q < n {
                    busy[q] = true;
                }
            }
            match g {
                GateOp::PauliExp {
                    pauli,
                    theta,
                    cost_2q,
                } => {
                    let angle = if pauli.weight() >= 2 {
                        rotation_bias(*theta, noise.delta_bar)
                    } else {
                        *theta
                    };
                    state.apply_pauli_exp(pauli, angle)?;
                    report.two_qubit_gates += cost_2q;
                    if let Some(r) = rng.as_mut() {
                        report.faults +=
                            inject_faults(state, &pauli.support(), *cost_2q, noise.p2, &mut **r)?;
                    }
                }
                GateOp::Clifford1Q { gate, qubit } => state.apply_clifford(*gate, *qubit)?,
                GateOp::Prep { qubit, basis } => match rng.as_mut() {
                    Some(r) => state.prepare_qubit(*qubit, *basis, Some(&mut **r))?,
                    None => state.prepare_qubit::<dyn RngCore>(*qubit, *basis, None)?,
                },
                GateOp::Measure {
                    qubit,
                    basis,
                    target,
                } => {
                    let r = rng.as_mut().ok_or(SimError::MeasurementNeedsRng)?;
                    let bit = state.measure_qubit(*qubit, *basis, &mut **r)?;
                    report.measurements.push((*target, bit));
                }
            }
        }
        if idle_angle != 0.0 {
            for (q, _) in busy.iter().enumerate().filter(|(_, b)| !**b) {
                state.apply_pauli_exp(&PauliString::single(q, Pauli::Z), idle_angle)?;
            }
        }
    }
    Ok(report)
}
