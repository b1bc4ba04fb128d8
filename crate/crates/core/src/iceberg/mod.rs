//! The [[6,4,2]] iceberg code: QPE encoded on four logical qubits with
//! interleaved stabilizer checks, conditional exit and post-selection.
//!
//! Physical order is `[1, 2, 3, 4, a_X, a_Z]`. Logical qubit 1 is the QPE
//! ancilla, 2 and 3 carry the system, and 4 stays in `|+⟩` so that one weight-4
//! logical term reduces to a two-qubit gate.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian::{validate_split, HamiltonianError, SpinHamiltonian};
use crate::sim::{
    controlled_pauli_exp, execute, inject_faults, Basis, Clifford1, GateOp, InitKind, NoiseMode,
    NoiseModel, Pauli, PauliString, QpeParams, SimError, StateVector,
};

pub const N_PHYSICAL: usize = 6;
pub const A_X: usize = 4;
pub const A_Z: usize = 5;
pub const DEFAULT_SYNDROME_FREQUENCY: u32 = 8;

pub const PREP_GATES_HF: u32 = 9;
pub const PREP_GATES_EXACT: u32 = 14;
pub const SYNDROME_GATES: u32 = 12;
pub const FINAL_GATES: u32 = 8;

/// Rotation angle of the exact-ground-state preparation, `-0.07113π`.
pub const EXACT_ALPHA: f64 = -0.07113 * std::f64::consts::PI;

const ALL_QUBITS: [usize; N_PHYSICAL] = [0, 1, 2, 3, 4, 5];

#[derive(Debug, Error)]
pub enum IcebergError {
    #[error("syndrome frequency f must be at least 1")]
    InvalidFrequency,
    #[error("logical state needs 16 amplitudes, got {0}")]
    LogicalLength(usize),
    #[error("logical qubit index {0} outside 1..=4")]
    LogicalIndex(usize),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}

pub fn stabilizer_x() -> PauliString {
    PauliString::uniform(&ALL_QUBITS, Pauli::X)
}

pub fn stabilizer_z() -> PauliString {
    PauliString::uniform(&ALL_QUBITS, Pauli::Z)
}

fn check_logical(i: usize) -> Result<usize, IcebergError> {
    if (1..=4).contains(&i) {
        Ok(i - 1)
    } else {
        Err(IcebergError::LogicalIndex(i))
    }
}

/// `X̄_i = X_i X_{a_X}` for logical `i` in `1..=4`.
pub fn logical_x(i: usize) -> Result<PauliString, IcebergError> {
    let q = check_logical(i)?;
    Ok(PauliString::uniform(&[q, A_X], Pauli::X))
}

/// `Z̄_i = Z_i Z_{a_Z}`.
pub fn logical_z(i: usize) -> Result<PauliString, IcebergError> {
    let q = check_logical(i)?;
    Ok(PauliString::uniform(&[q, A_Z], Pauli::Z))
}

/// `Ȳ_i = i X̄_i Z̄_i = Y_i X_{a_X} Z_{a_Z}`.
pub fn logical_y(i: usize) -> Result<PauliString, IcebergError> {
    let q = check_logical(i)?;
    Ok(PauliString::new(vec![
        (q, Pauli::Y),
        (A_X, Pauli::X),
        (A_Z, Pauli::Z),
    ])?)
}

/// Encoding isometry: `Σ c_x |x⟩ ↦ Σ c_x X̄^x |0̄⟩`, with `|0̄⟩` the `S_X`
/// projection of `|000000⟩`. Logical qubit 1 is the most significant bit.
pub fn encode_logical(logical: &StateVector) -> Result<StateVector, IcebergError> {
    let c = logical.amplitudes();
    if c.len() != 16 {
        return Err(IcebergError::LogicalLength(c.len()));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << N_PHYSICAL];
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for (x, &cx) in c.iter().enumerate() {
        let parity = (x.count_ones() % 2) as usize;
        let b = (x << 2) | (parity << 1);
        amps[b] += cx * r;
        amps[b ^ 0b111111] += cx * r;
    }
    Ok(StateVector::from_amplitudes(amps)?)
}

/// Logical amplitudes of a code-space state; inverse of `encode_logical`.
pub fn decode_logical(physical: &StateVector) -> Result<StateVector, IcebergError> {
    let a = physical.amplitudes();
    if a.len() != 1 << N_PHYSICAL {
        return Err(SimError::AmplitudeLength(a.len()).into());
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let c = (0..16usize)
        .map(|x| {
            let b = (x << 2) | (((x.count_ones() % 2) as usize) << 1);
            (a[b] + a[b ^ 0b111111]) * r
        })
        .collect();
    Ok(StateVector::from_amplitudes(c)?)
}

/// Unencoded four-qubit `|+00+⟩`, or its rotation `R_Z^{(2)}(φ) R_{Y2X3}(α)`.
pub fn logical_initial_state(
    init: InitKind,
    angles: (f64, f64),
) -> Result<StateVector, IcebergError> {
    let mut s = StateVector::new(4)?;
    s.apply_clifford(Clifford1::H, 0)?;
    s.apply_clifford(Clifford1::H, 3)?;
    if init == InitKind::ExactEigenstate {
        let (alpha, phase) = angles;
        s.apply_pauli_exp(
            &PauliString::new(vec![(1, Pauli::Y), (2, Pauli::X)])?,
            alpha,
        )?;
        s.apply_pauli_exp(&PauliString::single(1, Pauli::Z), phase)?;
    }
    Ok(s)
}

/// The code word of `|+00+⟩` (or `e^{-iαY₂X₃/2}|+00+⟩ with α = -0.07113π`).
pub fn encode_logical_state(init: InitKind) -> Result<StateVector, IcebergError> {
    encode_logical(&logical_initial_state(init, (EXACT_ALPHA, 0.0))?)
}

/// Encoded ctrl-u for one Trotter step of length `tau`, in the frame where
/// logical qubits 2 and 3 carry an extra `S†`, so that `Ȳ2Ȳ3` appears as
/// `X̄2X̄3 = X_2X_3` and `Z̄1X̄2X̄3 ≡ -Y_1Y_{a_Z}` on the `S_X = X̄4 = 1` sector.
pub fn compile_logical_ctrl_u(h: &SpinHamiltonian, tau: f64) -> Vec<GateOp> {
    let [h1, h2, h3, _, _] = h.h;
    let pair = |a: usize, pa: Pauli, b: usize, pb: Pauli, theta: f64| {
        GateOp::rotation(
            PauliString::new(vec![(a, pa), (b, pb)]).expect("distinct"),
            theta,
        )
    };
    vec![
        pair(1, Pauli::X, 2, Pauli::X, h3 * tau),
        pair(0, Pauli::Y, A_Z, Pauli::Y, h3 * tau),
        pair(2, Pauli::Z, A_Z, Pauli::Z, h2 * tau),
        pair(0, Pauli::Z, 2, Pauli::Z, -h2 * tau),
        pair(1, Pauli::Z, A_Z, Pauli::Z, h1 * tau),
        pair(0, Pauli::Z, 1, Pauli::Z, -h1 * tau),
    ]
}

/// Encoded ctrl-v with `R_Z(β)` folded in. `Z̄1Z̄2Z̄3` reduces to `Z_4 Z_{a_X}`
/// through `S_Z`.
pub fn compile_logical_ctrl_v(h: &SpinHamiltonian, k: u32, t: f64, beta: f64) -> Vec<GateOp> {
    let [_, _, _, h4, h5] = h.h;
    let kt = f64::from(k) * t;
    vec![
        GateOp::rotation(PauliString::uniform(&[1, 2], Pauli::Z), h4 * kt),
        GateOp::rotation(PauliString::uniform(&[3, A_X], Pauli::Z), -h4 * kt),
        GateOp::rotation(PauliString::uniform(&[0, A_Z], Pauli::Z), beta - h5 * kt),
    ]
}

/// The unencoded gates the compiled ctrl-u and ctrl-v stand for, on a
/// four-qubit logical register in the same `S†` frame.
pub fn logical_reference_ctrl_u(h: &SpinHamiltonian, tau: f64) -> Vec<GateOp> {
    let [h1, h2, h3, _, _] = h.h;
    let mut out = Vec::new();
    out.extend(controlled_pauli_exp(
        0,
        &PauliString::uniform(&[1, 2], Pauli::X),
        h3 * tau,
    ));
    out.extend(controlled_pauli_exp(
        0,
        &PauliString::single(2, Pauli::Z),
        h2 * tau,
    ));
    out.extend(controlled_pauli_exp(
        0,
        &PauliString::single(1, Pauli::Z),
        h1 * tau,
    ));
    out
}

pub fn logical_reference_ctrl_v(h: &SpinHamiltonian, k: u32, t: f64, beta: f64) -> Vec<GateOp> {
    let [_, _, _, h4, h5] = h.h;
    let kt = f64::from(k) * t;
    let mut out =
        controlled_pauli_exp(0, &PauliString::uniform(&[1, 2], Pauli::Z), h4 * kt).to_vec();
    out.push(GateOp::rotation(
        PauliString::single(0, Pauli::Z),
        beta - h5 * kt,
    ));
    out
}

/// `6n + 12⌊n/f⌋ + 20 + 5Δ` for `n` Trotter steps.
pub fn encoded_gate_count(steps: u32, f: u32, init: InitKind) -> u32 {
    let delta = u32::from(init == InitKind::ExactEigenstate);
    6 * steps + SYNDROME_GATES * (steps / f.max(1)) + PREP_GATES_HF + 3 + FINAL_GATES + 5 * delta
}

/// `d = 1 - (1 - p2)^{N_2Q}` for the encoded circuit.
pub fn discard_rate_model(steps: u32, f: u32, p2: f64, init: InitKind) -> f64 {
    crate::sim::global_error_rate(p2, encoded_gate_count(steps, f, init))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    /// Ideal preparation followed by its noise budget and a stabilizer check.
    Prep {
        budget: u32,
    },
    Gates(Vec<GateOp>),
    /// `X` on every physical qubit.
    InsertSx,
    Syndrome {
        block: u32,
    },
    /// A deterministic Pauli, for fault-injection experiments.
    Inject(PauliString),
    Final,
}

impl Segment {
    fn cost_2q(&self) -> u32 {
        match self {
            Segment::Prep { budget } => *budget,
            Segment::Gates(g) => g.iter().map(GateOp::cost_2q).sum(),
            Segment::Syndrome { .. } => SYNDROME_GATES,
            Segment::Final => FINAL_GATES,
            Segment::InsertSx | Segment::Inject(_) => 0,
        }
    }

    fn is_check(&self) -> bool {
        matches!(
            self,
            Segment::Prep { .. } | Segment::Syndrome { .. } | Segment::Final
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedOptions {
    pub f: u32,
    pub insert_sx: bool,
}

impl Default for EncodedOptions {
    fn default() -> Self {
        Self {
            f: DEFAULT_SYNDROME_FREQUENCY,
            insert_sx: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedCircuit {
    /// Ideal code word the preparation produces.
    pub initial: StateVector,
    pub segments: Vec<Segment>,
    pub two_qubit_count: u32,
    pub options: EncodedOptions,
    pub meta: QpeParams,
}

impl EncodedCircuit {
    pub fn syndrome_points(&self) -> Vec<usize> {
        self.segments
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, Segment::Syndrome { .. }))
            .map(|(i, _)| i)
            .collect()
    }

    /// Segment indices where a shot can exit.
    pub fn exit_points(&self) -> Vec<usize> {
        self.segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_check())
            .map(|(i, _)| i)
            .collect()
    }

    /// Two-qubit gates executed through the end of segment `i`.
    pub fn gates_through(&self, i: usize) -> u32 {
        self.segments[..=i].iter().map(Segment::cost_2q).sum()
    }

    /// Copy with a deterministic Pauli applied right after segment `after`.
    pub fn with_injected_error(&self, after: usize, pauli: PauliString) -> Self {
        let mut out = self.clone();
        out.segments.insert(after + 1, Segment::Inject(pauli));
        out
    }
}

pub fn build_encoded_qpe(
    h: &SpinHamiltonian,
    p: &QpeParams,
    opts: EncodedOptions,
) -> Result<EncodedCircuit, IcebergError> {
    if opts.f == 0 {
        return Err(IcebergError::InvalidFrequency);
    }
    if p.k == 0 {
        return Err(SimError::InvalidDepth.into());
    }
    if p.s == 0 {
        return Err(HamiltonianError::InvalidSteps.into());
    }
    if !p.t.is_finite() || p.t == 0.0 {
        return Err(HamiltonianError::InvalidTime(p.t).into());
    }
    if !p.beta.is_finite() {
        return Err(SimError::NonFinite.into());
    }
    if let Some(split) = p.t_split {
        validate_split(p.t, split)?;
    }
    let angles = match p.init {
        InitKind::HartreeFock => (0.0, 0.0),
        InitKind::ExactEigenstate => crate::sim::eigenstate_prep_angles(h, p.t, p.s, p.t_split)?,
    };
    let mut logical = logical_initial_state(p.init, angles)?;
    logical.apply_clifford(Clifford1::Sdg, 1)?;
    logical.apply_clifford(Clifford1::Sdg, 2)?;
    let initial = encode_logical(&logical)?;

    let taus: Vec<f64> = crate::sim::repetition_times(p.k, p.t, p.t_split)
        .into_iter()
        .flat_map(|t| std::iter::repeat_n(t / f64::from(p.s), p.s as usize))
        .collect();
    let f = opts.f as usize;
    let blocks = taus.len() / f;
    let first_half = f.div_ceil(2);
    let steps = |range: &[f64]| {
        range
            .iter()
            .flat_map(|&tau| compile_logical_ctrl_u(h, tau))
            .collect::<Vec<_>>()
    };

    let budget = if p.init == InitKind::ExactEigenstate {
        PREP_GATES_EXACT
    } else {
        PREP_GATES_HF
    };
    let mut segments = vec![Segment::Prep { budget }];
    for b in 0..blocks {
        let block = &taus[b * f..(b + 1) * f];
        if opts.insert_sx {
            segments.push(Segment::Gates(steps(&block[..first_half])));
            segments.push(Segment::InsertSx);
            segments.push(Segment::Gates(steps(&block[first_half..])));
        } else {
            segments.push(Segment::Gates(steps(block)));
        }
        segments.push(Segment::Syndrome { block: b as u32 });
    }
    let mut tail = steps(&taus[blocks * f..]);
    tail.extend(compile_logical_ctrl_v(h, p.k, p.t, p.beta));
    segments.push(Segment::Gates(tail));
    segments.push(Segment::Final);
    let two_qubit_count = segments.iter().map(Segment::cost_2q).sum();
    Ok(EncodedCircuit {
        initial,
        segments,
        two_qubit_count,
        options: opts,
        meta: *p,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiscardStage {
    None,
    Prep,
    Syndrome(u32),
    Final,
}

impl fmt::Display for DiscardStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscardStage::None => write!(f, "none"),
            DiscardStage::Prep => write!(f, "prep"),
            DiscardStage::Syndrome(b) => write!(f, "syndrome_{b}"),
            DiscardStage::Final => write!(f, "final_meas"),
        }
    }
}

impl FromStr for DiscardStage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(DiscardStage::None),
            "prep" => Ok(DiscardStage::Prep),
            "final_meas" => Ok(DiscardStage::Final),
            _ => s
                .strip_prefix("syndrome_")
                .and_then(|b| b.parse().ok())
                .map(DiscardStage::Syndrome)
                .ok_or_else(|| format!("unknown discard stage {s:?}")),
        }
    }
}

impl Serialize for DiscardStage {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DiscardStage {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub m: Option<u8>,
    pub discarded: bool,
    pub stage: DiscardStage,
    pub g2q: u32,
    pub k: u32,
    pub beta: f64,
}

impl ShotRecord {
    fn kept(m: u8, g2q: u32, meta: &QpeParams) -> Self {
        Self {
            m: Some(m),
            discarded: false,
            stage: DiscardStage::None,
            g2q,
            k: meta.k,
            beta: meta.beta,
        }
    }

    fn discarded(stage: DiscardStage, g2q: u32, meta: &QpeParams) -> Self {
        Self {
            m: None,
            discarded: true,
            stage,
            g2q,
            k: meta.k,
            beta: meta.beta,
        }
    }
}

fn stage_of(segment: &Segment) -> DiscardStage {
    match segment {
        Segment::Prep { .. } => DiscardStage::Prep,
        Segment::Syndrome { block } => DiscardStage::Syndrome(*block),
        _ => DiscardStage::Final,
    }
}

/// Measures both stabilizers; `true` if both read `+1`.
pub fn syndrome_measure(
    state: &mut StateVector,
    rng: &mut dyn RngCore,
) -> Result<(i8, i8), IcebergError> {
    let sx = state.measure_pauli(&stabilizer_x(), rng)?;
    let sz = state.measure_pauli(&stabilizer_z(), rng)?;
    Ok((sx, sz))
}

/// `S_Z` check, then destructive `X` readout of all six qubits. Returns
/// `(accept, m)` with `m = (1 - x_1 x_{a_X})/2`.
pub fn final_measurement(
    state: &mut StateVector,
    rng: &mut dyn RngCore,
) -> Result<(bool, u8), IcebergError> {
    let sz = state.measure_pauli(&stabilizer_z(), rng)?;
    let mut signs = [1i8; N_PHYSICAL];
    for (q, sign) in signs.iter_mut().enumerate() {
        *sign = if state.measure_qubit(q, Basis::X, rng)? == 0 {
            1
        } else {
            -1
        };
    }
    let parity: i8 = signs.iter().product();
    let m = u8::from(signs[0] * signs[A_X] < 0);
    Ok((sz > 0 && parity > 0, m))
}

fn apply_sx(state: &mut StateVector) -> Result<(), SimError> {
    state.apply_pauli(&stabilizer_x())
}

pub fn run_encoded_shot(
    circ: &EncodedCircuit,
    noise: &NoiseModel,
    rng: &mut dyn RngCore,
) -> Result<ShotRecord, IcebergError> {
    match noise.mode {
        NoiseMode::CircuitLevel => run_circuit_level(circ, noise, rng),
        NoiseMode::GlobalAnalytic => {
            let profile = coherent_profile(circ, noise)?;
            Ok(sample_global(circ, &profile, noise.p2, rng))
        }
    }
}

fn run_circuit_level(
    circ: &EncodedCircuit,
    noise: &NoiseModel,
    rng: &mut dyn RngCore,
) -> Result<ShotRecord, IcebergError> {
    let mut state = circ.initial.clone();
    let mut g2q = 0;
    for seg in &circ.segments {
        match seg {
            Segment::Gates(gates) => {
                g2q += execute(&mut state, gates, noise, Some(&mut *rng))?.two_qubit_gates;
            }
            Segment::InsertSx => apply_sx(&mut state)?,
            Segment::Inject(p) => state.apply_pauli(p)?,
            Segment::Prep { budget } => {
                g2q += budget;
                inject_faults(&mut state, &ALL_QUBITS, *budget, noise.p2, rng)?;
                if syndrome_measure(&mut state, rng)? != (1, 1) {
                    return Ok(ShotRecord::discarded(DiscardStage::Prep, g2q, &circ.meta));
                }
            }
            Segment::Syndrome { block } => {
                g2q += SYNDROME_GATES;
                inject_faults(&mut state, &ALL_QUBITS, SYNDROME_GATES, noise.p2, rng)?;
                if syndrome_measure(&mut state, rng)? != (1, 1) {
                    return Ok(ShotRecord::discarded(
                        DiscardStage::Syndrome(*block),
                        g2q,
                        &circ.meta,
                    ));
                }
            }
            Segment::Final => {
                g2q += FINAL_GATES;
                inject_faults(&mut state, &ALL_QUBITS, FINAL_GATES, noise.p2, rng)?;
                let (accept, m) = final_measurement(&mut state, rng)?;
                return Ok(if accept {
                    ShotRecord::kept(m, g2q, &circ.meta)
                } else {
                    ShotRecord::discarded(DiscardStage::Final, g2q, &circ.meta)
                });
            }
        }
    }
    unreachable!("encoded circuits end with a final measurement")
}

/// Deterministic behaviour under the coherent part of a noise model: the
/// probability of passing each check given the previous ones, and
/// `Pr[m = 0]` among accepted shots.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentProfile {
    /// `(segment index, pass probability)` for every check.
    pub checks: Vec<(usize, f64)>,
    pub p0_accepted: f64,
}

impl CoherentProfile {
    pub fn acceptance(&self) -> f64 {
        self.checks.iter().map(|c| c.1).product()
    }
}

pub fn coherent_profile(
    circ: &EncodedCircuit,
    noise: &NoiseModel,
) -> Result<CoherentProfile, IcebergError> {
    let coherent = noise.coherent_part();
    let mut state = circ.initial.clone();
    let mut checks = Vec::new();
    let project_both = |state: &mut StateVector| -> Result<f64, IcebergError> {
        let px = state.project_pauli(&stabilizer_x(), 1).or_else(zero_ok)?;
        if px == 0.0 {
            return Ok(0.0);
        }
        let pz = state.project_pauli(&stabilizer_z(), 1).or_else(zero_ok)?;
        Ok(px * pz)
    };
    for (i, seg) in circ.segments.iter().enumerate() {
        match seg {
            Segment::Gates(gates) => {
                execute(&mut state, gates, &coherent, None)?;
            }
            Segment::InsertSx => apply_sx(&mut state)?,
            Segment::Inject(p) => state.apply_pauli(p)?,
            Segment::Prep { .. } | Segment::Syndrome { .. } | Segment::Final => {
                let pass = project_both(&mut state)?;
                checks.push((i, pass));
                if pass == 0.0 {
                    return Ok(CoherentProfile {
                        checks,
                        p0_accepted: 0.5,
                    });
                }
            }
        }
    }
    let x1 = PauliString::uniform(&[0, A_X], Pauli::X);
    let p0_accepted = state.prob_plus(&x1)?;
    Ok(CoherentProfile {
        checks,
        p0_accepted,
    })
}

fn zero_ok(e: SimError) -> Result<f64, SimError> {
    match e {
        SimError::ZeroProjection => Ok(0.0),
        other => Err(other),
    }
}

/// Noiseless `Pr[m = 0]` of the encoded circuit among accepted shots.
pub fn encoded_outcome_prob(circ: &EncodedCircuit) -> Result<f64, IcebergError> {
    Ok(coherent_profile(circ, &NoiseModel::noiseless())?.p0_accepted)
}

/// Global-depolarizing shot: every two-qubit gate fails independently with
/// probability `p2` and any failure is caught at the next check; coherent
/// errors enter through `profile`.
pub fn sample_global(
    circ: &EncodedCircuit,
    profile: &CoherentProfile,
    p2: f64,
    rng: &mut dyn RngCore,
) -> ShotRecord {
    let mut before = 0u32;
    for &(seg, pass) in &profile.checks {
        let through = circ.gates_through(seg);
        let interval = through - before;
        before = through;
        let survive_faults = (1.0 - p2).powi(interval as i32);
        let u: f64 = rng.random();
        if u >= survive_faults * pass {
            return ShotRecord::discarded(stage_of(&circ.segments[seg]), through, &circ.meta);
        }
    }
    let m = u8::from(rng.random::<f64>() >= profile.p0_accepted);
    ShotRecord::kept(m, circ.two_qubit_count, &circ.meta)
}

/// Mean fraction of the circuit's two-qubit gates executed per shot.
pub fn conditional_exit_ratio(records: &[ShotRecord], circ: &EncodedCircuit) -> Option<f64> {
    if records.is_empty() {
        return None;
    }
    let total: u64 = records.iter().map(|r| u64::from(r.g2q)).sum();
    Some(total as f64 / records.len() as f64 / f64::from(circ.two_qubit_count))
}

pub fn discard_fraction(records: &[ShotRecord]) -> Option<f64> {
    if records.is_empty() {
        return None;
    }
    Some(records.iter().filter(|r| r.discarded).count() as f64 / records.len() as f64)
}

#[cfg(test)]
mod tests;
