//! The two-qubit H2 Hamiltonian `h1 Z1 + h2 Z2 + h3 Y1Y2 + h4 Z1Z2 + h5 I`,
//! its spectrum and its Lie-Trotter evolution. Qubit 1 is the leftmost tensor
//! factor, so `Z1 = diag(1, 1, -1, -1)`.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{pauli_word, CMatrix};

/// Coefficients at the equilibrium bond length `R_HH = 0.73486 Å`, in hartree.
pub const H2_COEFFS: [f64; 5] = [-0.3980, -0.3980, -0.1809, 0.0112, -0.3322];

pub const H2_BOND_LENGTH_ANGSTROM: f64 = 0.73486;

/// Pauli word of each coefficient, in order.
pub const TERMS: [&str; 5] = ["ZI", "IZ", "YY", "ZZ", "II"];

#[derive(Debug, Error)]
pub enum HamiltonianError {
    #[error("evolution time must be finite and non-zero, got {0}")]
    InvalidTime(f64),
    #[error("Trotter step count must be at least 1")]
    InvalidSteps,
    #[error("repetition count must be at least 1")]
    InvalidRepetitions,
    #[error("split times ({0}, {1}) need t1 + t2 = 2t and t1 t2 < 0")]
    InvalidSplit(f64, f64),
    #[error("two Trotter eigenvectors overlap the ground state equally")]
    DegenerateOverlap,
    #[error("eigen-decomposition of the Trotter unitary failed")]
    Eigen,
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("could not read Hamiltonian file: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad Hamiltonian json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinHamiltonian {
    pub h: [f64; 5],
}

impl Default for SpinHamiltonian {
    fn default() -> Self {
        Self { h: H2_COEFFS }
    }
}

/// On-disk form: coefficients plus the evolution settings they are used with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianFile {
    pub h: [f64; 5],
    pub t: f64,
    pub s: u32,
}

impl Default for HamiltonianFile {
    fn default() -> Self {
        Self {
            h: H2_COEFFS,
            t: 0.1 * PI,
            s: 1,
        }
    }
}

impl HamiltonianFile {
    pub fn load(path: &Path) -> Result<Self, HamiltonianError> {
        let text = std::fs::read_to_string(path)?;
        let file: Self = serde_json::from_str(&text)?;
        file.validate()?;
        Ok(file)
    }

    pub fn validate(&self) -> Result<(), HamiltonianError> {
        if self.h.iter().any(|v| !v.is_finite()) {
            return Err(HamiltonianError::NonFinite);
        }
        TrotterConfig::new(self.t, self.s, 1).map(|_| ())
    }

    pub fn hamiltonian(&self) -> SpinHamiltonian {
        SpinHamiltonian { h: self.h }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrotterConfig {
    pub t: f64,
    pub s: u32,
    pub k: u32,
}

impl TrotterConfig {
    pub fn new(t: f64, s: u32, k: u32) -> Result<Self, HamiltonianError> {
        if !t.is_finite() || t == 0.0 {
            return Err(HamiltonianError::InvalidTime(t));
        }
        if s == 0 {
            return Err(HamiltonianError::InvalidSteps);
        }
        if k == 0 {
            return Err(HamiltonianError::InvalidRepetitions);
        }
        Ok(Self { t, s, k })
    }
}

#[derive(Debug, Clone)]
pub struct EigenSolution {
    /// Ascending.
    pub energies: [f64; 4],
    /// Eigenvectors as columns, in the order of `energies`.
    pub vectors: CMatrix,
}

impl EigenSolution {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn ground_vector(&self) -> Vec<Complex64> {
        self.vectors.column(0)
    }
}

/// `e^{-iθP}` for a Pauli word `P`.
fn pauli_rotation(word: &str, theta: f64) -> CMatrix {
    let p = pauli_word(word);
    let dim = p.dim();
    &CMatrix::identity(dim).scale(Complex64::new(theta.cos(), 0.0))
        - &p.scale(Complex64::new(0.0, theta.sin()))
}

impl SpinHamiltonian {
    pub fn new(h: [f64; 5]) -> Self {
        Self { h }
    }

    pub fn matrix(&self) -> CMatrix {
        TERMS
            .iter()
            .zip(self.h)
            .map(|(w, c)| pauli_word(w).scale(Complex64::new(c, 0.0)))
            .reduce(|a, b| &a + &b)
            .expect("five terms")
    }

    /// `⟨00|H|00⟩`.
    pub fn hartree_fock_energy(&self) -> f64 {
        self.h[0] + self.h[1] + self.h[3] + self.h[4]
    }

    pub fn commutes_with_parity(&self) -> bool {
        let h = self.matrix();
        let zz = pauli_word("ZZ");
        (&h * &zz).max_abs_diff(&(&zz * &h)) == 0.0
    }

    pub fn exact_ground(&self) -> EigenSolution {
        let (values, vectors) = self.matrix().hermitian_eigen();
        EigenSolution {
            energies: [values[0], values[1], values[2], values[3]],
            vectors,
        }
    }

    /// `e^{-iHt}` from the exact spectrum.
    pub fn exact_evolution(&self, t: f64) -> CMatrix {
        self.matrix().exp_i_hermitian(t)
    }

    /// `(e^{-ih1τZ1} e^{-ih2τZ2} e^{-ih3τY1Y2})^{ks} e^{-ih4ktZ1Z2} e^{-ih5kt}`, `τ = t/s`.
    pub fn trotter_unitary(&self, cfg: &TrotterConfig) -> CMatrix {
        self.trotter_unitary_split(cfg, None)
    }

    /// As `trotter_unitary`, with consecutive Trotter repetitions alternating
    /// between `t2` and `t1`, `t2` first in time, so each pair is
    /// `U(t1) U(t2)`. An unpaired final repetition uses `t`.
    pub fn trotter_unitary_split(&self, cfg: &TrotterConfig, split: Option<(f64, f64)>) -> CMatrix {
        let [h1, h2, h3, h4, h5] = self.h;
        let step = |t: f64| {
            let tau = t / cfg.s as f64;
            let a = &pauli_rotation("ZI", h1 * tau) * &pauli_rotation("IZ", h2 * tau);
            let steps = &a * &pauli_rotation("YY", h3 * tau);
            let mut out = CMatrix::identity(4);
            for _ in 0..cfg.s {
                out = &out * &steps;
            }
            out
        };
        let mut u = CMatrix::identity(4);
        match split {
            None => {
                let one = step(cfg.t);
                for _ in 0..cfg.k {
                    u = &u * &one;
                }
            }
            Some((t1, t2)) => {
                let pair = &step(t1) * &step(t2);
                for _ in 0..cfg.k / 2 {
                    u = &pair * &u;
                }
                if cfg.k % 2 == 1 {
                    u = &step(cfg.t) * &u;
                }
            }
        }
        let kt = cfg.k as f64 * cfg.t;
        let tail = pauli_rotation("ZZ", h4 * kt).scale(Complex64::from_polar(1.0, -h5 * kt));
        &u * &tail
    }

    /// The eigenpair of the single-repetition Trotter unitary whose vector
    /// overlaps the exact ground state most. Phase in `[0, 2π)`.
    pub fn trotter_eigenphase(
        &self,
        t: f64,
        s: u32,
    ) -> Result<(f64, Vec<Complex64>), HamiltonianError> {
        let cfg = TrotterConfig::new(t, s, 1)?;
        let (phase, vec) = self.ground_eigenpair(&self.trotter_unitary(&cfg))?;
        Ok((phase.rem_euclid(TAU), vec))
    }

    /// Per-repetition eigenphase of the split schedule: half the phase of the
    /// `t1, t2` pair, on the branch nearest the unsplit phase.
    pub fn trotter_eigenphase_split(
        &self,
        t: f64,
        s: u32,
        split: (f64, f64),
    ) -> Result<(f64, Vec<Complex64>), HamiltonianError> {
        validate_split(t, split)?;
        let cfg = TrotterConfig::new(t, s, 2)?;
        let (pair_phase, vec) =
            self.ground_eigenpair(&self.trotter_unitary_split(&cfg, Some(split)))?;
        let (unsplit, _) = self.trotter_eigenphase(t, s)?;
        let half = pair_phase / 2.0;
        let branch = [half, half + PI]
            .into_iter()
            .min_by(|a, b| circular_gap(*a, unsplit).total_cmp(&circular_gap(*b, unsplit)))
            .expect("two branches");
        Ok((branch.rem_euclid(TAU), vec))
    }

    fn ground_eigenpair(&self, u: &CMatrix) -> Result<(f64, Vec<Complex64>), HamiltonianError> {
        let ground = self.exact_ground().ground_vector();
        let (phases, vecs) = u.unitary_eigen().ok_or(HamiltonianError::Eigen)?;
        let mut overlaps: Vec<(f64, usize)> = (0..4)
            .map(|j| {
                let col = vecs.column(j);
                let ov: Complex64 = ground.iter().zip(&col).map(|(g, v)| g.conj() * v).sum();
                (ov.norm_sqr(), j)
            })
            .collect();
        overlaps.sort_by(|a, b| b.0.total_cmp(&a.0));
        if overlaps[0].0 - overlaps[1].0 < 1e-9 {
            return Err(HamiltonianError::DegenerateOverlap);
        }
        let j = overlaps[0].1;
        Ok((phases[j], vecs.column(j)))
    }

    /// `⟨ψ|P|ψ⟩` for each term's Pauli word.
    pub fn term_expectations(&self, state: &[Complex64]) -> [f64; 5] {
        let mut out = [0.0; 5];
        for (slot, w) in out.iter_mut().zip(TERMS) {
            let image = pauli_word(w).mul_vec(state);
            *slot = state
                .iter()
                .zip(&image)
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
                .re;
        }
        out
    }
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

pub fn validate_split(t: f64, (t1, t2): (f64, f64)) -> Result<(), HamiltonianError> {
    let ok = t1.is_finite()
        && t2.is_finite()
        && (t1 + t2 - 2.0 * t).abs() <= 1e-12 * t.abs().max(1.0)
        && t1 * t2 < 0.0;
    if ok {
        Ok(())
    } else {
        Err(HamiltonianError::InvalidSplit(t1, t2))
    }
}

/// The representative of `-(φ + 2πn)/t` nearest `branch_center`.
pub fn energy_from_phase(phi: f64, t: f64, branch_center: f64) -> f64 {
    let period = TAU / t.abs();
    let base = -phi / t;
    base + ((branch_center - base) / period).round() * period
}

/// `(1 - |c0|²) / |c0|²`.
pub fn leakage_bias_bound(c0_sq: f64) -> f64 {
    (1.0 - c0_sq) / c0_sq
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_and_single_terms() {
        let m = SpinHamiltonian::new([0.0, 0.0, 0.0, 0.0, 1.0]).matrix();
        assert_eq!(m, CMatrix::identity(4));
        let m = SpinHamiltonian::new([1.0, 0.0, 0.0, 0.0, 0.0]).matrix();
        assert_eq!(
            m,
            CMatrix::from_diagonal(&[c(1.0), c(1.0), c(-1.0), c(-1.0)])
        );
    }

    #[test]
    fn trace_and_block_structure() {
        let h = SpinHamiltonian::default();
        assert!((h.matrix().trace().re - 4.0 * -0.3322).abs() < 1e-15);
        assert!(h.matrix().is_hermitian(0.0));
        assert!(h.commutes_with_parity());
    }

    #[test]
    fn spectrum_of_printed_coefficients() {
        let sol = SpinHamiltonian::default().exact_ground();
        // closed form: even block eigenvalues h4 + h5 ± sqrt((h1 + h2)² + h3²)
        let [h1, h2, h3, h4, h5] = H2_COEFFS;
        let even = ((h1 + h2).powi(2) + h3 * h3).sqrt();
        let odd = ((h1 - h2).powi(2) + h3 * h3).sqrt();
        let mut expected = [h4 + h5 - even, h4 + h5 + even, h5 - h4 - odd, h5 - h4 + odd];
        expected.sort_by(f64::total_cmp);
        for (got, want) in sol.energies.iter().zip(expected) {
            assert!((got - want).abs() < 1e-14);
        }
        let m = SpinHamiltonian::default().matrix();
        let v = sol.ground_vector();
        let hv = m.mul_vec(&v);
        for (a, b) in hv.iter().zip(&v) {
            assert!((a - b * sol.ground_energy()).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_hamiltonian_ground() {
        let sol = SpinHamiltonian::new([0.0, 0.0, 0.0, 0.0, -0.7]).exact_ground();
        assert!((sol.ground_energy() + 0.7).abs() < 1e-15);
    }

    #[test]
    fn commuting_terms_are_exact() {
        let h = SpinHamiltonian::new([-0.398, -0.398, 0.0, 0.0112, -0.3322]);
        let cfg = TrotterConfig::new(0.1 * PI, 1, 3).unwrap();
        let diff = h
            .trotter_unitary(&cfg)
            .max_abs_diff(&h.exact_evolution(3.0 * 0.1 * PI));
        assert!(diff < 1e-14);
    }

    #[test]
    fn trotter_unitary_is_unitary() {
        let h = SpinHamiltonian::default();
        for (s, k) in [(1, 1), (3, 7), (2, 120)] {
            let u = h.trotter_unitary(&TrotterConfig::new(0.1 * PI, s, k).unwrap());
            assert!((&u.adjoint() * &u).max_abs_diff(&CMatrix::identity(4)) < 1e-12);
        }
    }

    #[test]
    fn first_order_error_scaling() {
        let h = SpinHamiltonian::default();
        let t = 0.1 * PI;
        let exact = h.exact_evolution(t);
        let err = |s| {
            (&h.trotter_unitary(&TrotterConfig::new(t, s, 1).unwrap()) - &exact).operator_norm()
        };
        let (e1, e64) = (err(1), err(64));
        assert!(e1 / e64 >= 30.0, "{e1} {e64}");
        let constants: Vec<f64> = [1, 2, 4, 8, 16]
            .iter()
            .map(|&s| err(s) * s as f64 / (t * t))
            .collect();
        for c in &constants {
            assert!((c / constants[0] - 1.0).abs() < 0.2, "{constants:?}");
        }
    }

    #[test]
    fn phase_energy_round_trip_for_every_eigenstate() {
        let h = SpinHamiltonian::default();
        let t = 0.1 * PI;
        let sol = h.exact_ground();
        for &e in &sol.energies {
            let phi = (-e * t).rem_euclid(TAU);
            assert!((energy_from_phase(phi, t, e + 1.0) - e).abs() < 1e-12);
            assert!((energy_from_phase(phi + TAU, t, e + 1.0) - e).abs() < 1e-12);
        }
        assert_eq!(energy_from_phase(0.0, t, -1.1), 0.0);
    }

    #[test]
    fn leakage_bound_values() {
        assert_eq!(leakage_bias_bound(1.0), 0.0);
        assert!((leakage_bias_bound(0.981) - 0.019_368).abs() < 1e-5);
        assert_eq!(leakage_bias_bound(0.5), 1.0);
    }

    #[test]
    fn split_validation() {
        let t = 0.1 * PI;
        assert!(validate_split(t, (-0.05 * PI, 0.25 * PI)).is_ok());
        assert!(validate_split(2.0 * t, (-0.1 * PI, 0.5 * PI)).is_ok());
        assert!(validate_split(t, (t, t)).is_err());
    }

    #[test]
    fn split_schedule_costs_operator_accuracy() {
        let h = SpinHamiltonian::default();
        let t = 0.1 * PI;
        let split = (-0.05 * PI, 0.25 * PI);
        let cfg = TrotterConfig::new(t, 1, 2).unwrap();
        let exact = h.exact_evolution(2.0 * t);
        let plain = (&h.trotter_unitary(&cfg) - &exact).operator_norm();
        let paired = (&h.trotter_unitary_split(&cfg, Some(split)) - &exact).operator_norm();
        assert!(paired > plain, "{paired} {plain}");

        let (phi, _) = h.trotter_eigenphase_split(t, 1, split).unwrap();
        let (phi_plain, _) = h.trotter_eigenphase(t, 1).unwrap();
        assert!(circular_gap(phi, phi_plain) < 1e-3);
        let e0 = h.exact_ground().ground_energy();
        let bias = energy_from_phase(phi, t, e0) - e0;
        assert!((bias + 2.03e-4).abs() < 5e-6, "{bias}");
    }

    #[test]
    fn json_file_round_trip() {
        let file = HamiltonianFile::default();
        let text = serde_json::to_string(&file).unwrap();
        let back: HamiltonianFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
        let bad = HamiltonianFile { s: 0, ..file };
        assert!(bad.validate().is_err());
    }
}
