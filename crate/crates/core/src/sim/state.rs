use num_complex::Complex64;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::pauli::{Pauli, PauliString};
use super::SimError;

pub const MAX_QUBITS: usize = 12;

const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Z,
    X,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Clifford1 {
    H,
    S,
    Sdg,
    X,
    Y,
    Z,
}

impl Clifford1 {
    /// Row-major 2x2 matrix.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match self {
            Clifford1::H => [[r, r], [r, -r]],
            Clifford1::S => [[l, o], [o, i]],
            Clifford1::Sdg => [[l, o], [o, -i]],
            Clifford1::X => [[o, l], [l, o]],
            Clifford1::Y => [[o, -i], [i, o]],
            Clifford1::Z => [[l, o], [o, -l]],
        }
    }
}

/// Dense `n`-qubit state. Qubit 0 is the most significant bit of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn new(n: usize) -> Result<Self, SimError> {
        if n == 0 || n > MAX_QUBITS {
            return Err(SimError::QubitCount(n));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() || len.trailing_zeros() as usize > MAX_QUBITS {
            return Err(SimError::AmplitudeLength(len));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(SimError::NonFinite);
        }
        let state = Self {
            n: len.trailing_zeros() as usize,
            amps,
        };
        if (state.norm_sqr() - 1.0).abs() > NORM_TOL {
            return Err(SimError::NotNormalized(state.norm_sqr()));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    fn check_pauli(&self, p: &PauliString) -> Result<(), SimError> {
        if p.max_qubit() >= self.n {
            return Err(SimError::QubitOutOfRange(p.max_qubit(), self.n));
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<(), SimError> {
        if q >= self.n {
            return Err(SimError::QubitOutOfRange(q, self.n));
        }
        Ok(())
    }

    /// `e^{-iθP/2}`.
    pub fn apply_pauli_exp(&mut self, p: &PauliString, theta: f64) -> Result<(), SimError> {
        if !theta.is_finite() {
            return Err(SimError::NonFinite);
        }
        self.check_pauli(p)?;
        let (x, z, ny) = p.masks(self.n);
        let (s, c) = (theta / 2.0).sin_cos();
        if x == 0 {
            let minus = Complex64::from_polar(1.0, -theta / 2.0);
            let plus = minus.conj();
            for (b, a) in self.amps.iter_mut().enumerate() {
                *a *= if (b & z).count_ones() % 2 == 0 {
                    minus
                } else {
                    plus
                };
            }
            return Ok(());
        }
        // P|b⟩ = i^{ny} (-1)^{|b∧z|} |b⊕x⟩, and -i·i^{ny} is folded in below.
        let factor = Complex64::new(0.0, -s) * i_pow(ny);
        for b in 0..self.amps.len() {
            let bp = b ^ x;
            if bp < b {
                continue;
            }
            let (a0, a1) = (self.amps[b], self.amps[bp]);
            let sign_from_bp = if (bp & z).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            let sign_from_b = if (b & z).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            self.amps[b] = a0 * c + factor * sign_from_bp * a1;
            self.amps[bp] = a1 * c + factor * sign_from_b * a0;
        }
        Ok(())
    }

    /// Applies the Pauli operator itself.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<(), SimError> {
        self.check_pauli(p)?;
        self.amps = self.pauli_image(p);
        Ok(())
    }

    fn pauli_image(&self, p: &PauliString) -> Vec<Complex64> {
        let (x, z, ny) = p.masks(self.n);
        let ph = i_pow(ny);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            let sign = if (b & z).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            out[b ^ x] = ph * sign * a;
        }
        out
    }

    pub fn apply_clifford(&mut self, gate: Clifford1, q: usize) -> Result<(), SimError> {
        self.check_qubit(q)?;
        let m = gate.matrix();
        let bit = self.bit(q);
        for b in 0..self.amps.len() {
            if b & bit != 0 {
                continue;
            }
            let (a0, a1) = (self.amps[b], self.amps[b | bit]);
            self.amps[b] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[b | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩`, real for Hermitian `P`.
    pub fn expectation(&self, p: &PauliString) -> Result<f64, SimError> {
        self.check_pauli(p)?;
        let image = self.pauli_image(p);
        Ok(self
            .amps
            .iter()
            .zip(&image)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .re)
    }

    /// Probability of reading `+1` when measuring `P`.
    pub fn prob_plus(&self, p: &PauliString) -> Result<f64, SimError> {
        Ok(((1.0 + self.expectation(p)?) / 2.0).clamp(0.0, 1.0))
    }

    /// Projects onto the `sign` eigenspace of `P` and renormalizes. Returns
    /// the probability of that outcome.
    pub fn project_pauli(&mut self, p: &PauliString, sign: i8) -> Result<f64, SimError> {
        self.check_pauli(p)?;
        let image = self.pauli_image(p);
        let s = f64::from(sign.signum());
        for (a, pa) in self.amps.iter_mut().zip(image) {
            *a = (*a + pa * s) * 0.5;
        }
        let prob = self.norm_sqr();
        if prob <= 1e-300 {
            return Err(SimError::ZeroProjection);
        }
        let scale = 1.0 / prob.sqrt();
        self.amps.iter_mut().for_each(|a| *a *= scale);
        Ok(prob)
    }

    /// Born-rule measurement of `P`, collapsing the state. Returns `±1`.
    pub fn measure_pauli(
        &mut self,
        p: &PauliString,
        rng: &mut (impl RngCore + ?Sized),
    ) -> Result<i8, SimError> {
        let plus = self.prob_plus(p)?;
        let sign = if rng.random::<f64>() < plus { 1 } else { -1 };
        self.project_pauli(p, sign)?;
        Ok(sign)
    }

    /// Single-qubit measurement; bit 0 is the `+1` eigenvalue of the basis.
    pub fn measure_qubit(
        &mut self,
        q: usize,
        basis: Basis,
        rng: &mut (impl RngCore + ?Sized),
    ) -> Result<u8, SimError> {
        let sign = self.measure_pauli(&basis_pauli(q, basis), rng)?;
        Ok(u8::from(sign < 0))
    }

    /// Puts a qubit in the `+1` eigenstate of `basis`. A qubit that is not
    /// already in a computational basis state needs `rng` for the reset.
    pub fn prepare_qubit<R: RngCore + ?Sized>(
        &mut self,
        q: usize,
        basis: Basis,
        rng: Option<&mut R>,
    ) -> Result<(), SimError> {
        self.check_qubit(q)?;
        let z = PauliString::single(q, Pauli::Z);
        let p1 = 1.0 - self.prob_plus(&z)?;
        let is_one = if p1 < 1e-24 {
            false
        } else if p1 > 1.0 - 1e-24 {
            true
        } else {
            let rng = rng.ok_or(SimError::NondeterministicReset(q))?;
            self.measure_pauli(&z, rng)? < 0
        };
        if is_one {
            self.apply_clifford(Clifford1::X, q)?;
        }
        if basis == Basis::X {
            self.apply_clifford(Clifford1::H, q)?;
        }
        Ok(())
    }
}

pub fn basis_pauli(q: usize, basis: Basis) -> PauliString {
    PauliString::single(
        q,
        match basis {
            Basis::Z => Pauli::Z,
            Basis::X => Pauli::X,
        },
    )
}

fn i_pow(n: u32) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli_word, CMatrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
        let mut v: Vec<Complex64> = (0..1 << n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
        StateVector::from_amplitudes(v).unwrap()
    }

    fn word(p: &PauliString, n: usize) -> String {
        let mut w = vec!['I'; n];
        for &(q, l) in p.terms() {
            w[q] = match l {
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
        }
        w.into_iter().collect()
    }

    fn dense_exp(p: &PauliString, n: usize, theta: f64) -> CMatrix {
        let m = pauli_word(&word(p, n));
        &CMatrix::identity(1 << n).scale(Complex64::new((theta / 2.0).cos(), 0.0))
            - &m.scale(Complex64::new(0.0, (theta / 2.0).sin()))
    }

    #[test]
    fn z_full_turn_is_minus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = random_state(2, &mut rng);
        let before = s.clone();
        s.apply_pauli_exp(&"Z0".parse().unwrap(), std::f64::consts::TAU)
            .unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a + b).norm() < 1e-14);
        }
    }

    #[test]
    fn x_half_turn_on_zero() {
        let mut s = StateVector::new(1).unwrap();
        s.apply_pauli_exp(&"X0".parse().unwrap(), std::f64::consts::PI)
            .unwrap();
        assert!(s.amplitudes()[0].norm() < 1e-15);
        assert!((s.amplitudes()[1] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn pauli_exp_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=4 {
            for _ in 0..40 {
                let terms: Vec<(usize, Pauli)> = (0..n)
                    .filter_map(|q| match rng.random_range(0..4) {
                        0 => None,
                        l => Some((q, Pauli::ALL[l - 1])),
                    })
                    .collect();
                let Ok(p) = PauliString::new(terms) else {
                    continue;
                };
                let theta = rng.random_range(-4.0..4.0);
                let mut s = random_state(n, &mut rng);
                let expect = dense_exp(&p, n, theta).mul_vec(s.amplitudes());
                s.apply_pauli_exp(&p, theta).unwrap();
                for (a, b) in s.amplitudes().iter().zip(&expect) {
                    assert!((a - b).norm() < 1e-12, "{p} {theta}");
                }
                assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
                let image = pauli_word(&word(&p, n)).mul_vec(s.amplitudes());
                let mut t = s.clone();
                t.apply_pauli(&p).unwrap();
                for (a, b) in t.amplitudes().iter().zip(&image) {
                    assert!((a - b).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn cliffords_match_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gates = [
            Clifford1::H,
            Clifford1::S,
            Clifford1::Sdg,
            Clifford1::X,
            Clifford1::Y,
            Clifford1::Z,
        ];
        for n in 1..=4 {
            for &g in &gates {
                for q in 0..n {
                    let mut s = random_state(n, &mut rng);
                    let m = g.matrix();
                    let single = CMatrix::from_rows(&[&m[0], &m[1]]);
                    let id = CMatrix::identity(2);
                    let mut full = CMatrix::identity(1);
                    for j in 0..n {
                        full = full.kron(if j == q { &single } else { &id });
                    }
                    let expect = full.mul_vec(s.amplitudes());
                    s.apply_clifford(g, q).unwrap();
                    for (a, b) in s.amplitudes().iter().zip(&expect) {
                        assert!((a - b).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn projection_and_measurement() {
        let mut s = StateVector::new(2).unwrap();
        s.apply_clifford(Clifford1::H, 0).unwrap();
        let z1: PauliString = "Z1".parse().unwrap();
        assert!((s.prob_plus(&z1).unwrap() - 1.0).abs() < 1e-15);
        let x0: PauliString = "X0".parse().unwrap();
        assert!((s.expectation(&x0).unwrap() - 1.0).abs() < 1e-15);
        let z0: PauliString = "Z0".parse().unwrap();
        let mut t = s.clone();
        let p = t.project_pauli(&z0, -1).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!((t.expectation(&z0).unwrap() + 1.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut ones = 0;
        for _ in 0..2000 {
            let mut u = s.clone();
            ones += u.measure_qubit(0, Basis::Z, &mut rng).unwrap() as u32;
            assert!((u.norm_sqr() - 1.0).abs() < 1e-12);
        }
        assert!((ones as f64 - 1000.0).abs() < 4.0 * 22.4);
        assert!(matches!(
            StateVector::new(1).unwrap().project_pauli(&z0, -1),
            Err(SimError::ZeroProjection)
        ));
    }

    #[test]
    fn prepare_fresh_and_superposed() {
        let mut s = StateVector::new(2).unwrap();
        s.prepare_qubit::<ChaCha8Rng>(1, Basis::X, None).unwrap();
        assert!((s.expectation(&"X1".parse().unwrap()).unwrap() - 1.0).abs() < 1e-15);
        assert!(s.prepare_qubit::<ChaCha8Rng>(1, Basis::Z, None).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        s.prepare_qubit(1, Basis::Z, Some(&mut rng)).unwrap();
        assert!((s.expectation(&"Z1".parse().unwrap()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(StateVector::new(13).is_err());
        assert!(StateVector::new(0).is_err());
        assert!(StateVector::from_amplitudes(vec![Complex64::new(1.0, 0.0); 3]).is_err());
        assert!(StateVector::from_amplitudes(vec![Complex64::new(1.0, 0.0); 2]).is_err());
        let mut s = StateVector::new(2).unwrap();
        assert!(s.apply_pauli_exp(&"Z2".parse().unwrap(), 0.1).is_err());
        assert!(s.apply_pauli_exp(&"Z1".parse().unwrap(), f64::NAN).is_err());
    }
}
