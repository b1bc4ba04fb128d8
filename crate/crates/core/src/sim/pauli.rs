use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    fn letter(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        match c {
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A Pauli operator on explicit qubits, sorted by qubit, no identity factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    terms: Vec<(usize, Pauli)>,
}

impl PauliString {
    pub fn new(mut terms: Vec<(usize, Pauli)>) -> Result<Self, SimError> {
        if terms.is_empty() {
            return Err(SimError::EmptyPauli);
        }
        terms.sort_by_key(|(q, _)| *q);
        if terms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(SimError::RepeatedQubit);
        }
        Ok(Self { terms })
    }

    pub fn single(qubit: usize, p: Pauli) -> Self {
        Self {
            terms: vec![(qubit, p)],
        }
    }

    /// The same letter on every listed qubit.
    pub fn uniform(qubits: &[usize], p: Pauli) -> Self {
        Self::new(qubits.iter().map(|&q| (q, p)).collect()).expect("distinct qubits")
    }

    pub fn terms(&self) -> &[(usize, Pauli)] {
        &self.terms
    }

    pub fn weight(&self) -> usize {
        self.terms.len()
    }

    pub fn support(&self) -> Vec<usize> {
        self.terms.iter().map(|(q, _)| *q).collect()
    }

    pub fn max_qubit(&self) -> usize {
        self.terms.last().map(|(q, _)| *q).unwrap_or(0)
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|(_, p)| *p == Pauli::Z)
    }

    /// Bit masks `(x, z)` for an `n`-qubit register with qubit 0 the most
    /// significant bit, so that `P = i^{#Y} X^x Z^z` with `Z` acting first.
    pub fn masks(&self, n: usize) -> (usize, usize, u32) {
        let (mut x, mut z, mut ny) = (0usize, 0usize, 0u32);
        for &(q, p) in &self.terms {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::X => x |= bit,
                Pauli::Z => z |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
            }
        }
        (x, z, ny)
    }

    /// Whether the two operators commute.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let mut anti = 0;
        for &(q, p) in &self.terms {
            if let Some(&(_, r)) = other.terms.iter().find(|(qq, _)| *qq == q) {
                if p != r {
                    anti += 1;
                }
            }
        }
        anti % 2 == 0
    }

    /// Product `self · other` as `(phase exponent of i, string)`; `None` when
    /// the product is the identity.
    pub fn mul(&self, other: &PauliString) -> (u8, Option<PauliString>) {
        let mut phase = 0u8;
        let mut out: Vec<(usize, Pauli)> = Vec::new();
        let mut qubits: Vec<usize> = self.support();
        qubits.extend(other.support());
        qubits.sort_unstable();
        qubits.dedup();
        for q in qubits {
            let a = self.terms.iter().find(|(qq, _)| *qq == q).map(|t| t.1);
            let b = other.terms.iter().find(|(qq, _)| *qq == q).map(|t| t.1);
            match (a, b) {
                (Some(p), None) | (None, Some(p)) => out.push((q, p)),
                (Some(p), Some(r)) if p == r => {}
                (Some(p), Some(r)) => {
                    let (prod, ph) = single_product(p, r);
                    phase = (phase + ph) % 4;
                    out.push((q, prod));
                }
                (None, None) => unreachable!(),
            }
        }
        if out.is_empty() {
            (phase, None)
        } else {
            (phase, Some(PauliString { terms: out }))
        }
    }
}

/// `p · r` for distinct letters: the third letter with phase `i^{1 or 3}`.
fn single_product(p: Pauli, r: Pauli) -> (Pauli, u8) {
    use Pauli::*;
    match (p, r) {
        (X, Y) => (Z, 1),
        (Y, X) => (Z, 3),
        (Y, Z) => (X, 1),
        (Z, Y) => (X, 3),
        (Z, X) => (Y, 1),
        (X, Z) => (Y, 3),
        _ => unreachable!("letters must differ"),
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(q, p)| format!("{}{}", p.letter(), q))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Parses space-separated factors such as `"Z0 Y2 X3"`.
impl FromStr for PauliString {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut terms = Vec::new();
        for tok in s.split_whitespace() {
            let mut chars = tok.chars();
            let letter = chars
                .next()
                .and_then(Pauli::from_letter)
                .ok_or_else(|| SimError::Parse(tok.to_string()))?;
            let qubit: usize = chars
                .as_str()
                .parse()
                .map_err(|_| SimError::Parse(tok.to_string()))?;
            terms.push((qubit, letter));
        }
        Self::new(terms)
    }
}
