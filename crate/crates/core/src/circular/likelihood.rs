use std::f64::consts::PI;

use num_complex::Complex64;

use super::PosteriorError;

/// Outcome probability of one Hadamard-test shot, with depolarizing damping:
/// `p(m | φ) = (1 + (1 - q) cos(kφ + β - mπ)) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Likelihood {
    k: u32,
    beta: f64,
    q: f64,
}

impl Likelihood {
    pub fn new(k: u32, beta: f64, q: f64) -> Result<Self, PosteriorError> {
        if k < 1 {
            return Err(PosteriorError::InvalidDepth(k));
        }
        if !(0.0..=1.0).contains(&q) || q.is_nan() {
            return Err(PosteriorError::InvalidErrorRate(q));
        }
        if !beta.is_finite() {
            return Err(PosteriorError::NonFinite("beta"));
        }
        Ok(Self { k, beta, q })
    }

    pub fn noiseless(k: u32, beta: f64) -> Result<Self, PosteriorError> {
        Self::new(k, beta, 0.0)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `p(m | φ)`. The `m = 1` branch is computed as `1 - p(0 | φ)` so the
    /// pair sums to one exactly.
    pub fn prob(&self, m: u8, phi: f64) -> f64 {
        let p0 = 0.5 * (1.0 + (1.0 - self.q) * (self.k as f64 * phi + self.beta).cos());
        if m == 0 {
            p0
        } else {
            1.0 - p0
        }
    }

    /// `e^{i(β - mπ)}`, the phase factor shared by every analytic update.
    pub(crate) fn phase(&self, m: u8) -> Complex64 {
        Complex64::from_polar(1.0, self.beta - m as f64 * PI)
    }

    /// Half the contrast, `(1 - q) / 4`, multiplying the shifted harmonics.
    pub(crate) fn harmonic_weight(&self) -> f64 {
        0.25 * (1.0 - self.q)
    }
}

pub(crate) fn check_outcome(m: u8) -> Result<(), PosteriorError> {
    if m > 1 {
        Err(PosteriorError::InvalidOutcome(m))
    } else {
        Ok(())
    }
}

/// Outcome probability when the input is a superposition of eigenstates with
/// weights `|c_i|²` and eigenphases `φ_i`. Diagnostic only.
pub fn mixed_likelihood_eval(
    weights: &[(f64, f64)],
    k: u32,
    beta: f64,
    m: u8,
) -> Result<f64, PosteriorError> {
    check_outcome(m)?;
    let total: f64 = weights.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > 1e-12 || weights.iter().any(|(w, _)| *w < 0.0) {
        return Err(PosteriorError::InvalidWeights(total));
    }
    let contrast: f64 = weights
        .iter()
        .map(|&(w, phi)| w * (k as f64 * phi + beta - m as f64 * PI).cos())
        .sum();
    Ok(0.5 * (1.0 + contrast))
}
