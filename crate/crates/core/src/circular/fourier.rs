use std::f64::consts::PI;

use num_complex::Complex64;

use super::likelihood::{check_outcome, Likelihood};
use super::{CircularDistribution, CircularMoment, PosteriorError};

/// Density `1/(2π) + Σ_{j=1}^{J} c_j cos(jφ) + s_j sin(jφ)`.
///
/// Coefficients are stored densely; `cos[j - 1]` holds `c_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierPosterior {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl FourierPosterior {
    pub fn uniform() -> Self {
        Self {
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    pub fn from_coefficients(cos: Vec<f64>, sin: Vec<f64>) -> Result<Self, PosteriorError> {
        if cos.len() != sin.len() {
            return Err(PosteriorError::CoefficientLength {
                cos: cos.len(),
                sin: sin.len(),
            });
        }
        if cos.iter().chain(sin.iter()).any(|v| !v.is_finite()) {
            return Err(PosteriorError::NonFinite("fourier coefficient"));
        }
        Ok(Self { cos, sin })
    }

    /// Highest harmonic `J`.
    pub fn order(&self) -> usize {
        self.cos.len()
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    pub fn fourier_moment(&self, j: usize) -> CircularMoment {
        CircularMoment::new(j as i64, self.moment(j as i64))
    }

    /// Exact conjugate update. The posterior has order `J + k`.
    pub fn update(&self, m: u8, lik: &Likelihood) -> Result<Self, PosteriorError> {
        check_outcome(m)?;
        let k = lik.k() as i64;
        let phase = lik.phase(m);
        let weight = lik.harmonic_weight();
        let evidence = 0.5 + 2.0 * weight * (self.moment(k) * phase).re;
        if evidence <= 0.0 {
            return Err(PosteriorError::ZeroEvidence);
        }
        let order = self.order() + lik.k() as usize;
        let mut cos = Vec::with_capacity(order);
        let mut sin = Vec::with_capacity(order);
        for j in 1..=order as i64 {
            let moment = 0.5 * self.moment(j)
                + weight * (phase * self.moment(j + k) + phase.conj() * self.moment(j - k));
            let moment = moment / evidence;
            cos.push(moment.re / PI);
            sin.push(moment.im / PI);
        }
        Ok(Self { cos, sin })
    }

    /// Density including its microscopic negative excursions.
    pub fn raw_pdf(&self, phi: f64) -> f64 {
        let mut total = 0.5 / PI;
        // Chebyshev-style recurrence for cos(jφ), sin(jφ)
        let step = Complex64::from_polar(1.0, phi);
        let mut rot = step;
        for (c, s) in self.cos.iter().zip(&self.sin) {
            total += c * rot.re + s * rot.im;
            rot *= step;
        }
        total
    }
}

impl CircularDistribution for FourierPosterior {
    fn moment(&self, j: i64) -> Complex64 {
        if j == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let idx = j.unsigned_abs() as usize;
        if idx > self.order() {
            return Complex64::new(0.0, 0.0);
        }
        let value = Complex64::new(PI * self.cos[idx - 1], PI * self.sin[idx - 1]);
        if j > 0 {
            value
        } else {
            value.conj()
        }
    }

    fn pdf(&self, phi: f64) -> f64 {
        self.raw_pdf(phi).max(0.0)
    }
}
