use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::bessel::{bessel_ratios, i0_scaled, mean_resultant_length};
use super::likelihood::{check_outcome, Likelihood};
use super::{CircularDistribution, CircularMoment, PosteriorError};

/// Relative tolerance on κ when inverting `I_1/I_0`.
const INVERSION_RTOL: f64 = 1e-10;

/// Above this κ the derivative of `A(κ)` is taken from its asymptotic series;
/// the exact form `1 - A/κ - A²` cancels catastrophically.
const DERIVATIVE_ASYMPTOTIC_KAPPA: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VonMisesPosterior {
    mu: f64,
    kappa: f64,
}

impl VonMisesPosterior {
    pub fn new(mu: f64, kappa: f64) -> Result<Self, PosteriorError> {
        if !mu.is_finite() || !kappa.is_finite() {
            return Err(PosteriorError::NonFinite("von Mises parameter"));
        }
        if kappa < 0.0 {
            return Err(PosteriorError::NegativeConcentration(kappa));
        }
        Ok(Self {
            mu: mu.rem_euclid(TAU),
            kappa,
        })
    }

    pub fn uniform() -> Self {
        Self {
            mu: 0.0,
            kappa: 0.0,
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn vonmises_moment(&self, j: i64) -> CircularMoment {
        CircularMoment::new(j, self.moment(j))
    }

    /// Moments `M_0..=M_n` in one Bessel-ratio sweep.
    pub fn moments_upto(&self, n: usize) -> Vec<Complex64> {
        bessel_ratios(self.kappa, n)
            .into_iter()
            .enumerate()
            .map(|(j, a)| Complex64::from_polar(a, j as f64 * self.mu))
            .collect()
    }

    /// Moment-matched approximation of the exact posterior.
    pub fn update(&self, m: u8, lik: &Likelihood) -> Result<Self, PosteriorError> {
        check_outcome(m)?;
        if lik.q() == 1.0 {
            return Ok(*self);
        }
        let k = lik.k() as usize;
        let moments = self.moments_upto(k + 1);
        let at = |j: i64| -> Complex64 {
            let v = moments[j.unsigned_abs() as usize];
            if j < 0 {
                v.conj()
            } else {
                v
            }
        };
        let k = k as i64;
        let phase = lik.phase(m);
        let weight = lik.harmonic_weight();
        let evidence = 0.5 + 2.0 * weight * (at(k) * phase).re;
        if evidence <= 0.0 {
            return Err(PosteriorError::ZeroEvidence);
        }
        let m1 = (0.5 * at(1) + weight * (phase * at(1 + k) + phase.conj() * at(1 - k))) / evidence;
        invert_first_moment(m1)
    }
}

impl CircularDistribution for VonMisesPosterior {
    fn moment(&self, j: i64) -> Complex64 {
        if j == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let n = j.unsigned_abs() as usize;
        let a = bessel_ratios(self.kappa, n)[n];
        Complex64::from_polar(a, j as f64 * self.mu)
    }

    fn moments(&self, orders: &[i64]) -> Vec<Complex64> {
        let n = orders
            .iter()
            .map(|j| j.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let table = self.moments_upto(n);
        orders
            .iter()
            .map(|&j| {
                let v = table[j.unsigned_abs() as usize];
                if j < 0 {
                    v.conj()
                } else {
                    v
                }
            })
            .collect()
    }

    fn pdf(&self, phi: f64) -> f64 {
        // exp(κ cos) / I0(κ) with both factors scaled by e^{-κ}
        (self.kappa * ((phi - self.mu).cos() - 1.0)).exp() / (2.0 * PI * i0_scaled(self.kappa))
    }
}

/// The von Mises distribution whose first moment is `m1`.
pub fn invert_first_moment(m1: Complex64) -> Result<VonMisesPosterior, PosteriorError> {
    let r = m1.norm();
    if !r.is_finite() {
        return Err(PosteriorError::NonFinite("first moment"));
    }
    if r >= 1.0 {
        return Err(PosteriorError::MomentOutOfRange(r));
    }
    if r == 0.0 {
        return Ok(VonMisesPosterior::uniform());
    }
    let kappa = solve_kappa(r);
    VonMisesPosterior::new(m1.arg(), kappa)
}

fn a_prime(kappa: f64, a: f64) -> f64 {
    if kappa > DERIVATIVE_ASYMPTOTIC_KAPPA {
        let inv = 1.0 / kappa;
        0.5 * inv * inv * (1.0 + 0.5 * inv + 0.5625 * inv * inv)
    } else {
        super::bessel::mean_resultant_length_derivative(kappa, a)
    }
}

/// Root of `A(κ) = r` by Newton steps kept inside a shrinking bracket.
fn solve_kappa(r: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = 1.0;
    while mean_resultant_length(hi) < r {
        lo = hi;
        hi *= 4.0;
    }
    let mut kappa = (r * (2.0 - r * r) / (1.0 - r * r)).clamp(lo, hi);
    if kappa <= lo || kappa >= hi {
        kappa = 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let a = mean_resultant_length(kappa);
        let resid = a - r;
        if resid == 0.0 {
            return kappa;
        }
        if resid < 0.0 {
            lo = kappa;
        } else {
            hi = kappa;
        }
        let step = resid / a_prime(kappa, a);
        let mut next = kappa - step;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - kappa).abs() <= INVERSION_RTOL * next.max(f64::MIN_POSITIVE)
            || hi - lo <= INVERSION_RTOL * lo
        {
            return next;
        }
        kappa = next;
    }
    kappa
}
