//! Distributions over an angular phase and their Bayesian updates.

pub mod bessel;
mod fourier;
mod likelihood;
mod posterior;
mod vonmises;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fourier::FourierPosterior;
pub use likelihood::{mixed_likelihood_eval, Likelihood};
pub use posterior::{to_vonmises, PhasePosterior, Representation, UpdatePolicy, DEFAULT_J_MAX};
pub use vonmises::{invert_first_moment, VonMisesPosterior};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PosteriorError {
    #[error("depth k must be at least 1, got {0}")]
    InvalidDepth(u32),
    #[error("error parameter q must lie in [0, 1], got {0}")]
    InvalidErrorRate(f64),
    #[error("measurement outcome must be 0 or 1, got {0}")]
    InvalidOutcome(u8),
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("negative concentration {0}")]
    NegativeConcentration(f64),
    #[error("|M1| = {0} has no finite von Mises concentration")]
    MomentOutOfRange(f64),
    #[error("observed outcome has zero probability under the prior")]
    ZeroEvidence,
    #[error("coefficient arrays differ in length ({cos} cosine, {sin} sine)")]
    CoefficientLength { cos: usize, sin: usize },
    #[error("mixture weights sum to {0}, not 1")]
    InvalidWeights(f64),
    #[error("bad posterior json: {0}")]
    Schema(String),
}

/// `E[e^{ijφ}]` of some distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularMoment {
    pub j: i64,
    pub value: Complex64,
}

impl CircularMoment {
    pub fn new(j: i64, value: Complex64) -> Self {
        Self { j, value }
    }
}

/// Holevo variance, with `|M_1| = 0` kept distinct from a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HolevoVariance {
    Finite(f64),
    Unbounded,
}

impl HolevoVariance {
    pub fn from_resultant(r: f64) -> Self {
        if r == 0.0 {
            HolevoVariance::Unbounded
        } else {
            HolevoVariance::Finite((1.0 / (r * r) - 1.0).max(0.0))
        }
    }

    /// The variance as a float, `+∞` when unbounded.
    pub fn value(self) -> f64 {
        match self {
            HolevoVariance::Finite(v) => v,
            HolevoVariance::Unbounded => f64::INFINITY,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, HolevoVariance::Unbounded)
    }
}

pub trait CircularDistribution {
    /// `M_j = E[e^{ijφ}]`; `M_0 = 1` and `M_{-j} = conj(M_j)`.
    fn moment(&self, j: i64) -> Complex64;

    fn moments(&self, orders: &[i64]) -> Vec<Complex64> {
        orders.iter().map(|&j| self.moment(j)).collect()
    }

    /// Density on `[0, 2π)`, clamped at zero.
    fn pdf(&self, phi: f64) -> f64;
}
