use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fourier::FourierPosterior;
use super::likelihood::Likelihood;
use super::vonmises::{invert_first_moment, VonMisesPosterior};
use super::{CircularDistribution, HolevoVariance, PosteriorError};

/// Default Fourier coefficient budget before switching to von Mises.
pub const DEFAULT_J_MAX: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    Fourier(FourierPosterior),
    VonMises(VonMisesPosterior),
}

/// Which representation the update loop is allowed to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum UpdatePolicy {
    /// Exact Fourier until the budget would be exceeded, then von Mises.
    #[default]
    Adaptive,
    /// Exact Fourier forever, no budget.
    FourierOnly,
    /// Moment-matched von Mises from the first shot.
    #[serde(rename = "vonmises_only", alias = "von_mises_only")]
    VonMisesOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePosterior {
    repr: Representation,
    j_max: usize,
    policy: UpdatePolicy,
}

impl PhasePosterior {
    pub fn uniform(policy: UpdatePolicy, j_max: usize) -> Self {
        let repr = match policy {
            UpdatePolicy::VonMisesOnly => Representation::VonMises(VonMisesPosterior::uniform()),
            _ => Representation::Fourier(FourierPosterior::uniform()),
        };
        Self {
            repr,
            j_max,
            policy,
        }
    }

    pub fn adaptive(j_max: usize) -> Self {
        Self::uniform(UpdatePolicy::Adaptive, j_max)
    }

    pub fn from_fourier(post: FourierPosterior, j_max: usize) -> Self {
        Self {
            repr: Representation::Fourier(post),
            j_max,
            policy: UpdatePolicy::Adaptive,
        }
    }

    pub fn from_vonmises(post: VonMisesPosterior) -> Self {
        Self {
            repr: Representation::VonMises(post),
            j_max: DEFAULT_J_MAX,
            policy: UpdatePolicy::Adaptive,
        }
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn policy(&self) -> UpdatePolicy {
        self.policy
    }

    pub fn is_fourier(&self) -> bool {
        matches!(self.repr, Representation::Fourier(_))
    }

    /// Update with one outcome. Under the adaptive policy a Fourier prior whose
    /// order would exceed `j_max` is converted to von Mises first.
    pub fn update(&self, m: u8, lik: &Likelihood) -> Result<Self, PosteriorError> {
        let repr = match &self.repr {
            Representation::Fourier(f) => {
                let exceeds = f.order() + lik.k() as usize > self.j_max;
                if self.policy == UpdatePolicy::Adaptive && exceeds {
                    Representation::VonMises(to_vonmises(f)?.update(m, lik)?)
                } else {
                    Representation::Fourier(f.update(m, lik)?)
                }
            }
            Representation::VonMises(v) => Representation::VonMises(v.update(m, lik)?),
        };
        Ok(Self {
            repr,
            j_max: self.j_max,
            policy: self.policy,
        })
    }

    pub fn circular_variance(&self) -> f64 {
        (1.0 - self.moment(1).norm()).clamp(0.0, 1.0)
    }

    pub fn holevo_variance(&self) -> HolevoVariance {
        HolevoVariance::from_resultant(self.moment(1).norm())
    }

    /// Posterior mean direction in `[0, 2π)`.
    pub fn mean_phase(&self) -> f64 {
        self.moment(1).arg().rem_euclid(std::f64::consts::TAU)
    }

    /// `E[1 - cos(φ - φ*)]`.
    pub fn expected_cosine_distance(&self, phi_star: f64) -> f64 {
        1.0 - (self.moment(1) * Complex64::from_polar(1.0, -phi_star)).re
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(PosteriorSchema::from(&self.repr))
            .expect("posterior schema is always serializable")
    }

    pub fn from_json_value(
        value: serde_json::Value,
        policy: UpdatePolicy,
        j_max: usize,
    ) -> Result<Self, PosteriorError> {
        let schema: PosteriorSchema =
            serde_json::from_value(value).map_err(|e| PosteriorError::Schema(e.to_string()))?;
        Ok(Self {
            repr: schema.try_into()?,
            j_max,
            policy,
        })
    }
}

impl CircularDistribution for PhasePosterior {
    fn moment(&self, j: i64) -> Complex64 {
        match &self.repr {
            Representation::Fourier(f) => f.moment(j),
            Representation::VonMises(v) => v.moment(j),
        }
    }

    fn moments(&self, orders: &[i64]) -> Vec<Complex64> {
        match &self.repr {
            Representation::Fourier(f) => f.moments(orders),
            Representation::VonMises(v) => v.moments(orders),
        }
    }

    fn pdf(&self, phi: f64) -> f64 {
        match &self.repr {
            Representation::Fourier(f) => f.pdf(phi),
            Representation::VonMises(v) => v.pdf(phi),
        }
    }
}

/// Moment-match a Fourier density on `M_1`.
pub fn to_vonmises(post: &FourierPosterior) -> Result<VonMisesPosterior, PosteriorError> {
    invert_first_moment(post.moment(1))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum PosteriorSchema {
    Fourier {
        #[serde(rename = "J")]
        j: usize,
        c: Vec<f64>,
        s: Vec<f64>,
    },
    VonMises {
        mu: f64,
        kappa: f64,
    },
}

impl From<&Representation> for PosteriorSchema {
    fn from(repr: &Representation) -> Self {
        match repr {
            Representation::Fourier(f) => PosteriorSchema::Fourier {
                j: f.order(),
                c: f.cos_coeffs().to_vec(),
                s: f.sin_coeffs().to_vec(),
            },
            Representation::VonMises(v) => PosteriorSchema::VonMises {
                mu: v.mu(),
                kappa: v.kappa(),
            },
        }
    }
}

impl TryFrom<PosteriorSchema> for Representation {
    type Error = PosteriorError;

    fn try_from(schema: PosteriorSchema) -> Result<Self, Self::Error> {
        match schema {
            PosteriorSchema::Fourier { j, c, s } => {
                if c.len() != j {
                    return Err(PosteriorError::Schema(format!(
                        "J = {j} but {} cosine coefficients",
                        c.len()
                    )));
                }
                Ok(Representation::Fourier(
                    FourierPosterior::from_coefficients(c, s)?,
                ))
            }
            PosteriorSchema::VonMises { mu, kappa } => {
                Ok(Representation::VonMises(VonMisesPosterior::new(mu, kappa)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn cos_posterior() -> PhasePosterior {
        PhasePosterior::adaptive(DEFAULT_J_MAX)
            .update(0, &Likelihood::noiseless(1, 0.0).unwrap())
            .unwrap()
    }

    #[test]
    fn variances_of_simple_posteriors() {
        let uniform = PhasePosterior::adaptive(DEFAULT_J_MAX);
        assert_eq!(uniform.circular_variance(), 1.0);
        assert_eq!(uniform.holevo_variance(), HolevoVariance::Unbounded);

        let post = cos_posterior();
        assert!((post.circular_variance() - 0.5).abs() < 1e-15);
        assert!((post.holevo_variance().value() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn sharp_peak_variance_relation() {
        let sharp = PhasePosterior::from_vonmises(VonMisesPosterior::new(1.0, 100.0).unwrap());
        let ratio = sharp.holevo_variance().value() / (2.0 * sharp.circular_variance());
        assert!((ratio - 1.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn cosine_distance_limits() {
        let phi = 2.4;
        let peak = PhasePosterior::from_vonmises(VonMisesPosterior::new(phi, 1e12).unwrap());
        assert!(peak.expected_cosine_distance(phi) < 1e-9);
        let anti = PhasePosterior::from_vonmises(VonMisesPosterior::new(phi + PI, 1e12).unwrap());
        assert!((anti.expected_cosine_distance(phi) - 2.0).abs() < 1e-9);
        assert_eq!(
            PhasePosterior::adaptive(10).expected_cosine_distance(phi),
            1.0
        );
    }

    #[test]
    fn converts_before_crossing_budget() {
        let lik = Likelihood::noiseless(3, 0.4).unwrap();
        let mut post = PhasePosterior::adaptive(7);
        post = post.update(0, &lik).unwrap();
        post = post.update(1, &lik).unwrap();
        assert!(post.is_fourier());
        let Representation::Fourier(f) = post.representation() else {
            unreachable!()
        };
        let expected = to_vonmises(f).unwrap().update(0, &lik).unwrap();
        post = post.update(0, &lik).unwrap();
        assert_eq!(post.representation(), &Representation::VonMises(expected));
    }

    #[test]
    fn fourier_only_never_converts() {
        let lik = Likelihood::noiseless(5, 0.0).unwrap();
        let mut post = PhasePosterior::uniform(UpdatePolicy::FourierOnly, 3);
        for m in [0, 1, 1, 0] {
            post = post.update(m, &lik).unwrap();
        }
        assert!(post.is_fourier());
    }

    #[test]
    fn conversion_of_uniform() {
        let vm = to_vonmises(&FourierPosterior::uniform()).unwrap();
        assert_eq!((vm.mu(), vm.kappa()), (0.0, 0.0));
    }

    #[test]
    fn json_round_trip() {
        let post = cos_posterior()
            .update(1, &Likelihood::new(2, 0.3, 0.1).unwrap())
            .unwrap();
        let value = post.to_json_value();
        assert_eq!(value["type"], "fourier");
        assert_eq!(value["J"], 3);
        let back =
            PhasePosterior::from_json_value(value, UpdatePolicy::Adaptive, DEFAULT_J_MAX).unwrap();
        assert_eq!(back, post);

        let vm = PhasePosterior::from_vonmises(VonMisesPosterior::new(1.5, 40.0).unwrap());
        let value = vm.to_json_value();
        assert_eq!(value["type"], "vonmises");
        let back =
            PhasePosterior::from_json_value(value, UpdatePolicy::Adaptive, DEFAULT_J_MAX).unwrap();
        assert_eq!(back, vm);
    }

    #[test]
    fn json_rejects_inconsistent_order() {
        let value = serde_json::json!({"type": "fourier", "J": 2, "c": [0.1], "s": [0.0]});
        assert!(PhasePosterior::from_json_value(value, UpdatePolicy::Adaptive, 10).is_err());
    }
}
