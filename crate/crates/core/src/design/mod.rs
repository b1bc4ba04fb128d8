//! Choosing `(k, β)` for the next shot.
//!
//! The exact optimizer maximizes `U_C(k, β) = Σ_m -Var_C[φ | m] p(m)`. Writing
//! the unnormalized posterior first moment for outcome `m` as
//! `N_m(β) = A + B cos(β - mπ) + C sin(β - mπ)`, the utility becomes
//! `-1 + |N_0| + |N_1|` and each `|N_m|²` is a degree-two trigonometric
//! polynomial in `β`.

mod cubic;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circular::{CircularDistribution, PhasePosterior, Representation};

pub use cubic::real_roots_in;

/// Half-width of the k window scanned around `Var_H^{-1/2}` for von Mises priors.
pub const DEFAULT_K_WINDOW: u32 = 5;

/// Samples of the stationarity polynomial used to read off its harmonics.
const STATIONARITY_SAMPLES: usize = 16;

/// Utilities closer than this are treated as tied.
const UTILITY_TIE: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error("k must be at least 1, got {0}")]
    InvalidDepth(u32),
    #[error("k_max must be at least 1")]
    EmptyDepthRange,
    #[error("error parameter q must lie in [0, 1], got {0} at k = {1}")]
    InvalidErrorRate(f64, u32),
    #[error("measurement outcome must be 0 or 1, got {0}")]
    InvalidOutcome(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    pub k: u32,
    pub beta: f64,
}

/// Parameters together with the utility they achieve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredParams {
    pub params: ExperimentParams,
    pub utility: f64,
    pub q: f64,
}

fn check_q(q: f64, k: u32) -> Result<(), DesignError> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(DesignError::InvalidErrorRate(q, k))
    }
}

/// `p(m | k, β) = 1/2 + (1-q)/2 Re(M_k e^{i(β - mπ)})`.
pub fn predictive_prob(
    post: &impl CircularDistribution,
    m: u8,
    k: u32,
    beta: f64,
    q: f64,
) -> Result<f64, DesignError> {
    if m > 1 {
        return Err(DesignError::InvalidOutcome(m));
    }
    if k == 0 {
        return Err(DesignError::InvalidDepth(k));
    }
    check_q(q, k)?;
    let p0 = 0.5 + 0.5 * (1.0 - q) * (post.moment(k as i64) * Complex64::from_polar(1.0, beta)).re;
    Ok(if m == 0 { p0 } else { 1.0 - p0 })
}

/// `N_m = (ā + b̄ cos γ + c̄ sin γ) + i(d̄ + ē cos γ + f̄ sin γ)` with `γ = β - mπ`,
/// and `|N_{0,1}|² = a ± b cos β ± c sin β + d cos 2β + e sin 2β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityCoefficients {
    pub a_bar: f64,
    pub b_bar: f64,
    pub c_bar: f64,
    pub d_bar: f64,
    pub e_bar: f64,
    pub f_bar: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
}

impl UtilityCoefficients {
    /// From prior moments `M_1`, `M_{1+k}` and `M_{1-k}`.
    pub fn from_moments(
        m1: Complex64,
        m1_plus_k: Complex64,
        m1_minus_k: Complex64,
        q: f64,
    ) -> Self {
        let w = 0.25 * (1.0 - q);
        let big_a = 0.5 * m1;
        let big_b = w * (m1_plus_k + m1_minus_k);
        let big_c = Complex64::i() * w * (m1_plus_k - m1_minus_k);
        Self {
            a_bar: big_a.re,
            b_bar: big_b.re,
            c_bar: big_c.re,
            d_bar: big_a.im,
            e_bar: big_b.im,
            f_bar: big_c.im,
            a: big_a.norm_sqr() + 0.5 * (big_b.norm_sqr() + big_c.norm_sqr()),
            b: 2.0 * (big_a * big_b.conj()).re,
            c: 2.0 * (big_a * big_c.conj()).re,
            d: 0.5 * (big_b.norm_sqr() - big_c.norm_sqr()),
            e: (big_b * big_c.conj()).re,
        }
    }

    /// Unnormalized posterior first moment `E[e^{iφ} | m] p(m)`.
    pub fn numerator(&self, m: u8, beta: f64) -> Complex64 {
        let g = beta - m as f64 * PI;
        let (s, c) = g.sin_cos();
        Complex64::new(
            self.a_bar + self.b_bar * c + self.c_bar * s,
            self.d_bar + self.e_bar * c + self.f_bar * s,
        )
    }

    fn even_part(&self, beta: f64) -> (f64, f64) {
        let (s2, c2) = (2.0 * beta).sin_cos();
        (
            self.a + self.d * c2 + self.e * s2,
            2.0 * (self.e * c2 - self.d * s2),
        )
    }

    fn odd_part(&self, beta: f64) -> (f64, f64) {
        let (s, c) = beta.sin_cos();
        (self.b * c + self.c * s, self.c * c - self.b * s)
    }

    /// `f⁺(β)`, the squared modulus of `N_0`.
    pub fn f_plus(&self, beta: f64) -> f64 {
        self.even_part(beta).0 + self.odd_part(beta).0
    }

    /// `f⁻(β)`, the squared modulus of `N_1`.
    pub fn f_minus(&self, beta: f64) -> f64 {
        self.even_part(beta).0 - self.odd_part(beta).0
    }

    pub fn utility(&self, beta: f64) -> f64 {
        -1.0 + self.f_plus(beta).max(0.0).sqrt() + self.f_minus(beta).max(0.0).sqrt()
    }

    fn is_constant(&self) -> bool {
        let scale = self.a.abs().max(f64::MIN_POSITIVE);
        [self.b, self.c, self.d, self.e]
            .iter()
            .all(|v| v.abs() <= 1e-14 * scale)
    }

    /// `∂_β U = 0` squared twice: `2 P P' Q' - Q (P'² + Q'²)`, with `P` the even
    /// and `Q` the odd harmonics of `f±`.
    fn stationarity(&self, beta: f64) -> f64 {
        let (p, dp) = self.even_part(beta);
        let (q, dq) = self.odd_part(beta);
        2.0 * p * dp * dq - q * (dp * dp + dq * dq)
    }

    /// Candidate stationary points of the utility. The stationarity function
    /// only has harmonics 1 and 3, so it reduces to a cubic in `cos²β`.
    fn stationary_candidates(&self) -> Option<Vec<f64>> {
        let n = STATIONARITY_SAMPLES;
        let (mut a1, mut b1, mut a3, mut b3) = (0.0, 0.0, 0.0, 0.0);
        for j in 0..n {
            let t = TAU * j as f64 / n as f64;
            let g = self.stationarity(t);
            a1 += g * t.cos();
            b1 += g * t.sin();
            a3 += g * (3.0 * t).cos();
            b3 += g * (3.0 * t).sin();
        }
        let norm = 2.0 / n as f64;
        let (a1, b1, a3, b3) = (a1 * norm, b1 * norm, a3 * norm, b3 * norm);
        // g = cos β (r0 + r1 x) + sin β (s0 + s1 x), x = cos² β
        let (r0, r1) = (a1 - 3.0 * a3, 4.0 * a3);
        let (s0, s1) = (b1 - b3, 4.0 * b3);
        let poly = [
            -s0 * s0,
            r0 * r0 - 2.0 * s0 * s1 + s0 * s0,
            2.0 * r0 * r1 - s1 * s1 + 2.0 * s0 * s1,
            r1 * r1 + s1 * s1,
        ];
        let scale = poly.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let coeff_scale = [self.a, self.b, self.c, self.d, self.e]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if scale <= 1e-28 * coeff_scale.powi(6).max(f64::MIN_POSITIVE) {
            return None;
        }
        let mut out = Vec::new();
        for x in real_roots_in(poly, 0.0, 1.0) {
            let base = x.sqrt().acos();
            for beta in [base, -base, PI - base, PI + base] {
                out.push(beta.rem_euclid(TAU));
            }
        }
        Some(out)
    }

    /// Global maximizer over `β`, ties resolved to the smallest `β`.
    pub fn maximize(&self) -> (f64, f64) {
        if self.is_constant() {
            return (0.0, self.utility(0.0));
        }
        let mut candidates = match self.stationary_candidates() {
            Some(c) => c,
            None => self.grid_candidates(),
        };
        candidates.push(0.0);
        candidates.sort_by(f64::total_cmp);
        let mut best = (0.0, f64::NEG_INFINITY);
        for beta in candidates {
            let u = self.utility(beta);
            if u > best.1 + UTILITY_TIE {
                best = (beta, u);
            }
        }
        best
    }

    /// Fallback when the cubic degenerates: dense grid plus golden-section polish.
    fn grid_candidates(&self) -> Vec<f64> {
        let n = 512;
        let h = TAU / n as f64;
        let (mut best_i, mut best_u) = (0, f64::NEG_INFINITY);
        for i in 0..n {
            let u = self.utility(i as f64 * h);
            if u > best_u + UTILITY_TIE {
                best_i = i;
                best_u = u;
            }
        }
        let centre = best_i as f64 * h;
        let invphi = 0.5 * (5f64.sqrt() - 1.0);
        let (mut lo, mut hi) = (centre - h, centre + h);
        let mut x1 = hi - invphi * (hi - lo);
        let mut x2 = lo + invphi * (hi - lo);
        let (mut u1, mut u2) = (self.utility(x1), self.utility(x2));
        for _ in 0..80 {
            if u1 < u2 {
                lo = x1;
                x1 = x2;
                u1 = u2;
                x2 = lo + invphi * (hi - lo);
                u2 = self.utility(x2);
            } else {
                hi = x2;
                x2 = x1;
                u2 = u1;
                x1 = hi - invphi * (hi - lo);
                u1 = self.utility(x1);
            }
        }
        vec![centre, (0.5 * (lo + hi)).rem_euclid(TAU)]
    }
}

pub fn moment_numerator_coeffs(
    post: &impl CircularDistribution,
    k: u32,
    q: f64,
) -> Result<UtilityCoefficients, DesignError> {
    if k == 0 {
        return Err(DesignError::InvalidDepth(k));
    }
    check_q(q, k)?;
    let k = k as i64;
    let m = post.moments(&[1, 1 + k, 1 - k]);
    Ok(UtilityCoefficients::from_moments(m[0], m[1], m[2], q))
}

pub fn utility_at(
    post: &impl CircularDistribution,
    k: u32,
    q: f64,
    beta: f64,
) -> Result<f64, DesignError> {
    Ok(moment_numerator_coeffs(post, k, q)?.utility(beta))
}

/// `(β*, U_C(β*))` for fixed `k`.
pub fn optimal_beta(
    post: &impl CircularDistribution,
    k: u32,
    q: f64,
) -> Result<(f64, f64), DesignError> {
    Ok(moment_numerator_coeffs(post, k, q)?.maximize())
}

/// Depths worth scanning: every `k ≤ k_max` for Fourier priors, a window
/// around `Var_H^{-1/2}` for von Mises priors.
pub fn candidate_depths(
    post: &PhasePosterior,
    k_max: u32,
    window: u32,
) -> std::ops::RangeInclusive<u32> {
    match post.representation() {
        Representation::Fourier(_) => 1..=k_max,
        Representation::VonMises(_) => {
            let var_h = post.holevo_variance().value();
            let centre = if var_h.is_finite() && var_h > 0.0 {
                let c = var_h.sqrt().recip().round();
                if c >= k_max as f64 {
                    k_max
                } else {
                    (c as u32).max(1)
                }
            } else if var_h == 0.0 {
                k_max
            } else {
                1
            };
            centre.saturating_sub(window).max(1)..=centre.saturating_add(window).min(k_max)
        }
    }
}

/// Exact utility maximization over `k` and `β`; `noise_fn` maps `k` to `q`.
pub fn optimal_params(
    post: &PhasePosterior,
    noise_fn: impl Fn(u32) -> f64,
    k_max: u32,
) -> Result<ScoredParams, DesignError> {
    optimal_params_windowed(post, noise_fn, k_max, DEFAULT_K_WINDOW)
}

pub fn optimal_params_windowed(
    post: &PhasePosterior,
    noise_fn: impl Fn(u32) -> f64,
    k_max: u32,
    window: u32,
) -> Result<ScoredParams, DesignError> {
    if k_max == 0 {
        return Err(DesignError::EmptyDepthRange);
    }
    let depths = candidate_depths(post, k_max, window);
    let (k_lo, k_hi) = (*depths.start() as i64, *depths.end() as i64);
    // one batched moment evaluation covering M_{1-k} .. M_{1+k}
    let orders: Vec<i64> = (0..=k_hi + 1).collect();
    let table = post.moments(&orders);
    let at = |j: i64| {
        if j < 0 {
            table[(-j) as usize].conj()
        } else {
            table[j as usize]
        }
    };
    let mut best: Option<ScoredParams> = None;
    for k in k_lo..=k_hi {
        let q = noise_fn(k as u32);
        check_q(q, k as u32)?;
        let coeffs = UtilityCoefficients::from_moments(at(1), at(1 + k), at(1 - k), q);
        let (beta, utility) = coeffs.maximize();
        if best.is_none_or(|b| utility > b.utility + UTILITY_TIE) {
            best = Some(ScoredParams {
                params: ExperimentParams { k: k as u32, beta },
                utility,
                q,
            });
        }
    }
    Ok(best.expect("depth range is non-empty"))
}

/// `k = ⌈1.25 / √Var_H⌉` capped at `k_max`, `β` uniform.
pub fn heuristic_params(
    post: &PhasePosterior,
    k_max: u32,
    rng: &mut impl Rng,
) -> Result<ExperimentParams, DesignError> {
    if k_max == 0 {
        return Err(DesignError::EmptyDepthRange);
    }
    let k = heuristic_depth(post.holevo_variance().value(), k_max);
    Ok(ExperimentParams {
        k,
        beta: rng.random::<f64>() * TAU,
    })
}

pub fn heuristic_depth(var_h: f64, k_max: u32) -> u32 {
    let raw = (1.25 / var_h.sqrt()).ceil();
    if raw.is_nan() || raw >= k_max as f64 {
        k_max
    } else {
        (raw as u32).clamp(1, k_max)
    }
}
