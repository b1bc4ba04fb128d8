//! Calibration of the damped likelihood `(1 + (1-q) cos(k(φ₀-ω) + β))/2`:
//! maximum-likelihood fits of `q` and `ω`, the gate-count error models, and
//! the split-time schedule that cancels rotation bias.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian::{validate_split, HamiltonianError};
use crate::sim::{global_error_rate, InitKind};

const SEED_GRID: usize = 64;
const OMEGA_SEED_HALF_WIDTH: f64 = 0.05;
const MAX_NEWTON_ITERS: usize = 200;
const F_FLOOR: f64 = 1e-15;

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("circuit depth k must be at least 1")]
    InvalidDepth,
    #[error("need at least 3 distinct β values at k = {k}, got {got}")]
    TooFewBetas { k: u32, got: usize },
    #[error("calibration point has n0 = {n0} > n_shots = {n_shots}")]
    InvalidCounts { n0: u64, n_shots: u64 },
    #[error("fit did not converge at k = {0}: {1}")]
    NonConvergence(u32, &'static str),
    #[error(transparent)]
    Split(#[from] HamiltonianError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub k: u32,
    pub beta: f64,
    pub n0: u64,
    pub n_shots: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub k: u32,
    pub q: f64,
    pub omega: f64,
    pub stderr_q: f64,
    pub stderr_omega: f64,
    /// The unconstrained optimum had `q` outside `[0, 1]`.
    #[serde(skip)]
    pub q_clamped: bool,
}

/// `-kφ₀ + {-π, -π/2, 0, π/2}`, reduced to `[0, 2π)`.
pub fn calibration_betas(k: u32, phi0: f64) -> Result<[f64; 4], CalibrationError> {
    if k == 0 {
        return Err(CalibrationError::InvalidDepth);
    }
    let base = -f64::from(k) * phi0;
    Ok([-PI, -FRAC_PI_2, 0.0, FRAC_PI_2].map(|d| (base + d).rem_euclid(TAU)))
}

/// `(1 + (1-q) cos(k(φ₀-ω) + β))/2`.
pub fn damped_likelihood(k: u32, beta: f64, phi0: f64, q: f64, omega: f64) -> f64 {
    (1.0 + (1.0 - q) * (f64::from(k) * (phi0 - omega) + beta).cos()) / 2.0
}

struct Objective<'a> {
    points: &'a [CalibrationPoint],
    k: f64,
    phi0: f64,
}

impl Objective<'_> {
    fn theta(&self, beta: f64, omega: f64) -> f64 {
        self.k * (self.phi0 - omega) + beta
    }

    fn value(&self, q: f64, omega: f64) -> f64 {
        self.points
            .iter()
            .map(|p| {
                let f = ((1.0 + (1.0 - q) * self.theta(p.beta, omega).cos()) / 2.0)
                    .clamp(F_FLOOR, 1.0 - F_FLOOR);
                p.n0 as f64 * f.ln() + (p.n_shots - p.n0) as f64 * (1.0 - f).ln()
            })
            .sum()
    }

    /// Gradient and Hessian with respect to `(q, ω)`.
    fn derivatives(&self, q: f64, omega: f64) -> ([f64; 2], [[f64; 2]; 2]) {
        let a = 1.0 - q;
        let k = self.k;
        let mut g = [0.0; 2];
        let mut h = [[0.0; 2]; 2];
        for p in self.points {
            let (s, c) = self.theta(p.beta, omega).sin_cos();
            let f = ((1.0 + a * c) / 2.0).clamp(F_FLOOR, 1.0 - F_FLOOR);
            let (n0, n1) = (p.n0 as f64, (p.n_shots - p.n0) as f64);
            let gf = n0 / f - n1 / (1.0 - f);
            let hf = -n0 / (f * f) - n1 / ((1.0 - f) * (1.0 - f));
            let df = [-c / 2.0, a * s * k / 2.0];
            let d2f = [[0.0, -k * s / 2.0], [-k * s / 2.0, -a * k * k * c / 2.0]];
            for i in 0..2 {
                g[i] += gf * df[i];
                for j in 0..2 {
                    h[i][j] += hf * df[i] * df[j] + gf * d2f[i][j];
                }
            }
        }
        (g, h)
    }
}

fn invert2(h: [[f64; 2]; 2]) -> Option<[[f64; 2]; 2]> {
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    if !det.is_finite() || det.abs() < 1e-300 {
        return None;
    }
    Some([
        [h[1][1] / det, -h[0][1] / det],
        [-h[1][0] / det, h[0][0] / det],
    ])
}

/// Binomial maximum-likelihood fit of `(q, ω)` from the points at depth `k`,
/// seeded on a coarse grid and refined by projected Newton steps. Standard
/// errors come from the observed Fisher information.
pub fn fit_q_omega(
    points: &[CalibrationPoint],
    phi0: f64,
    k: u32,
) -> Result<FitResult, CalibrationError> {
    if k == 0 {
        return Err(CalibrationError::InvalidDepth);
    }
    let pts: Vec<CalibrationPoint> = points.iter().copied().filter(|p| p.k == k).collect();
    for p in &pts {
        if p.n0 > p.n_shots {
            return Err(CalibrationError::InvalidCounts {
                n0: p.n0,
                n_shots: p.n_shots,
            });
        }
    }
    let mut betas: Vec<f64> = pts
        .iter()
        .filter(|p| p.n_shots > 0)
        .map(|p| p.beta.rem_euclid(TAU))
        .collect();
    betas.sort_by(f64::total_cmp);
    betas.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if betas.len() < 3 {
        return Err(CalibrationError::TooFewBetas {
            k,
            got: betas.len(),
        });
    }
    if pts.iter().all(|p| p.n0 == 0) || pts.iter().all(|p| p.n0 == p.n_shots) {
        return Err(CalibrationError::NonConvergence(
            k,
            "every β gave the same outcome",
        ));
    }
    let obj = Objective {
        points: &pts,
        k: f64::from(k),
        phi0,
    };

    let half_width = OMEGA_SEED_HALF_WIDTH.max(PI / f64::from(k));
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..SEED_GRID {
        let q = i as f64 / (SEED_GRID - 1) as f64;
        for j in 0..SEED_GRID {
            let omega = -half_width + 2.0 * half_width * j as f64 / (SEED_GRID - 1) as f64;
            let v = obj.value(q, omega);
            if v > best.0 {
                best = (v, q, omega);
            }
        }
    }
    let (mut val, mut q, mut omega) = best;
    let mut converged = false;
    for _ in 0..MAX_NEWTON_ITERS {
        let (g, h) = obj.derivatives(q, omega);
        let pinned = (q <= 0.0 && g[0] < 0.0) || (q >= 1.0 && g[0] > 0.0);
        let neg_def = h[0][0] < 0.0 && h[0][0] * h[1][1] - h[0][1] * h[1][0] > 0.0;
        let step = if pinned {
            // Newton in ω alone while q sits on its bound.
            [
                0.0,
                if h[1][1] < 0.0 {
                    -g[1] / h[1][1]
                } else {
                    g[1] / h[1][1].abs().max(1.0)
                },
            ]
        } else {
            match (neg_def, invert2(h)) {
                (true, Some(inv)) => [
                    -(inv[0][0] * g[0] + inv[0][1] * g[1]),
                    -(inv[1][0] * g[0] + inv[1][1] * g[1]),
                ],
                _ => {
                    // Scaled gradient ascent when the Hessian is not usable.
                    let scale = [1.0 / h[0][0].abs().max(1.0), 1.0 / h[1][1].abs().max(1.0)];
                    [g[0] * scale[0], g[1] * scale[1]]
                }
            }
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let nq = (q + t * step[0]).clamp(0.0, 1.0);
            let nw = omega + t * step[1];
            let nv = obj.value(nq, nw);
            if nv >= val - 1e-12 * val.abs().max(1.0) {
                let moved = (nq - q).abs() + (nw - omega).abs();
                q = nq;
                omega = nw;
                val = nv;
                accepted = true;
                if moved < 1e-11 {
                    converged = true;
                }
                break;
            }
            t *= 0.5;
        }
        if !accepted || converged {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(CalibrationError::NonConvergence(
            k,
            "Newton iterations exhausted",
        ));
    }
    let (g, h) = obj.derivatives(q, omega);
    let q_clamped = (q <= 0.0 && g[0] < 0.0) || (q >= 1.0 && g[0] > 0.0);
    let fisher = [[-h[0][0], -h[0][1]], [-h[1][0], -h[1][1]]];
    let cov = invert2(fisher).ok_or(CalibrationError::NonConvergence(
        k,
        "singular Fisher information",
    ))?;
    let stderr_q = cov[0][0].max(0.0).sqrt();
    let stderr_omega = cov[1][1].max(0.0).sqrt();
    if !q.is_finite() || !omega.is_finite() {
        return Err(CalibrationError::NonConvergence(k, "non-finite optimum"));
    }
    Ok(FitResult {
        k,
        q,
        omega,
        stderr_q,
        stderr_omega,
        q_clamped,
    })
}

/// Fits every depth present in `points`, in ascending `k`.
pub fn fit_all(points: &[CalibrationPoint], phi0: f64) -> Result<Vec<FitResult>, CalibrationError> {
    let mut ks: Vec<u32> = points.iter().map(|p| p.k).collect();
    ks.sort_unstable();
    ks.dedup();
    ks.into_iter()
        .map(|k| fit_q_omega(points, phi0, k))
        .collect()
}

/// `5ks + 4 + Δ`.
pub fn unencoded_gate_count(k: u32, s: u32, init: InitKind) -> u32 {
    5 * k * s + 4 + u32::from(init == InitKind::ExactEigenstate)
}

/// `q = 1 - (1 - p2)^{N_2Q}` for the unencoded circuit.
pub fn q_model(k: u32, s: u32, p2: f64, init: InitKind) -> f64 {
    global_error_rate(p2, unencoded_gate_count(k, s, init))
}

/// Encoded discard rate, `1 - (1 - p2)^{N_2Q^{(e)}}`.
pub fn d_model(k: u32, s: u32, f: u32, p2: f64, init: InitKind) -> f64 {
    crate::iceberg::discard_rate_model(k * s, f, p2, init)
}

/// The split pair for nominal time `t`. Without a configured pair this is
/// `(-t/2, 5t/2)`, which is `(-0.05π, 0.25π)` at `t = 0.1π`.
pub fn split_times(t: f64, configured: Option<(f64, f64)>) -> Result<(f64, f64), CalibrationError> {
    let pair = configured.unwrap_or((-0.5 * t, 2.5 * t));
    validate_split(t, pair)?;
    Ok(pair)
}

pub fn read_points(reader: impl Read) -> Result<Vec<CalibrationPoint>, CalibrationError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let points = rdr
        .deserialize()
        .collect::<Result<Vec<CalibrationPoint>, _>>()?;
    for p in &points {
        if p.n0 > p.n_shots {
            return Err(CalibrationError::InvalidCounts {
                n0: p.n0,
                n_shots: p.n_shots,
            });
        }
    }
    Ok(points)
}

pub fn write_points(
    writer: impl Write,
    points: &[CalibrationPoint],
) -> Result<(), CalibrationError> {
    let mut w = csv::Writer::from_writer(writer);
    for p in points {
        w.serialize(p)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_fits(writer: impl Write, fits: &[FitResult]) -> Result<(), CalibrationError> {
    let mut w = csv::Writer::from_writer(writer);
    for f in fits {
        w.serialize(f)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
