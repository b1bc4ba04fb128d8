use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{RunConfig, RunError};
use crate::circular::{CircularDistribution, PhasePosterior, Representation};
use crate::hamiltonian::energy_from_phase;

/// One Bayesian update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub r: u32,
    pub k: u32,
    pub beta: f64,
    pub m: u8,
    /// Shots run to get one accepted outcome (1 when unencoded).
    pub n_attempts: u32,
    pub discards: u32,
    /// Two-qubit gates executed this round, over all attempts.
    pub g2q: u64,
    pub q_used: f64,
    /// Modelled discard rate at this depth (0 when unencoded).
    pub d_model: f64,
    /// `"fourier"` or `"von_mises"` after the update.
    pub representation: String,
    /// Fourier order after the update.
    pub order: Option<usize>,
    /// This update switched the posterior from Fourier to von Mises.
    pub converted: bool,
    pub m1_re: f64,
    pub m1_im: f64,
    pub mean_phase: f64,
    pub var_c: f64,
    /// `None` while the Holevo variance is unbounded.
    pub var_h: Option<f64>,
    pub e_estimate: Option<f64>,
    pub e_stderr: Option<f64>,
    /// `E[1 - cos(φ - φ*)]` in synthetic runs.
    pub cosine_distance: Option<f64>,
    /// Serialized posterior at snapshot rounds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub posterior: Option<serde_json::Value>,
}

/// Posterior summary fields of a record.
pub(super) struct Summary {
    pub representation: String,
    pub order: Option<usize>,
    pub m1_re: f64,
    pub m1_im: f64,
    pub mean_phase: f64,
    pub var_c: f64,
    pub var_h: Option<f64>,
    pub e_estimate: Option<f64>,
    pub e_stderr: Option<f64>,
}

impl Summary {
    /// `energy` is `(t, branch centre)` for runs that estimate an energy.
    pub fn of(post: &PhasePosterior, energy: Option<(f64, f64)>) -> Self {
        let m1 = post.moment(1);
        let (representation, order) = match post.representation() {
            Representation::Fourier(f) => ("fourier".to_string(), Some(f.order())),
            Representation::VonMises(_) => ("von_mises".to_string(), None),
        };
        let hv = post.holevo_variance();
        let var_h = (!hv.is_unbounded()).then(|| hv.value());
        let mean_phase = post.mean_phase();
        let (e_estimate, e_stderr) = match energy {
            Some((t, centre)) => (
                Some(energy_from_phase(mean_phase, t, centre)),
                var_h.map(|v| v.sqrt() / t.abs()),
            ),
            None => (None, None),
        };
        Self {
            representation,
            order,
            m1_re: m1.re,
            m1_im: m1.im,
            mean_phase,
            var_c: post.circular_variance(),
            var_h,
            e_estimate,
            e_stderr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunTotals {
    pub r: u32,
    /// `Σ_r 1/(1 - d(k_r))`.
    pub r_bar: f64,
    pub attempts: u64,
    pub discards: u64,
    pub total_2q_gates: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub rounds: Vec<RoundRecord>,
    pub totals: RunTotals,
    /// Round at which the posterior switched to von Mises.
    pub conversion_round: Option<u32>,
}

/// Sum of `1/(1 - d(k_r))` over the rounds.
pub fn rescaled_experiments(log: &RunLog) -> f64 {
    log.rounds.iter().map(|r| 1.0 / (1.0 - r.d_model)).sum()
}

impl RunLog {
    pub fn from_rounds(rounds: Vec<RoundRecord>) -> Self {
        let conversion_round = rounds.iter().find(|r| r.converted).map(|r| r.r);
        let mut log = Self {
            totals: RunTotals {
                r: rounds.len() as u32,
                r_bar: 0.0,
                attempts: rounds.iter().map(|r| u64::from(r.n_attempts)).sum(),
                discards: rounds.iter().map(|r| u64::from(r.discards)).sum(),
                total_2q_gates: rounds.iter().map(|r| r.g2q).sum(),
            },
            rounds,
            conversion_round,
        };
        log.totals.r_bar = rescaled_experiments(&log);
        log
    }

    pub fn last(&self) -> Option<&RoundRecord> {
        self.rounds.last()
    }

    pub fn write_jsonl(&self, mut w: impl Write) -> Result<(), RunError> {
        for r in &self.rounds {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn read_jsonl(r: impl BufRead) -> Result<Self, RunError> {
        let mut rounds = Vec::new();
        for line in r.lines() {
            let line = line?;
            if !line.trim().is_empty() {
                rounds.push(serde_json::from_str(&line)?);
            }
        }
        Ok(Self::from_rounds(rounds))
    }

    pub fn summary(&self, config: &RunConfig, exact_energy: Option<f64>) -> RunSummary {
        let last = self.last();
        let energy = last.and_then(|r| r.e_estimate);
        RunSummary {
            config: config.clone(),
            totals: self.totals,
            conversion_round: self.conversion_round,
            energy,
            energy_stderr: last.and_then(|r| r.e_stderr),
            exact_energy,
            energy_error: energy.zip(exact_energy).map(|(e, e0)| e - e0),
            cosine_distance: last.and_then(|r| r.cosine_distance),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: RunConfig,
    pub totals: RunTotals,
    pub conversion_round: Option<u32>,
    pub energy: Option<f64>,
    pub energy_stderr: Option<f64>,
    pub exact_energy: Option<f64>,
    pub energy_error: Option<f64>,
    pub cosine_distance: Option<f64>,
}
