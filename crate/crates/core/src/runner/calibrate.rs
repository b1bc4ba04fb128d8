use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::{stream, Domain};
use super::{RunConfig, RunError};
use crate::calibration::{
    calibration_betas, d_model, fit_q_omega, q_model, CalibrationPoint, FitResult,
};
use crate::hamiltonian::SpinHamiltonian;
use crate::iceberg::{
    build_encoded_qpe, coherent_profile, conditional_exit_ratio, discard_fraction,
    run_encoded_shot, sample_global, EncodedCircuit, EncodedOptions, ShotRecord,
};
use crate::sim::{
    build_qpe_circuit, outcome_prob_under, run_shot, NoiseMode, NoiseModel, QpeParams,
};

/// One depth of a calibration sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub k: u32,
    pub q_unencoded: f64,
    pub stderr_q_unencoded: f64,
    pub omega_unencoded: f64,
    pub stderr_omega_unencoded: f64,
    pub q_model: f64,
    pub q_encoded: Option<f64>,
    pub stderr_q_encoded: Option<f64>,
    pub accepted_encoded: Option<u64>,
    pub discard: Option<f64>,
    pub discard_stderr: Option<f64>,
    pub discard_model: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    /// Per-repetition eigenphase the calibration angles are centred on.
    pub phi0: f64,
    pub unencoded: Vec<CalibrationPoint>,
    /// Accepted-shot counts; `n_shots` excludes discards.
    pub encoded: Vec<CalibrationPoint>,
    pub rows: Vec<CalibrationRow>,
}

fn params(config: &RunConfig, k: u32, beta: f64) -> QpeParams {
    QpeParams {
        k,
        beta,
        t: config.t,
        s: config.s,
        init: config.calibration.init,
        t_split: config.t_split,
    }
}

/// Eigenphase of one repetition, split or not.
fn reference_phase(h: &SpinHamiltonian, config: &RunConfig) -> Result<f64, RunError> {
    Ok(match config.t_split {
        Some(split) => h.trotter_eigenphase_split(config.t, config.s, split)?.0,
        None => h.trotter_eigenphase(config.t, config.s)?.0,
    })
}

fn unencoded_counts(
    h: &SpinHamiltonian,
    p: &QpeParams,
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
    tag: u32,
) -> Result<u64, RunError> {
    let circ = build_qpe_circuit(h, p)?;
    let p0 = match noise.mode {
        NoiseMode::GlobalAnalytic => Some(outcome_prob_under(&circ, noise)?),
        NoiseMode::CircuitLevel => None,
    };
    let zeros = (0..shots)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, Domain::Unencoded, tag, i as u32);
            let m = match p0 {
                Some(p0) => u8::from(rng.random::<f64>() >= p0),
                None => run_shot(&circ, noise, &mut rng)?,
            };
            Ok(u64::from(m == 0))
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    Ok(zeros.into_iter().sum())
}

/// `shots` encoded shots of `circ` on streams `(domain, tag, i)`.
fn encoded_records(
    circ: &EncodedCircuit,
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
    domain: Domain,
    tag: u32,
) -> Result<Vec<ShotRecord>, RunError> {
    let profile = match noise.mode {
        NoiseMode::GlobalAnalytic => Some(coherent_profile(circ, noise)?),
        NoiseMode::CircuitLevel => None,
    };
    (0..shots)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, domain, tag, i as u32);
            Ok(match &profile {
                Some(prof) => sample_global(circ, prof, noise.p2, &mut rng),
                None => run_encoded_shot(circ, noise, &mut rng)?,
            })
        })
        .collect()
}

/// Sweeps `config.calibration.ks` at the four calibration angles, unencoded and
/// (optionally) encoded, and fits `(q, ω)` at each depth.
pub fn calibration_run(config: &RunConfig) -> Result<CalibrationReport, RunError> {
    let h = config.hamiltonian()?;
    let noise = config.noise()?;
    let phi0 = reference_phase(&h, config)?;
    let settings = &config.calibration;
    let opts = EncodedOptions {
        f: config.f,
        insert_sx: config.insert_sx,
    };
    let mut unencoded = Vec::new();
    let mut encoded = Vec::new();
    let mut rows = Vec::new();
    for &k in &settings.ks {
        let betas = calibration_betas(k, phi0)?;
        let (mut kept, mut total) = (0u64, 0u64);
        for (bi, &beta) in betas.iter().enumerate() {
            let p = params(config, k, beta);
            let tag = k * 4 + bi as u32;
            let n0 = unencoded_counts(&h, &p, &noise, settings.shots, config.seed, tag)?;
            unencoded.push(CalibrationPoint {
                k,
                beta,
                n0,
                n_shots: settings.shots,
            });
            if settings.encoded {
                let circ = build_encoded_qpe(&h, &p, opts)?;
                let recs = encoded_records(
                    &circ,
                    &noise,
                    settings.shots,
                    config.seed,
                    Domain::Encoded,
                    tag,
                )?;
                let accepted: Vec<_> = recs.iter().filter(|r| !r.discarded).collect();
                kept += accepted.len() as u64;
                total += recs.len() as u64;
                let n0 = accepted.iter().filter(|r| r.m == Some(0)).count() as u64;
                encoded.push(CalibrationPoint {
                    k,
                    beta,
                    n0,
                    n_shots: accepted.len() as u64,
                });
            }
        }
        let fu = fit_q_omega(&unencoded, phi0, k)?;
        let fe: Option<FitResult> = if settings.encoded && kept > 0 {
            Some(fit_q_omega(&encoded, phi0, k)?)
        } else {
            None
        };
        let discard = (settings.encoded && total > 0).then(|| 1.0 - kept as f64 / total as f64);
        rows.push(CalibrationRow {
            k,
            q_unencoded: fu.q,
            stderr_q_unencoded: fu.stderr_q,
            omega_unencoded: fu.omega,
            stderr_omega_unencoded: fu.stderr_omega,
            q_model: q_model(k, config.s, config.p2, settings.init),
            q_encoded: fe.map(|f| f.q),
            stderr_q_encoded: fe.map(|f| f.stderr_q),
            accepted_encoded: settings.encoded.then_some(kept),
            discard,
            discard_stderr: discard.map(|d| (d * (1.0 - d) / total as f64).sqrt()),
            discard_model: settings
                .encoded
                .then(|| d_model(k, config.s, config.f, config.p2, settings.init)),
        });
    }
    Ok(CalibrationReport {
        phi0,
        unencoded,
        encoded,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitRatioRow {
    pub k: u32,
    /// Mean executed fraction of the encoded circuit's two-qubit gates.
    pub ratio: f64,
    pub discard: f64,
    pub shots: u64,
}

/// Encoded shots at `β = 0` with the run's initial state, recording how much
/// of each circuit runs before a detected error stops it.
pub fn exit_ratio_study(
    config: &RunConfig,
    ks: &[u32],
    shots: u64,
) -> Result<Vec<ExitRatioRow>, RunError> {
    let h = config.hamiltonian()?;
    let noise = config.noise()?;
    let opts = EncodedOptions {
        f: config.f,
        insert_sx: config.insert_sx,
    };
    ks.iter()
        .map(|&k| {
            let p = QpeParams {
                k,
                beta: 0.0,
                t: config.t,
                s: config.s,
                init: config.init,
                t_split: config.t_split,
            };
            let circ = build_encoded_qpe(&h, &p, opts)?;
            let recs = encoded_records(&circ, &noise, shots, config.seed, Domain::ExitRatio, k)?;
            Ok(ExitRatioRow {
                k,
                ratio: conditional_exit_ratio(&recs, &circ).unwrap_or(f64::NAN),
                discard: discard_fraction(&recs).unwrap_or(f64::NAN),
                shots,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::CalibrationSettings;

    #[test]
    fn noiseless_sweep_fits_zero_error() {
        let cfg = RunConfig {
            p2: 0.0,
            calibration: CalibrationSettings {
                ks: vec![5, 10],
                shots: 200,
                ..CalibrationSettings::default()
            },
            ..RunConfig::default()
        };
        let rep = calibration_run(&cfg).unwrap();
        assert_eq!(rep.unencoded.len(), 8);
        assert_eq!(rep.encoded.len(), 8);
        for row in &rep.rows {
            assert!(row.q_unencoded < 0.05, "{row:?}");
            assert!(row.q_encoded.unwrap() < 0.05);
            assert_eq!(row.discard, Some(0.0));
            assert_eq!(row.q_model, 0.0);
        }
    }

    #[test]
    fn global_mode_discards_follow_the_model() {
        let cfg = RunConfig {
            noise_mode: NoiseMode::GlobalAnalytic,
            calibration: CalibrationSettings {
                ks: vec![40],
                shots: 1000,
                ..CalibrationSettings::default()
            },
            ..RunConfig::default()
        };
        let rep = calibration_run(&cfg).unwrap();
        let row = rep.rows[0];
        let (d, sd, dm) = (
            row.discard.unwrap(),
            row.discard_stderr.unwrap(),
            row.discard_model.unwrap(),
        );
        assert!((d - dm).abs() < 4.0 * sd, "{d} vs {dm}");
    }

    #[test]
    fn exit_ratio_without_noise_is_one() {
        let cfg = RunConfig {
            p2: 0.0,
            ..RunConfig::default()
        };
        let rows = exit_ratio_study(&cfg, &[8], 20).unwrap();
        assert_eq!(rows[0].ratio, 1.0);
        assert_eq!(rows[0].discard, 0.0);
    }
}
