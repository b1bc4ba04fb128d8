use super::log::Summary;
use super::rng::{stream, Domain};
use super::{RoundRecord, RunConfig, RunError, RunLog, RunMode, Selection};
use crate::calibration::d_model;
use crate::circular::{Likelihood, PhasePosterior};
use crate::design::{heuristic_params, optimal_params, ExperimentParams};
use crate::hamiltonian::SpinHamiltonian;
use crate::iceberg::{
    build_encoded_qpe, coherent_profile, run_encoded_shot, sample_global, EncodedOptions,
};
use crate::sim::{build_qpe_circuit, run_shot, NoiseMode, NoiseModel, QpeParams};

pub(super) fn choose_params(
    post: &PhasePosterior,
    config: &RunConfig,
    q_of_k: impl Fn(u32) -> f64,
    r: u32,
) -> Result<ExperimentParams, RunError> {
    match config.selection {
        Selection::Optimal => Ok(optimal_params(post, q_of_k, config.k_max)?.params),
        Selection::Heuristic => {
            let mut rng = stream(config.seed, Domain::Select, r, 0);
            Ok(heuristic_params(post, config.k_max, &mut rng)?)
        }
    }
}

struct Shot {
    m: u8,
    attempts: u32,
    discards: u32,
    g2q: u64,
}

fn unencoded_shot(
    h: &SpinHamiltonian,
    p: &QpeParams,
    noise: &NoiseModel,
    seed: u64,
    r: u32,
) -> Result<Shot, RunError> {
    let circ = build_qpe_circuit(h, p)?;
    let m = run_shot(&circ, noise, &mut stream(seed, Domain::Shot, r, 0))?;
    Ok(Shot {
        m,
        attempts: 1,
        discards: 0,
        g2q: u64::from(circ.two_qubit_count),
    })
}

/// Repeats the encoded circuit until a shot is accepted. Attempt `a` of round
/// `r` always uses stream `(r, a)`.
fn encoded_shot(
    h: &SpinHamiltonian,
    p: &QpeParams,
    noise: &NoiseModel,
    config: &RunConfig,
    r: u32,
) -> Result<Shot, RunError> {
    let circ = build_encoded_qpe(
        h,
        p,
        EncodedOptions {
            f: config.f,
            insert_sx: config.insert_sx,
        },
    )?;
    let profile = match noise.mode {
        NoiseMode::GlobalAnalytic => Some(coherent_profile(&circ, noise)?),
        NoiseMode::CircuitLevel => None,
    };
    let mut g2q = 0u64;
    for a in 0..config.attempt_cap {
        let mut rng = stream(config.seed, Domain::Shot, r, a);
        let rec = match &profile {
            Some(prof) => sample_global(&circ, prof, noise.p2, &mut rng),
            None => run_encoded_shot(&circ, noise, &mut rng)?,
        };
        g2q += u64::from(rec.g2q);
        if let (false, Some(m)) = (rec.discarded, rec.m) {
            return Ok(Shot {
                m,
                attempts: a + 1,
                discards: a,
                g2q,
            });
        }
    }
    Err(RunError::AttemptCap {
        round: r,
        cap: config.attempt_cap,
    })
}

/// The Bayesian QPE loop against the simulator, one shot per update.
///
/// Design uses the unencoded error model `q(k)` in both modes. Unencoded
/// outcomes are updated with the same `q(k)`; accepted encoded outcomes are
/// updated with `config.encoded_q`.
pub fn bayesian_qpe_run(config: &RunConfig) -> Result<RunLog, RunError> {
    let encoded = match config.mode {
        RunMode::Unencoded => false,
        RunMode::Encoded => true,
        other => {
            return Err(RunError::Config(format!(
                "a Bayesian QPE run needs mode unencoded or encoded, got {other:?}"
            )))
        }
    };
    let h = config.hamiltonian()?;
    let noise = config.noise()?;
    let centre = h.hartree_fock_energy();
    let mut post = PhasePosterior::uniform(config.representation, config.j_max);
    let mut rounds = Vec::new();
    for r in 1..=config.updates() {
        let params = choose_params(&post, config, |k| config.q_of_k(k), r)?;
        let qp = QpeParams {
            k: params.k,
            beta: params.beta,
            t: config.t,
            s: config.s,
            init: config.init,
            t_split: config.t_split,
        };
        let (shot, q_used, d) = if encoded {
            let d = d_model(params.k, config.s, config.f, config.p2, config.init);
            (
                encoded_shot(&h, &qp, &noise, config, r)?,
                config.encoded_q,
                d,
            )
        } else {
            (
                unencoded_shot(&h, &qp, &noise, config.seed, r)?,
                config.q_of_k(params.k),
                0.0,
            )
        };
        let was_fourier = post.is_fourier();
        post = post.update(shot.m, &Likelihood::new(params.k, params.beta, q_used)?)?;
        let s = Summary::of(&post, Some((config.t, centre)));
        let done = matches!((config.holevo_std, s.e_stderr), (Some(th), Some(e)) if e < th);
        rounds.push(RoundRecord {
            r,
            k: params.k,
            beta: params.beta,
            m: shot.m,
            n_attempts: shot.attempts,
            discards: shot.discards,
            g2q: shot.g2q,
            q_used,
            d_model: d,
            representation: s.representation,
            order: s.order,
            converted: was_fourier && !post.is_fourier(),
            m1_re: s.m1_re,
            m1_im: s.m1_im,
            mean_phase: s.mean_phase,
            var_c: s.var_c,
            var_h: s.var_h,
            e_estimate: s.e_estimate,
            e_stderr: s.e_stderr,
            cosine_distance: None,
            posterior: config
                .snapshot_rounds
                .contains(&r)
                .then(|| post.to_json_value()),
        });
        if done {
            break;
        }
    }
    Ok(RunLog::from_rounds(rounds))
}
