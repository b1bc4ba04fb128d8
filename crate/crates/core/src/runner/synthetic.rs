use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::log::Summary;
use super::qpe::choose_params;
use super::rng::{derive_seed, stream, Domain};
use super::{RoundRecord, RunConfig, RunError, RunLog, Selection};
use crate::circular::{Likelihood, PhasePosterior, UpdatePolicy};

/// A strategy: how `(k, β)` is chosen and how the posterior is stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Arm {
    pub name: &'static str,
    pub selection: Selection,
    pub representation: UpdatePolicy,
}

/// The three strategies compared on synthetic data.
pub const FIG2_ARMS: [Arm; 3] = [
    Arm {
        name: "vonmises_heuristic",
        selection: Selection::Heuristic,
        representation: UpdatePolicy::VonMisesOnly,
    },
    Arm {
        name: "fourier_heuristic",
        selection: Selection::Heuristic,
        representation: UpdatePolicy::FourierOnly,
    },
    Arm {
        name: "adaptive_optimal",
        selection: Selection::Optimal,
        representation: UpdatePolicy::Adaptive,
    },
];

/// Bayesian updates on outcomes drawn directly from the likelihood at the
/// true phase `phi_star`, with `q = config.synthetic.q`.
pub fn synthetic_run(config: &RunConfig, phi_star: f64) -> Result<RunLog, RunError> {
    let q = config.synthetic.q;
    let updates = config.max_updates.unwrap_or(150);
    let mut post = PhasePosterior::uniform(config.representation, config.j_max);
    let mut rounds = Vec::with_capacity(updates as usize);
    for r in 1..=updates {
        let params = choose_params(&post, config, |_| q, r)?;
        let lik = Likelihood::new(params.k, params.beta, q)?;
        let p0 = lik.prob(0, phi_star);
        let m = u8::from(stream(config.seed, Domain::Shot, r, 0).random::<f64>() >= p0);
        let was_fourier = post.is_fourier();
        post = post.update(m, &lik)?;
        let s = Summary::of(&post, None);
        rounds.push(RoundRecord {
            r,
            k: params.k,
            beta: params.beta,
            m,
            n_attempts: 1,
            discards: 0,
            g2q: 0,
            q_used: q,
            d_model: 0.0,
            representation: s.representation,
            order: s.order,
            converted: was_fourier && !post.is_fourier(),
            m1_re: s.m1_re,
            m1_im: s.m1_im,
            mean_phase: s.mean_phase,
            var_c: s.var_c,
            var_h: s.var_h,
            e_estimate: None,
            e_stderr: None,
            cosine_distance: Some(post.expected_cosine_distance(phi_star)),
            posterior: config
                .snapshot_rounds
                .contains(&r)
                .then(|| post.to_json_value()),
        });
    }
    Ok(RunLog::from_rounds(rounds))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmTrace {
    pub arm: Arm,
    /// Mean expected cosine distance over phases, per round.
    pub mean_cosine_distance: Vec<f64>,
    /// Final-round expected cosine distance of each phase.
    pub final_cosine_distance: Vec<f64>,
    pub conversion_rounds: Vec<Option<u32>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyntheticEnsemble {
    pub phases: Vec<f64>,
    pub arms: Vec<ArmTrace>,
}

impl SyntheticEnsemble {
    pub fn arm(&self, name: &str) -> Option<&ArmTrace> {
        self.arms.iter().find(|a| a.arm.name == name)
    }
}

/// Runs every arm on `config.synthetic.n_phases` uniformly drawn phases. Phase
/// `i` uses the same child seed in every arm.
pub fn synthetic_ensemble(config: &RunConfig, arms: &[Arm]) -> Result<SyntheticEnsemble, RunError> {
    let n = config.synthetic.n_phases;
    let mut phase_rng = stream(config.seed, Domain::Phase, 0, 0);
    let phases: Vec<f64> = (0..n).map(|_| phase_rng.random::<f64>() * TAU).collect();
    let mut traces = Vec::with_capacity(arms.len());
    for arm in arms {
        let logs = phases
            .par_iter()
            .enumerate()
            .map(|(i, &phi)| {
                let cfg = RunConfig {
                    selection: arm.selection,
                    representation: arm.representation,
                    seed: derive_seed(config.seed, i as u32),
                    snapshot_rounds: Vec::new(),
                    ..config.clone()
                };
                synthetic_run(&cfg, phi)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let rounds = logs.iter().map(|l| l.rounds.len()).min().unwrap_or(0);
        let mean_cosine_distance = (0..rounds)
            .map(|r| {
                logs.iter()
                    .map(|l| l.rounds[r].cosine_distance.unwrap_or(f64::NAN))
                    .sum::<f64>()
                    / logs.len() as f64
            })
            .collect();
        traces.push(ArmTrace {
            arm: *arm,
            mean_cosine_distance,
            final_cosine_distance: logs
                .iter()
                .map(|l| l.last().and_then(|r| r.cosine_distance).unwrap_or(f64::NAN))
                .collect(),
            conversion_rounds: logs.iter().map(|l| l.conversion_round).collect(),
        });
    }
    Ok(SyntheticEnsemble {
        phases,
        arms: traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::RunMode;

    fn cfg(updates: u32) -> RunConfig {
        RunConfig {
            mode: RunMode::Synthetic,
            max_updates: Some(updates),
            seed: 3,
            ..RunConfig::default()
        }
    }

    #[test]
    fn five_updates_never_convert() {
        for seed in 0..10 {
            let log = synthetic_run(&RunConfig { seed, ..cfg(5) }, 1.0).unwrap();
            assert_eq!(log.conversion_round, None);
            assert!(log.rounds.iter().all(|r| r.representation == "fourier"));
        }
    }

    #[test]
    fn conversion_marks_first_budget_overflow() {
        let log = synthetic_run(
            &RunConfig {
                j_max: 200,
                ..cfg(40)
            },
            2.0,
        )
        .unwrap();
        let conv = log.conversion_round.expect("converts");
        let before = &log.rounds[conv as usize - 2];
        let at = &log.rounds[conv as usize - 1];
        assert!(before.order.unwrap() <= 200);
        assert!(before.order.unwrap() + at.k as usize > 200);
        assert!(log.rounds[..conv as usize - 1]
            .iter()
            .all(|r| r.order.unwrap() <= 200));
    }

    #[test]
    fn deterministic() {
        let a = synthetic_run(&cfg(30), 0.7).unwrap().to_jsonl_string();
        let b = synthetic_run(&cfg(30), 0.7).unwrap().to_jsonl_string();
        assert_eq!(a, b);
        let arm = FIG2_ARMS[0];
        let h = RunConfig {
            selection: arm.selection,
            representation: arm.representation,
            ..cfg(30)
        };
        assert_eq!(
            synthetic_run(&h, 0.7).unwrap(),
            synthetic_run(&h, 0.7).unwrap()
        );
    }

    #[test]
    fn converges_to_the_true_phase() {
        let log = synthetic_run(&cfg(60), 4.0).unwrap();
        assert!(log.last().unwrap().cosine_distance.unwrap() < 1e-4);
    }
}
