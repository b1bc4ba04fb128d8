use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::RunError;
use crate::calibration::q_model;
use crate::circular::{UpdatePolicy, DEFAULT_J_MAX};
use crate::hamiltonian::{validate_split, HamiltonianFile, SpinHamiltonian};
use crate::iceberg::DEFAULT_SYNDROME_FREQUENCY;
use crate::sim::{InitKind, NoiseMode, NoiseModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Synthetic,
    #[default]
    Unencoded,
    Encoded,
    Calibrate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    #[default]
    Optimal,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationSettings {
    pub ks: Vec<u32>,
    /// Shots per `(k, β)` point.
    pub shots: u64,
    pub init: InitKind,
    /// Also run the encoded circuit and record discards.
    pub encoded: bool,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self {
            ks: vec![20, 40, 60, 80, 100],
            shots: 500,
            init: InitKind::ExactEigenstate,
            encoded: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticSettings {
    pub n_phases: u32,
    /// Depolarizing parameter of the sampled likelihood.
    pub q: f64,
}

impl Default for SyntheticSettings {
    fn default() -> Self {
        Self {
            n_phases: 100,
            q: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub mode: RunMode,
    /// JSON file with the five coefficients; the H2 values when absent.
    pub hamiltonian: Option<PathBuf>,
    pub t: f64,
    pub s: u32,
    /// Trotter steps per syndrome block.
    pub f: u32,
    pub j_max: usize,
    pub k_max: u32,
    pub p2: f64,
    pub delta_bar: f64,
    pub memory_gamma: f64,
    pub noise_mode: NoiseMode,
    pub t_split: Option<(f64, f64)>,
    pub selection: Selection,
    pub representation: UpdatePolicy,
    pub init: InitKind,
    /// Number of Bayesian updates; per-mode default when absent.
    pub max_updates: Option<u32>,
    /// Stop early once `√Var_H[E]` falls below this, in hartree.
    pub holevo_std: Option<f64>,
    pub seed: u64,
    /// `q` used to update on accepted encoded shots.
    pub encoded_q: f64,
    /// Cap on encoded attempts per round.
    pub attempt_cap: u32,
    pub insert_sx: bool,
    /// Rounds whose posterior is stored in the log.
    pub snapshot_rounds: Vec<u32>,
    pub calibration: CalibrationSettings,
    pub synthetic: SyntheticSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: RunMode::default(),
            hamiltonian: None,
            t: 0.1 * PI,
            s: 1,
            f: DEFAULT_SYNDROME_FREQUENCY,
            j_max: DEFAULT_J_MAX,
            k_max: 120,
            p2: 1.6e-3,
            delta_bar: 0.0,
            memory_gamma: 0.0,
            noise_mode: NoiseMode::CircuitLevel,
            t_split: None,
            selection: Selection::Optimal,
            representation: UpdatePolicy::Adaptive,
            init: InitKind::HartreeFock,
            max_updates: None,
            holevo_std: None,
            seed: 0,
            encoded_q: 0.0,
            attempt_cap: 200,
            insert_sx: true,
            snapshot_rounds: vec![1, 2, 3, 5, 10, 25, 50],
            calibration: CalibrationSettings::default(),
            synthetic: SyntheticSettings::default(),
        }
    }
}

fn unit_interval(name: &str, v: f64) -> Result<(), RunError> {
    if v.is_finite() && (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(RunError::Config(format!(
            "{name} must lie in [0, 1], got {v}"
        )))
    }
}

fn positive<T: PartialOrd + Default + std::fmt::Display>(name: &str, v: T) -> Result<(), RunError> {
    if v > T::default() {
        Ok(())
    } else {
        Err(RunError::Config(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        cfg.validated()
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validated(self) -> Result<Self, RunError> {
        if !self.t.is_finite() || self.t == 0.0 {
            return Err(RunError::Config(format!(
                "t must be finite and non-zero, got {}",
                self.t
            )));
        }
        positive("s", self.s)?;
        positive("f", self.f)?;
        positive("j_max", self.j_max)?;
        positive("k_max", self.k_max)?;
        positive("attempt_cap", self.attempt_cap)?;
        unit_interval("p2", self.p2)?;
        unit_interval("encoded_q", self.encoded_q)?;
        unit_interval("synthetic.q", self.synthetic.q)?;
        if !self.delta_bar.is_finite() || !self.memory_gamma.is_finite() {
            return Err(RunError::Config(
                "delta_bar and memory_gamma must be finite".into(),
            ));
        }
        if let Some(split) = self.t_split {
            validate_split(self.t, split).map_err(|e| RunError::Config(e.to_string()))?;
        }
        if let Some(r) = self.max_updates {
            positive("max_updates", r)?;
        }
        if let Some(std) = self.holevo_std {
            if !(std.is_finite() && std > 0.0) {
                return Err(RunError::Config(format!(
                    "holevo_std must be positive, got {std}"
                )));
            }
        }
        if self.calibration.ks.is_empty() || self.calibration.ks.contains(&0) {
            return Err(RunError::Config(
                "calibration.ks must be non-empty positive depths".into(),
            ));
        }
        positive("calibration.shots", self.calibration.shots)?;
        positive("synthetic.n_phases", self.synthetic.n_phases)?;
        Ok(self)
    }

    /// Coefficients from the configured file, or the bundled H2 values. The
    /// file's own `t` and `s` are validated but the config's are used.
    pub fn hamiltonian(&self) -> Result<SpinHamiltonian, RunError> {
        match &self.hamiltonian {
            Some(path) => Ok(HamiltonianFile::load(path)?.hamiltonian()),
            None => Ok(SpinHamiltonian::default()),
        }
    }

    pub fn noise(&self) -> Result<NoiseModel, RunError> {
        NoiseModel {
            p2: self.p2,
            memory_gamma: self.memory_gamma,
            delta_bar: self.delta_bar,
            mode: self.noise_mode,
        }
        .validated()
        .map_err(|e| RunError::Config(e.to_string()))
    }

    /// The unencoded error model `q(k)` used for design and unencoded updates.
    pub fn q_of_k(&self, k: u32) -> f64 {
        q_model(k, self.s, self.p2, self.init)
    }

    pub fn updates(&self) -> u32 {
        self.max_updates.unwrap_or(match self.mode {
            RunMode::Encoded => 44,
            RunMode::Synthetic => 150,
            RunMode::Unencoded | RunMode::Calibrate => 125,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg.j_max, 2000);
        assert_eq!(cfg.k_max, 120);
        assert!((cfg.p2 - 1.6e-3).abs() < 1e-15);
        assert!((cfg.t - 0.1 * PI).abs() < 1e-15);
        assert_eq!(cfg.s, 1);
        assert_eq!(cfg.updates(), 125);
        let enc = RunConfig {
            mode: RunMode::Encoded,
            ..cfg
        };
        assert_eq!(enc.updates(), 44);
    }

    #[test]
    fn parses_names() {
        let cfg = RunConfig::from_json(
            r#"{"mode":"encoded","selection":"heuristic","representation":"vonmises_only","init":"exact_eigenstate",
                "noise_mode":"global_analytic","t_split":[-0.15707963267948966, 0.7853981633974483]}"#,
        )
        .unwrap();
        assert_eq!(cfg.mode, RunMode::Encoded);
        assert_eq!(cfg.selection, Selection::Heuristic);
        assert_eq!(cfg.representation, UpdatePolicy::VonMisesOnly);
        assert_eq!(cfg.init, InitKind::ExactEigenstate);
        assert!(cfg.t_split.is_some());
    }

    #[test]
    fn rejects_bad_values() {
        for bad in [
            r#"{"p2": 1.5}"#,
            r#"{"t": 0}"#,
            r#"{"k_max": 0}"#,
            r#"{"t_split": [0.1, 0.2]}"#,
            r#"{"holevo_std": -1}"#,
            r#"{"unknown_field": 1}"#,
            r#"{"calibration": {"ks": []}}"#,
        ] {
            assert!(
                matches!(RunConfig::from_json(bad), Err(RunError::Config(_))),
                "{bad}"
            );
        }
    }
}
