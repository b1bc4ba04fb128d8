//! End-to-end runs: synthetic-likelihood ensembles, calibration sweeps and the
//! Bayesian QPE loop against the simulator, with their logs and plot data.

mod calibrate;
mod config;
mod log;
mod plots;
mod qpe;
mod rng;
mod synthetic;

use thiserror::Error;

pub use calibrate::{
    calibration_run, exit_ratio_study, CalibrationReport, CalibrationRow, ExitRatioRow,
};
pub use config::{CalibrationSettings, RunConfig, RunMode, Selection, SyntheticSettings};
pub use log::{rescaled_experiments, RoundRecord, RunLog, RunSummary, RunTotals};
pub use plots::{
    emit_plot_data, write_calibration_figures, write_fig2, write_fig3, write_fig4, write_fig5,
    write_fig_a1, write_fig_a2, FigureId, PDF_GRID,
};
pub use qpe::bayesian_qpe_run;
pub use rng::{derive_seed, stream, Domain};
pub use synthetic::{
    synthetic_ensemble, synthetic_run, Arm, ArmTrace, SyntheticEnsemble, FIG2_ARMS,
};

use crate::calibration::CalibrationError;
use crate::circular::PosteriorError;
use crate::design::DesignError;
use crate::hamiltonian::HamiltonianError;
use crate::iceberg::IcebergError;
use crate::sim::SimError;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("round {round}: no accepted shot in {cap} attempts")]
    AttemptCap { round: u32, cap: u32 },
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Iceberg(#[from] IcebergError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Posterior(#[from] PosteriorError),
    #[error(transparent)]
    Calibration(#[from] CalibrationError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl RunError {
    /// Errors caused by the configuration rather than the run itself.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            RunError::Config(_)
                | RunError::Hamiltonian(
                    HamiltonianError::Io(_)
                        | HamiltonianError::Json(_)
                        | HamiltonianError::NonFinite
                )
        )
    }

    pub fn is_fit_failure(&self) -> bool {
        matches!(
            self,
            RunError::Calibration(CalibrationError::NonConvergence(..))
        )
    }
}
