use std::f64::consts::TAU;
use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::{CalibrationReport, RunError, RunLog, SyntheticEnsemble};
use crate::circular::{CircularDistribution, PhasePosterior, UpdatePolicy, DEFAULT_J_MAX};

/// Grid points per posterior snapshot.
pub const PDF_GRID: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig2Convergence,
    Fig3QVsK,
    Fig4Discard,
    Fig5Energy,
    FigA1Posteriors,
    FigA2Noiseless,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::Fig2Convergence,
        FigureId::Fig3QVsK,
        FigureId::Fig4Discard,
        FigureId::Fig5Energy,
        FigureId::FigA1Posteriors,
        FigureId::FigA2Noiseless,
    ];

    pub fn stem(self) -> &'static str {
        match self {
            FigureId::Fig2Convergence => "fig2_convergence",
            FigureId::Fig3QVsK => "fig3_q_vs_k",
            FigureId::Fig4Discard => "fig4_discard",
            FigureId::Fig5Energy => "fig5_energy",
            FigureId::FigA1Posteriors => "figA1_posteriors",
            FigureId::FigA2Noiseless => "figA2_noiseless",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.csv", self.stem())
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.stem())
    }
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.strip_suffix(".csv").unwrap_or(s);
        FigureId::ALL
            .into_iter()
            .find(|f| f.stem() == s)
            .ok_or_else(|| format!("unknown figure {s:?}"))
    }
}

fn write_rows<T: Serialize>(
    w: impl Write,
    rows: impl IntoIterator<Item = T>,
) -> Result<(), RunError> {
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ConvergenceRow<'a> {
    arm: &'a str,
    r: usize,
    mean_cosine_distance: f64,
}

pub fn write_fig2(ens: &SyntheticEnsemble, w: impl Write) -> Result<(), RunError> {
    write_rows(
        w,
        ens.arms.iter().flat_map(|a| {
            a.mean_cosine_distance
                .iter()
                .enumerate()
                .map(|(i, &d)| ConvergenceRow {
                    arm: a.arm.name,
                    r: i + 1,
                    mean_cosine_distance: d,
                })
        }),
    )
}

#[derive(Serialize)]
struct QRow {
    k: u32,
    q_unencoded: f64,
    stderr_q_unencoded: f64,
    q_encoded: Option<f64>,
    stderr_q_encoded: Option<f64>,
    q_model: f64,
}

pub fn write_fig3(rep: &CalibrationReport, w: impl Write) -> Result<(), RunError> {
    write_rows(
        w,
        rep.rows.iter().map(|r| QRow {
            k: r.k,
            q_unencoded: r.q_unencoded,
            stderr_q_unencoded: r.stderr_q_unencoded,
            q_encoded: r.q_encoded,
            stderr_q_encoded: r.stderr_q_encoded,
            q_model: r.q_model,
        }),
    )
}

#[derive(Serialize)]
struct DiscardRow {
    k: u32,
    discard: Option<f64>,
    discard_stderr: Option<f64>,
    discard_model: Option<f64>,
}

pub fn write_fig4(rep: &CalibrationReport, w: impl Write) -> Result<(), RunError> {
    write_rows(
        w,
        rep.rows.iter().map(|r| DiscardRow {
            k: r.k,
            discard: r.discard,
            discard_stderr: r.discard_stderr,
            discard_model: r.discard_model,
        }),
    )
}

#[derive(Serialize)]
struct EnergyRow<'a> {
    r: u32,
    k: u32,
    beta: f64,
    m: u8,
    n_attempts: u32,
    energy: Option<f64>,
    stderr: Option<f64>,
    exact_energy: f64,
    representation: &'a str,
    converted: bool,
}

pub fn write_fig5(log: &RunLog, e0: f64, w: impl Write) -> Result<(), RunError> {
    write_rows(
        w,
        log.rounds.iter().map(|r| EnergyRow {
            r: r.r,
            k: r.k,
            beta: r.beta,
            m: r.m,
            n_attempts: r.n_attempts,
            energy: r.e_estimate,
            stderr: r.e_stderr,
            exact_energy: e0,
            representation: &r.representation,
            converted: r.converted,
        }),
    )
}

#[derive(Serialize)]
struct PdfRow {
    r: u32,
    phi: f64,
    pdf: f64,
}

/// The posterior density on a uniform grid at every stored snapshot.
pub fn write_fig_a1(log: &RunLog, w: impl Write) -> Result<(), RunError> {
    let grid: Vec<f64> = (0..PDF_GRID)
        .map(|i| i as f64 * TAU / PDF_GRID as f64)
        .collect();
    let mut rows = Vec::new();
    for rec in &log.rounds {
        if let Some(v) = &rec.posterior {
            let post =
                PhasePosterior::from_json_value(v.clone(), UpdatePolicy::Adaptive, DEFAULT_J_MAX)?;
            rows.extend(grid.iter().map(|&phi| PdfRow {
                r: rec.r,
                phi,
                pdf: post.pdf(phi),
            }));
        }
    }
    write_rows(w, rows)
}

#[derive(Serialize)]
struct NoiselessRow {
    run: usize,
    r: u32,
    energy: Option<f64>,
    stderr: Option<f64>,
    abs_error: Option<f64>,
}

pub fn write_fig_a2(logs: &[RunLog], e0: f64, w: impl Write) -> Result<(), RunError> {
    write_rows(
        w,
        logs.iter().enumerate().flat_map(|(run, log)| {
            log.rounds.iter().map(move |r| NoiselessRow {
                run,
                r: r.r,
                energy: r.e_estimate,
                stderr: r.e_stderr,
                abs_error: r.e_estimate.map(|e| (e - e0).abs()),
            })
        }),
    )
}

fn create(dir: &Path, fig: FigureId) -> Result<(PathBuf, File), RunError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(fig.file_name());
    let file = File::create(&path)?;
    Ok((path, file))
}

/// Writes the run-derived figures: `fig5_energy` and `figA1_posteriors` from
/// the first log, `figA2_noiseless` from all of them.
pub fn emit_plot_data(
    logs: &[RunLog],
    figure: FigureId,
    e0: f64,
    dir: &Path,
) -> Result<PathBuf, RunError> {
    let first = logs
        .first()
        .ok_or_else(|| RunError::Config("no run log to plot".into()))?;
    match figure {
        FigureId::Fig5Energy => {
            let (path, f) = create(dir, figure)?;
            write_fig5(first, e0, f)?;
            Ok(path)
        }
        FigureId::FigA1Posteriors => {
            let (path, f) = create(dir, figure)?;
            write_fig_a1(first, f)?;
            Ok(path)
        }
        FigureId::FigA2Noiseless => {
            let (path, f) = create(dir, figure)?;
            write_fig_a2(logs, e0, f)?;
            Ok(path)
        }
        other => Err(RunError::Config(format!(
            "{other} is produced by the synthetic or calibrate commands, not from a run log"
        ))),
    }
}

pub fn write_calibration_figures(
    rep: &CalibrationReport,
    dir: &Path,
) -> Result<Vec<PathBuf>, RunError> {
    let (p3, f3) = create(dir, FigureId::Fig3QVsK)?;
    write_fig3(rep, f3)?;
    let (p4, f4) = create(dir, FigureId::Fig4Discard)?;
    write_fig4(rep, f4)?;
    Ok(vec![p3, p4])
}
