use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bqpe_core::calibration::write_points;
use bqpe_core::runner::{
    bayesian_qpe_run, calibration_run, emit_plot_data, synthetic_ensemble,
    write_calibration_figures, write_fig2, FigureId, RunConfig, RunError, RunLog, RunMode,
    Selection, FIG2_ARMS,
};

#[derive(Parser)]
#[command(
    name = "bqpe",
    about = "Bayesian quantum phase estimation against a simulated H2 circuit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare design strategies on outcomes sampled from the likelihood.
    Synthetic(Common),
    /// Sweep circuit depth and fit the damped likelihood.
    Calibrate {
        #[command(flatten)]
        common: Common,
        /// `unencoded` skips the encoded sweep.
        #[arg(long, value_enum)]
        mode: Option<QpeMode>,
    },
    /// One Bayesian QPE run against the simulator.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: Option<QpeMode>,
        #[arg(long, value_enum)]
        selection: Option<SelectionArg>,
    },
    /// Plot data from existing run logs.
    Emit {
        #[command(flatten)]
        common: Common,
        /// JSONL run log; repeat for several runs.
        #[arg(long = "log", required = true)]
        logs: Vec<PathBuf>,
        /// fig5_energy, figA1_posteriors or figA2_noiseless; all three by default.
        #[arg(long = "figure")]
        figures: Vec<String>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum QpeMode {
    Unencoded,
    Encoded,
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectionArg {
    Optimal,
    Heuristic,
}

impl Common {
    fn config(&self) -> Result<RunConfig, RunError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), RunError> {
    serde_json::to_writer_pretty(BufWriter::new(File::create(path)?), value)?;
    Ok(())
}

#[derive(Serialize)]
struct ArmSummary<'a> {
    arm: &'a str,
    final_mean_cosine_distance: Option<f64>,
    conversions: usize,
}

#[derive(Serialize)]
struct SyntheticSummary<'a> {
    config: &'a RunConfig,
    arms: Vec<ArmSummary<'a>>,
}

fn synthetic(common: &Common) -> Result<(), RunError> {
    let cfg = RunConfig {
        mode: RunMode::Synthetic,
        ..common.config()?
    }
    .validated()?;
    std::fs::create_dir_all(&common.out)?;
    let ens = synthetic_ensemble(&cfg, &FIG2_ARMS)?;
    write_fig2(
        &ens,
        File::create(common.out.join(FigureId::Fig2Convergence.file_name()))?,
    )?;
    let arms = ens
        .arms
        .iter()
        .map(|a| ArmSummary {
            arm: a.arm.name,
            final_mean_cosine_distance: a.mean_cosine_distance.last().copied(),
            conversions: a.conversion_rounds.iter().flatten().count(),
        })
        .collect();
    write_json(
        &common.out.join("summary.json"),
        &SyntheticSummary { config: &cfg, arms },
    )?;
    for a in &ens.arms {
        println!(
            "{:<20} {:.3e}",
            a.arm.name,
            a.mean_cosine_distance.last().copied().unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

fn calibrate(common: &Common, mode: Option<QpeMode>) -> Result<(), RunError> {
    let mut cfg = RunConfig {
        mode: RunMode::Calibrate,
        ..common.config()?
    };
    if let Some(QpeMode::Unencoded) = mode {
        cfg.calibration.encoded = false;
    }
    let cfg = cfg.validated()?;
    std::fs::create_dir_all(&common.out)?;
    let rep = calibration_run(&cfg)?;
    write_points(
        File::create(common.out.join("calibration_unencoded.csv"))?,
        &rep.unencoded,
    )?;
    if cfg.calibration.encoded {
        write_points(
            File::create(common.out.join("calibration_encoded.csv"))?,
            &rep.encoded,
        )?;
    }
    write_calibration_figures(&rep, &common.out)?;
    write_json(
        &common.out.join("summary.json"),
        &serde_json::json!({ "config": cfg, "report": rep }),
    )?;
    for r in &rep.rows {
        println!(
            "k={:<4} q_u={:.4} (model {:.4}) q_e={} d={}",
            r.k,
            r.q_unencoded,
            r.q_model,
            r.q_encoded.map_or("-".into(), |q| format!("{q:.4}")),
            r.discard.map_or("-".into(), |d| format!("{d:.4}"))
        );
    }
    Ok(())
}

fn run(
    common: &Common,
    mode: Option<QpeMode>,
    selection: Option<SelectionArg>,
) -> Result<(), RunError> {
    let mut cfg = common.config()?;
    match mode {
        Some(QpeMode::Unencoded) => cfg.mode = RunMode::Unencoded,
        Some(QpeMode::Encoded) => cfg.mode = RunMode::Encoded,
        None => {}
    }
    match selection {
        Some(SelectionArg::Optimal) => cfg.selection = Selection::Optimal,
        Some(SelectionArg::Heuristic) => cfg.selection = Selection::Heuristic,
        None => {}
    }
    let cfg = cfg.validated()?;
    let e0 = cfg.hamiltonian()?.exact_ground().ground_energy();
    std::fs::create_dir_all(&common.out)?;
    let log = bayesian_qpe_run(&cfg)?;
    log.write_jsonl(BufWriter::new(File::create(common.out.join("run.jsonl"))?))?;
    let summary = log.summary(&cfg, Some(e0));
    write_json(&common.out.join("summary.json"), &summary)?;
    emit_plot_data(
        std::slice::from_ref(&log),
        FigureId::Fig5Energy,
        e0,
        &common.out,
    )?;
    emit_plot_data(
        std::slice::from_ref(&log),
        FigureId::FigA1Posteriors,
        e0,
        &common.out,
    )?;
    println!(
        "R={} R̄={:.2} E={} ± {}",
        summary.totals.r,
        summary.totals.r_bar,
        summary.energy.map_or("-".into(), |e| format!("{e:.5}")),
        summary
            .energy_stderr
            .map_or("-".into(), |s| format!("{s:.5}"))
    );
    Ok(())
}

fn emit(common: &Common, logs: &[PathBuf], figures: &[String]) -> Result<(), RunError> {
    let cfg = common.config()?;
    let e0 = cfg.hamiltonian()?.exact_ground().ground_energy();
    let figures: Vec<FigureId> = if figures.is_empty() {
        vec![
            FigureId::Fig5Energy,
            FigureId::FigA1Posteriors,
            FigureId::FigA2Noiseless,
        ]
    } else {
        figures
            .iter()
            .map(|f| f.parse().map_err(RunError::Config))
            .collect::<Result<_, _>>()?
    };
    let logs = logs
        .iter()
        .map(|p| RunLog::read_jsonl(BufReader::new(File::open(p)?)))
        .collect::<Result<Vec<_>, RunError>>()?;
    for fig in figures {
        let path = emit_plot_data(&logs, fig, e0, &common.out)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Synthetic(common) => synthetic(common),
        Command::Calibrate { common, mode } => calibrate(common, *mode),
        Command::Run {
            common,
            mode,
            selection,
        } => run(common, *mode, *selection),
        Command::Emit {
            common,
            logs,
            figures,
        } => emit(common, logs, figures),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bqpe: {e}");
            ExitCode::from(if e.is_config() {
                2
            } else if e.is_fit_failure() {
                3
            } else {
                1
            })
        }
    }
}
