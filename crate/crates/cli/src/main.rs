//! Geometric phases, quasienergies and Bloch trajectories of the driven
//! Rabi model, as reproducible CSV data.

use clap::{Args, Parser, Subcommand};
use rabi_aa_cli::commands;
use rabi_aa_cli::config::{
    parse_engines, BlochConfig, FileConfig, InitialState, ResonanceConfig, SlopesGapsConfig,
    SweepConfig,
};
use rabi_aa_cli::{CliError, RunStatus};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "rabi-aa",
    about = "Aharonov-Anandan geometric phases of the driven Rabi model",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Drive amplitude A/ω.
    #[arg(long = "A")]
    a_over_omega: Option<f64>,
    /// Integrator step dt·ω for the exact engine.
    #[arg(long)]
    dt_omega: Option<f64>,
    /// TOML config file; flags override its keys.
    #[arg(long)]
    config: Option<String>,
    /// Output file path.
    #[arg(long)]
    out: Option<String>,
}

impl Common {
    fn file(&self) -> Result<FileConfig, CliError> {
        match &self.config {
            Some(path) => FileConfig::load(path),
            None => Ok(FileConfig::default()),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sweep Δ/ω and emit per-engine phases, quasienergies and
    /// cyclic-state moduli.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Lower end of the Δ/ω range.
        #[arg(long)]
        delta_min: Option<f64>,
        /// Upper end of the Δ/ω range.
        #[arg(long)]
        delta_max: Option<f64>,
        /// Number of grid points (≥ 2).
        #[arg(long)]
        steps: Option<usize>,
        /// Comma-separated engine list: exact,rwa,chrw,pt3,pt5.
        #[arg(long)]
        engines: Option<String>,
        /// Dynamic-phase quadrature samples.
        #[arg(long)]
        quad_points: Option<usize>,
        /// Worker threads (default: logical cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Characterize a harmonic resonance: Δres, gap, slope.
    Resonance {
        #[command(flatten)]
        common: Common,
        /// Harmonic order n of the resonance Ω̃ = 2nω (1 or 2).
        #[arg(long)]
        harmonic_n: Option<u32>,
        /// Comma-separated report engines: closed_form,exact_numeric.
        #[arg(long)]
        engines: Option<String>,
    },
    /// Bloch trajectory of the exact evolution.
    Bloch {
        #[command(flatten)]
        common: Common,
        /// Transition frequency Δ/ω.
        #[arg(long)]
        delta: Option<f64>,
        /// Initial state: instantaneous|cyclic.
        #[arg(long)]
        initial: Option<String>,
        /// Number of drive periods.
        #[arg(long)]
        periods: Option<u32>,
    },
    /// Scaled slope and avoided-crossing gap versus drive amplitude.
    SlopesGaps {
        #[command(flatten)]
        common: Common,
        /// Lower end of the A/ω range.
        #[arg(long)]
        a_min: Option<f64>,
        /// Upper end of the A/ω range.
        #[arg(long)]
        a_max: Option<f64>,
        /// Number of amplitude points.
        #[arg(long)]
        steps: Option<usize>,
        /// Measuring engine: exact|pt3.
        #[arg(long)]
        engines: Option<String>,
    },
    /// Print the renormalized-frame parameters for one point.
    Xi {
        #[command(flatten)]
        common: Common,
        /// Transition frequency Δ/ω.
        #[arg(long)]
        delta: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(status) => {
            if status.failures > 0 {
                eprintln!("completed with {} failed row(s)", status.failures);
            }
            ExitCode::from(status.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<RunStatus, CliError> {
    match command {
        Command::Sweep {
            common,
            delta_min,
            delta_max,
            steps,
            engines,
            quad_points,
            jobs,
        } => {
            let file = common.file()?;
            let engine_names: Vec<String> = engines
                .map(|e| vec![e])
                .or_else(|| file.engines.clone())
                .unwrap_or_else(|| vec!["chrw".into(), "rwa".into(), "exact".into()]);
            let cfg = SweepConfig {
                a_over_omega: common.a_over_omega.or(file.a_over_omega).unwrap_or(1.0),
                delta_min: delta_min.or(file.delta_min).unwrap_or(0.1),
                delta_max: delta_max.or(file.delta_max).unwrap_or(3.5),
                steps: steps.or(file.steps).unwrap_or(35),
                engines: parse_engines(&engine_names)?,
                dt_omega: common.dt_omega.or(file.dt_omega).unwrap_or(1e-4),
                quad_points: quad_points.or(file.quad_points).unwrap_or(10_000),
                jobs: jobs
                    .or(file.jobs)
                    .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
                out: common.out.or(file.out).unwrap_or_else(|| "sweep.csv".into()),
            };
            commands::run_sweep(&cfg)
        }
        Command::Resonance {
            common,
            harmonic_n,
            engines,
        } => {
            let file = common.file()?;
            let selected = engines
                .or_else(|| file.engines.clone().map(|v| v.join(",")))
                .unwrap_or_else(|| "closed_form,exact_numeric".into());
            let mut closed_form = false;
            let mut exact_numeric = false;
            for part in selected.split(',') {
                match part.trim() {
                    "closed_form" => closed_form = true,
                    "exact_numeric" | "exact" => exact_numeric = true,
                    "" => {}
                    other => {
                        return Err(CliError::Config(format!(
                            "unknown resonance engine '{other}' (expected closed_form|exact_numeric)"
                        )))
                    }
                }
            }
            let cfg = ResonanceConfig {
                a_over_omega: common.a_over_omega.or(file.a_over_omega).unwrap_or(1.0),
                harmonic_n: harmonic_n.or(file.harmonic_n).unwrap_or(1),
                closed_form,
                exact_numeric,
                dt_omega: common.dt_omega.or(file.dt_omega).unwrap_or(1e-4),
                out: common.out.or(file.out).unwrap_or_else(|| "resonance.csv".into()),
            };
            commands::run_resonance(&cfg)
        }
        Command::Bloch {
            common,
            delta,
            initial,
            periods,
        } => {
            let file = common.file()?;
            let initial_name = initial
                .or(file.initial.clone())
                .unwrap_or_else(|| "cyclic".into());
            let cfg = BlochConfig {
                delta_over_omega: delta.or(file.delta).unwrap_or(2.9),
                a_over_omega: common.a_over_omega.or(file.a_over_omega).unwrap_or(1.0),
                initial: initial_name.parse::<InitialState>()?,
                periods: periods.or(file.periods).unwrap_or(10),
                dt_omega: common.dt_omega.or(file.dt_omega).unwrap_or(1e-4),
                out: common.out.or(file.out).unwrap_or_else(|| "bloch.csv".into()),
            };
            commands::run_bloch(&cfg)
        }
        Command::SlopesGaps {
            common,
            a_min,
            a_max,
            steps,
            engines,
        } => {
            let file = common.file()?;
            let engine_name = engines
                .or_else(|| file.engines.clone().map(|v| v.join(",")))
                .unwrap_or_else(|| "exact".into());
            let engine = engine_name
                .trim()
                .parse()
                .map_err(|e: rabi_aa::Error| CliError::Config(e.to_string()))?;
            let cfg = SlopesGapsConfig {
                a_min: a_min.or(file.a_min).unwrap_or(0.4),
                a_max: a_max.or(file.a_max).unwrap_or(2.0),
                steps: steps.or(file.steps).unwrap_or(9),
                engine,
                dt_omega: common.dt_omega.or(file.dt_omega).unwrap_or(1e-4),
                out: common
                    .out
                    .or(file.out)
                    .unwrap_or_else(|| "slopes_gaps.csv".into()),
            };
            commands::run_slopes_gaps(&cfg)
        }
        Command::Xi { common, delta } => {
            let file = common.file()?;
            commands::run_xi(
                delta.or(file.delta).unwrap_or(1.0),
                common.a_over_omega.or(file.a_over_omega).unwrap_or(1.0),
            )
        }
    }
}
