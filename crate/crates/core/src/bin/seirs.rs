use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use seirs_control::control::SweepSettings;
use seirs_control::pipeline::{self, exit, ControlConfig, FitConfig, RunOutcome, SensitivityConfig, SimulateConfig};
use seirs_control::{CostWeights, Error, ModelKind, ParamName};

#[derive(Parser)]
#[command(name = "seirs", version, about = "Seasonal SIRS/SEIRS models: simulate, fit, sensitivity, treatment control")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the model from its averaged endemic equilibrium.
    Simulate(SimulateArgs),
    /// Fit transmission/seasonality parameters to monthly case counts.
    Fit(FitArgs),
    /// R0 sensitivity indices and optional perturbation runs.
    Sensitivity(SensitivityArgs),
    /// Optimal treatment by forward-backward sweep, plus the cost report.
    Control(ControlArgs),
    /// Recompute the cost-effectiveness report from a control output directory.
    Report(ReportArgs),
}

fn phase(s: &str) -> Result<f64, String> {
    pipeline::parse_phase(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "seirs")]
    model: ModelKind,
    /// Phase in radians; accepts forms like `pi/2` or `7pi/5`.
    #[arg(long, value_parser = phase, allow_hyphen_values = true)]
    phi: f64,
    /// Horizon in years.
    #[arg(long, default_value_t = 35.0 / 12.0)]
    tf: f64,
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Args)]
struct FitArgs {
    /// CSV with `month,cases` columns.
    #[arg(long)]
    data: PathBuf,
    /// Fixed values and initial guesses.
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "seirs")]
    model: ModelKind,
    /// Comma-separated free parameters.
    #[arg(long, value_delimiter = ',', default_value = "b0,b1,c1,phi,s")]
    free: Vec<ParamName>,
    /// File of `name = lower, upper` lines.
    #[arg(long)]
    bounds: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Constrain c1 = b1.
    #[arg(long)]
    tie_c1: bool,
    /// Years simulated before the first month.
    #[arg(long)]
    burn_in: Option<f64>,
}

#[derive(Args)]
struct SensitivityArgs {
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated fields to raise by `--factor` for trajectory pairs.
    #[arg(long, value_delimiter = ',')]
    perturb: Vec<ParamName>,
    #[arg(long, default_value_t = 1.10)]
    factor: f64,
    #[arg(long, default_value_t = 5.0)]
    tf: f64,
    #[arg(long, value_parser = phase, allow_hyphen_values = true)]
    phi: Option<f64>,
}

#[derive(Args)]
struct ControlArgs {
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_parser = phase, allow_hyphen_values = true)]
    phi: f64,
    #[arg(long, default_value_t = 5.0)]
    tf: f64,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    kappa1: f64,
    #[arg(long, default_value_t = 0.001)]
    kappa2: f64,
    #[arg(long, default_value_t = 1.0)]
    tmax: f64,
    #[arg(long, default_value_t = 1.0)]
    unit_cost: f64,
    #[arg(long, default_value_t = 0.5)]
    relaxation: f64,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory written by `control`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    unit_cost: Option<f64>,
}

fn run(cli: Cli) -> Result<RunOutcome, Error> {
    match cli.command {
        Command::Simulate(a) => pipeline::run_simulate(&SimulateConfig {
            params_path: a.params,
            phi: a.phi,
            model: a.model,
            t_final: a.tf,
            steps: a.steps,
            out_dir: a.out,
        }),
        Command::Fit(a) => pipeline::run_fit(&FitConfig {
            data_path: a.data,
            params_path: a.params,
            model: a.model,
            free: a.free,
            bounds_path: a.bounds,
            restarts: a.restarts,
            seed: a.seed,
            tie_c1_to_b1: a.tie_c1,
            burn_in: a.burn_in,
            out_dir: a.out,
        }),
        Command::Sensitivity(a) => pipeline::run_sensitivity(&SensitivityConfig {
            params_path: a.params,
            perturb: a.perturb,
            factor: a.factor,
            t_final: a.tf,
            phi: a.phi,
            out_dir: a.out,
        }),
        Command::Control(a) => pipeline::run_control(&ControlConfig {
            params_path: a.params,
            phi: a.phi,
            weights: CostWeights {
                kappa1: a.kappa1,
                kappa2: a.kappa2,
                unit_cost: a.unit_cost,
                t_final: a.tf,
                t_max: a.tmax,
            },
            steps: a.steps,
            sweep: SweepSettings { relaxation: a.relaxation, tol: a.tol, max_iter: a.max_iter },
            out_dir: a.out,
        }),
        Command::Report(a) => pipeline::run_report(&a.input, &a.out, a.unit_cost),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::CONFIG as u8 } else { 0 });
        }
    };
    match run(cli).context("seirs") {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            if !outcome.converged {
                eprintln!("seirs: iteration did not converge; artifacts written");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(err) => {
            let code = err.downcast_ref::<Error>().map(pipeline::exit_code).unwrap_or(exit::CONFIG);
            eprintln!("{err:#}");
            ExitCode::from(code as u8)
        }
    }
}
