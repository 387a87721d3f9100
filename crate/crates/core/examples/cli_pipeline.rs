//! Drives the file-based pipeline the `seirs` binary uses: simulate, control,
//! then a report with a different unit cost, all into a temporary directory.
//!
//! `cargo run --release --example cli_pipeline -- [out_dir]`

use std::path::PathBuf;

use seirs_control::control::SweepSettings;
use seirs_control::pipeline::{run_control, run_report, run_simulate, ControlConfig, SimulateConfig};
use seirs_control::{CostWeights, ModelKind};

fn main() -> Result<(), seirs_control::Error> {
    let out: PathBuf = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("seirs-demo"));
    let params = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/hrsv_seirs.params");

    let sim = run_simulate(&SimulateConfig {
        params_path: params.clone(),
        phi: 7.0 * std::f64::consts::PI / 5.0,
        model: ModelKind::Seirs,
        t_final: 35.0 / 12.0,
        steps: None,
        out_dir: out.join("simulate"),
    })?;
    let ctl = run_control(&ControlConfig {
        params_path: params,
        phi: std::f64::consts::FRAC_PI_2,
        weights: CostWeights::hrsv_default(),
        steps: None,
        sweep: SweepSettings::default(),
        out_dir: out.join("control"),
    })?;
    let rep = run_report(&out.join("control"), &out.join("report_c2"), Some(2.0))?;
    for f in sim.files.iter().chain(&ctl.files).chain(&rep.files) {
        println!("{}", f.display());
    }
    Ok(())
}
