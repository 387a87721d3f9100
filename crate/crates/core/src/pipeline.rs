//! File-level drivers behind the `seirs` command-line tool.
//!
//! Each `run_*` function reads its inputs, writes CSV/JSON artifacts into the
//! output directory and finishes with a `manifest.json` that records every
//! effective setting and a SHA-256 of each artifact. Outputs contain no
//! timestamps, so identical inputs give byte-identical files.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::control::{forward_backward_sweep, ControlSignal, SweepSettings, SweepSolution};
use crate::cost::{evaluate, report_for, EffectivenessReport};
use crate::equilibrium::{endemic_equilibrium_seirs, r0_seirs, r0_sirs};
use crate::error::{Error, Result};
use crate::fitting::{equilibrium_for, fit, load_case_series, predict_cases_from, Bound, FitSpec};
use crate::integrator::{TimeGrid, Trajectory, DEFAULT_STEP};
use crate::model::ModelKind;
use crate::params::{CostWeights, ModelParams, ParamName, StateVec};
use crate::sensitivity::{
    perturbation_pair, r0_table2_variant, sensitivity_analytic_eq3, sensitivity_analytic_table2, sensitivity_numeric,
    R0Parameter, DEFAULT_REL_STEP,
};
use crate::simulate::simulate;

pub const STATE_COLUMNS: [&str; 4] = ["S", "E", "I", "R"];
pub const COSTATE_COLUMNS: [&str; 4] = ["p1", "p2", "p3", "p4"];

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const NUMERICAL: i32 = 2;
    pub const IO: i32 = 3;
}

/// Maps an error to the process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. } => exit::IO,
        Error::NonFiniteState { .. } | Error::NewtonDivergence(_) => exit::NUMERICAL,
        _ => exit::CONFIG,
    }
}

/// Files written by a run and whether its iterative solver converged.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub converged: bool,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.converged {
            exit::OK
        } else {
            exit::NUMERICAL
        }
    }
}

/// Parses a phase given as a decimal number or as `pi`, `pi/2`, `7pi/5`, `7*pi/5`.
pub fn parse_phase(text: &str) -> Result<f64> {
    let s = text.trim().to_ascii_lowercase().replace(' ', "");
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let bad = || Error::Config(format!("cannot parse phase `{text}`"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (s.as_str(), 1.0),
    };
    let coeff = num.strip_suffix("pi").ok_or_else(bad)?.trim_end_matches('*');
    let coeff = if coeff.is_empty() { 1.0 } else { coeff.parse::<f64>().map_err(|_| bad())? };
    Ok(coeff * std::f64::consts::PI / den)
}

fn require_file(path: &Path, what: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::Config(format!("{what} `{}` does not exist", path.display())))
    }
}

fn load_params(path: &Path, phi: Option<f64>) -> Result<ModelParams> {
    require_file(path, "params file")?;
    let mut params = ModelParams::load(path)?;
    if let Some(phi) = phi {
        params.phi = phi;
    }
    params.validate()?;
    Ok(params)
}

fn prepare_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn write_with<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| Error::io(path, e))?;
    write_file(path, &buf)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Writes `manifest.json` with `settings` and the digest of every file in `files`.
fn write_manifest(out_dir: &Path, command: &str, settings: serde_json::Value, files: &[PathBuf]) -> Result<PathBuf> {
    let mut checksums = BTreeMap::new();
    for f in files {
        let name = f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        checksums.insert(name, sha256_hex(f)?);
    }
    let manifest = serde_json::json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "settings": settings,
        "sha256": checksums,
    });
    let path = out_dir.join("manifest.json");
    write_json(&path, &manifest)?;
    Ok(path)
}

/// Serialized config without the output directory, so reruns into different
/// directories produce identical manifests.
fn config_json<T: Serialize>(cfg: &T) -> serde_json::Value {
    let mut v = serde_json::to_value(cfg).unwrap_or(serde_json::Value::Null);
    if let Some(obj) = v.as_object_mut() {
        obj.remove("out_dir");
    }
    v
}

fn grid_for(t_final: f64, steps: Option<usize>) -> Result<TimeGrid> {
    if !(t_final > 0.0) {
        return Err(Error::Config(format!("horizon must be positive, got {t_final}")));
    }
    match steps {
        Some(n) => TimeGrid::new(0.0, t_final, n),
        None => TimeGrid::with_step(0.0, t_final, DEFAULT_STEP),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub params_path: PathBuf,
    pub phi: f64,
    pub model: ModelKind,
    pub t_final: f64,
    pub steps: Option<usize>,
    pub out_dir: PathBuf,
}

/// Runs the model from its averaged endemic equilibrium. Writes
/// `trajectory.csv` (`t,S,E,I,R`), `monthly.csv` (`month,t,cases` with
/// `cases = s I(k/12)` for every whole month in the horizon) and the manifest.
pub fn run_simulate(cfg: &SimulateConfig) -> Result<RunOutcome> {
    let params = load_params(&cfg.params_path, Some(cfg.phi))?;
    let grid = grid_for(cfg.t_final, cfg.steps)?;
    let y0 = equilibrium_for(cfg.model, &params)?;
    let traj = simulate(cfg.model, &params, &grid, y0)?;
    prepare_out_dir(&cfg.out_dir)?;

    let traj_path = cfg.out_dir.join("trajectory.csv");
    write_with(&traj_path, |w| traj.write_csv(w, STATE_COLUMNS))?;

    let n_months = (12.0 * cfg.t_final + 1e-9).floor() as usize;
    let monthly_path = cfg.out_dir.join("monthly.csv");
    write_with(&monthly_path, |w| {
        writeln!(w, "month,t,cases")?;
        for k in 0..n_months {
            let t = k as f64 / 12.0;
            let i = traj.at(t).map(|v| v[2]).unwrap_or(f64::NAN);
            writeln!(w, "{k},{t},{}", params.s * i)?;
        }
        Ok(())
    })?;

    let files = vec![traj_path, monthly_path];
    let settings = serde_json::json!({
        "model": cfg.model,
        "params": params,
        "grid": grid,
        "initial_state": y0,
        "months": n_months,
    });
    let manifest = write_manifest(&cfg.out_dir, "simulate", settings, &files)?;
    Ok(RunOutcome { files: files.into_iter().chain([manifest]).collect(), converged: true })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub data_path: PathBuf,
    /// Fixed values and initial guesses.
    pub params_path: PathBuf,
    pub model: ModelKind,
    pub free: Vec<ParamName>,
    /// Optional `name = lower, upper` file overriding default bounds.
    pub bounds_path: Option<PathBuf>,
    pub restarts: usize,
    pub seed: u64,
    pub tie_c1_to_b1: bool,
    pub burn_in: Option<f64>,
    pub out_dir: PathBuf,
}

/// Parses `name = lower, upper` lines; `#` starts a comment.
pub fn parse_bounds(text: &str) -> Result<BTreeMap<ParamName, Bound>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |reason: String| Error::Parse { line: idx + 1, reason };
        let (name, range) = line.split_once('=').ok_or_else(|| err(format!("expected `name = lo, hi`, got `{line}`")))?;
        let name: ParamName = name.trim().parse().map_err(|e: Error| err(e.to_string()))?;
        let (lo, hi) = range.split_once(',').ok_or_else(|| err("expected `lo, hi`".into()))?;
        let lo = parse_phase(lo).map_err(|e| err(e.to_string()))?;
        let hi = parse_phase(hi).map_err(|e| err(e.to_string()))?;
        out.insert(name, Bound::new(lo, hi));
    }
    Ok(out)
}

/// Fits the free parameters and writes `fit_result.json`, `fit_series.csv`
/// (`month,empiric,predicted`) and the manifest.
pub fn run_fit(cfg: &FitConfig) -> Result<RunOutcome> {
    require_file(&cfg.data_path, "data file")?;
    let base = load_params(&cfg.params_path, None)?;
    let data = load_case_series(&cfg.data_path)?;
    let mut free = cfg.free.clone();
    if cfg.tie_c1_to_b1 {
        free.retain(|n| *n != ParamName::C1);
    }
    let mut spec = FitSpec::new(cfg.model, &base, &free)?;
    if cfg.model == ModelKind::Sirs {
        // recruitment forcing has no role in SIRS
        spec.fixed.insert(ParamName::C1, 0.0);
        spec.free.remove(&ParamName::C1);
        spec.initial_guess.remove(&ParamName::C1);
    }
    if cfg.tie_c1_to_b1 {
        spec.fixed.remove(&ParamName::C1);
        spec.tie_c1_to_b1 = true;
    }
    if let Some(path) = &cfg.bounds_path {
        require_file(path, "bounds file")?;
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (name, bound) in parse_bounds(&text)? {
            if !spec.free.contains_key(&name) {
                return Err(Error::Config(format!("bound given for `{name}`, which is not free")));
            }
            spec.free.insert(name, bound);
            if let Some(g) = spec.initial_guess.get_mut(&name) {
                *g = g.clamp(bound.lower, bound.upper);
            }
        }
    }
    spec.settings.restarts = cfg.restarts;
    spec.settings.seed = cfg.seed;
    spec.burn_in = cfg.burn_in;

    let result = fit(&data, &spec)?;
    prepare_out_dir(&cfg.out_dir)?;

    let y0 = equilibrium_for(cfg.model, &result.params)?;
    let predicted = predict_cases_from(&result.params, cfg.model, data.len(), y0, cfg.burn_in.unwrap_or(0.0))?;
    let series_path = cfg.out_dir.join("fit_series.csv");
    write_with(&series_path, |w| {
        writeln!(w, "month,empiric,predicted")?;
        for ((m, e), p) in data.months().zip(&data.counts).zip(&predicted) {
            writeln!(w, "{m},{e},{p}")?;
        }
        Ok(())
    })?;

    let r0 = match cfg.model {
        ModelKind::Sirs => r0_sirs(&result.params),
        ModelKind::Seirs => r0_seirs(&result.params),
    };
    let mean_cases = predicted.iter().sum::<f64>() / predicted.len() as f64;
    let result_path = cfg.out_dir.join("fit_result.json");
    write_json(
        &result_path,
        &serde_json::json!({
            "model": cfg.model,
            "result": result,
            "r0": r0,
            "mean_monthly_cases": mean_cases,
        }),
    )?;

    let files = vec![result_path, series_path];
    let settings = serde_json::json!({ "config": config_json(cfg), "spec": spec });
    let manifest = write_manifest(&cfg.out_dir, "fit", settings, &files)?;
    Ok(RunOutcome { files: files.into_iter().chain([manifest]).collect(), converged: result.converged })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityConfig {
    pub params_path: PathBuf,
    /// Fields to raise by `factor` for baseline/perturbed trajectory pairs.
    pub perturb: Vec<ParamName>,
    pub factor: f64,
    pub t_final: f64,
    pub phi: Option<f64>,
    pub out_dir: PathBuf,
}

/// Writes `sensitivity.csv` (`parameter,mode,index`) and one
/// `perturbation_<name>.csv` per requested field.
pub fn run_sensitivity(cfg: &SensitivityConfig) -> Result<RunOutcome> {
    let params = load_params(&cfg.params_path, cfg.phi)?;
    prepare_out_dir(&cfg.out_dir)?;
    let table_path = cfg.out_dir.join("sensitivity.csv");
    let mut rows = Vec::new();
    for p in R0Parameter::ALL {
        rows.push(sensitivity_analytic_eq3(&params, p));
        rows.push(sensitivity_analytic_table2(&params, p));
        rows.push(sensitivity_numeric(r0_seirs, &params, p, DEFAULT_REL_STEP)?);
    }
    write_with(&table_path, |w| {
        writeln!(w, "parameter,mode,index")?;
        for r in &rows {
            writeln!(w, "{},{},{}", r.parameter, r.mode, r.value)?;
        }
        Ok(())
    })?;

    let mut files = vec![table_path];
    if !cfg.perturb.is_empty() {
        let grid = grid_for(cfg.t_final, None)?;
        let y0 = endemic_equilibrium_seirs(&params)?;
        for field in &cfg.perturb {
            let pair = perturbation_pair(&params, *field, cfg.factor, &grid, y0)?;
            let path = cfg.out_dir.join(format!("perturbation_{field}.csv"));
            write_with(&path, |w| pair.write_infectious_csv(w))?;
            files.push(path);
        }
    }
    let settings = serde_json::json!({
        "params": params,
        "r0_seirs": r0_seirs(&params),
        "r0_table2_variant": r0_table2_variant(&params),
        "rel_step": DEFAULT_REL_STEP,
        "perturb": cfg.perturb,
        "factor": cfg.factor,
        "t_final": cfg.t_final,
    });
    let manifest = write_manifest(&cfg.out_dir, "sensitivity", settings, &files)?;
    files.push(manifest);
    Ok(RunOutcome { files, converged: true })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlConfig {
    pub params_path: PathBuf,
    pub phi: f64,
    pub weights: CostWeights,
    pub steps: Option<usize>,
    pub sweep: SweepSettings,
    pub out_dir: PathBuf,
}

/// JSON written next to the control CSVs; `run_report` reads it back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSummary {
    pub params: ModelParams,
    pub weights: CostWeights,
    pub initial_state: StateVec,
    pub grid: TimeGrid,
    pub sweep: SweepSettings,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub final_change: f64,
}

/// Solves the treatment problem from the averaged equilibrium, then the
/// cost-effectiveness report. Writes `states.csv`, `costates.csv`,
/// `control.csv`, `control_summary.json`, `report.json`, `efficacy.csv` and
/// the manifest. Artifacts are written even when the sweep does not converge.
pub fn run_control(cfg: &ControlConfig) -> Result<RunOutcome> {
    let params = load_params(&cfg.params_path, Some(cfg.phi))?;
    cfg.weights.validate()?;
    cfg.sweep.validate()?;
    let grid = grid_for(cfg.weights.t_final, cfg.steps)?;
    let y0 = endemic_equilibrium_seirs(&params)?;
    let solution = forward_backward_sweep(&params, &cfg.weights, y0, &grid, &cfg.sweep)?;
    let report = report_for(&solution, &params, &cfg.weights)?;
    prepare_out_dir(&cfg.out_dir)?;
    let mut files = write_control_artifacts(&cfg.out_dir, &params, &cfg.weights, y0, &cfg.sweep, &solution)?;
    files.extend(write_report_artifacts(&cfg.out_dir, &report)?);
    let settings = serde_json::json!({ "config": config_json(cfg), "params": params, "grid": grid });
    let manifest = write_manifest(&cfg.out_dir, "control", settings, &files)?;
    files.push(manifest);
    Ok(RunOutcome { files, converged: solution.converged })
}

fn write_control_artifacts(
    dir: &Path,
    params: &ModelParams,
    weights: &CostWeights,
    y0: StateVec,
    sweep: &SweepSettings,
    solution: &SweepSolution,
) -> Result<Vec<PathBuf>> {
    let states = dir.join("states.csv");
    solution.states.save_csv(&states, STATE_COLUMNS)?;
    let costates = dir.join("costates.csv");
    solution.costates.save_csv(&costates, COSTATE_COLUMNS)?;
    let control = dir.join("control.csv");
    write_with(&control, |w| solution.control.write_csv(w))?;
    let summary = dir.join("control_summary.json");
    write_json(
        &summary,
        &ControlSummary {
            params: *params,
            weights: *weights,
            initial_state: y0,
            grid: solution.states.grid,
            sweep: *sweep,
            objective: solution.objective,
            iterations: solution.iterations,
            converged: solution.converged,
            final_change: solution.final_change,
        },
    )?;
    Ok(vec![states, costates, control, summary])
}

fn write_report_artifacts(dir: &Path, report: &EffectivenessReport) -> Result<Vec<PathBuf>> {
    let json = dir.join("report.json");
    write_json(&json, &report.summary())?;
    let csv = dir.join("efficacy.csv");
    write_with(&csv, |w| report.write_efficacy_csv(w))?;
    Ok(vec![json, csv])
}

/// Reads control outputs from `in_dir` and writes `report.json` and
/// `efficacy.csv` into `out_dir`. `unit_cost` overrides the stored value.
pub fn run_report(in_dir: &Path, out_dir: &Path, unit_cost: Option<f64>) -> Result<RunOutcome> {
    let summary_path = in_dir.join("control_summary.json");
    require_file(&summary_path, "control summary")?;
    let text = std::fs::read_to_string(&summary_path).map_err(|e| Error::io(&summary_path, e))?;
    let summary: ControlSummary =
        serde_json::from_str(&text).map_err(|e| Error::Parse { line: e.line(), reason: e.to_string() })?;
    let states = Trajectory::<4>::load_csv(in_dir.join("states.csv"), STATE_COLUMNS)?;
    let control_traj = Trajectory::<1>::load_csv(in_dir.join("control.csv"), ["T"])?;
    if control_traj.grid.n_steps != states.grid.n_steps {
        return Err(Error::GridMismatch);
    }
    let control = ControlSignal::new(&states.grid, control_traj.component(0))?;
    let mut weights = summary.weights;
    if let Some(c) = unit_cost {
        weights.unit_cost = c;
    }
    let report = evaluate(&control, &states.component(2), summary.initial_state.i, &weights, summary.params.s)?;
    prepare_out_dir(out_dir)?;
    let mut files = write_report_artifacts(out_dir, &report)?;
    let settings = serde_json::json!({ "weights": weights, "params": summary.params, "objective": summary.objective });
    files.push(write_manifest(out_dir, "report", settings, &files)?);
    Ok(RunOutcome { files, converged: summary.converged })
}

/// Normalizes a phase into `[0, 2π)`.
pub fn normalize_phase(phi: f64) -> f64 {
    phi.rem_euclid(TAU)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn phase_syntax() {
        assert_eq!(parse_phase("1.25").unwrap(), 1.25);
        assert_eq!(parse_phase("pi").unwrap(), PI);
        assert_eq!(parse_phase("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_phase("7pi/5").unwrap(), 7.0 * PI / 5.0);
        assert_eq!(parse_phase("7*pi/5").unwrap(), 7.0 * PI / 5.0);
        assert!(parse_phase("tau").is_err());
        assert!(parse_phase("pi/x").is_err());
    }

    #[test]
    fn bounds_file() {
        let b = parse_bounds("# box\nb0 = 50, 150\nphi = 0, 2pi\n").unwrap();
        assert_eq!(b[&ParamName::B0], Bound::new(50.0, 150.0));
        assert_eq!(b[&ParamName::Phi].upper, TAU);
        assert!(parse_bounds("b0 = 50").is_err());
        assert!(parse_bounds("zeta = 1, 2").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 1);
        assert_eq!(exit_code(&Error::NewtonDivergence("x".into())), 2);
        assert_eq!(exit_code(&Error::io("/x", std::io::Error::other("boom"))), 3);
        assert_eq!(RunOutcome { files: vec![], converged: false }.exit_code(), 2);
    }
}
