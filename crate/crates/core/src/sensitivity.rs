//! Normalized forward sensitivity indices of R0, `(∂R0/∂p)(p/R0)`.
//!
//! Two closed-form modes are provided. [`SensitivityMode::Eq3`] differentiates
//! `b0 ε / ((μ+ν)(ε+μ))`. [`SensitivityMode::Table2`] differentiates the variant
//! `b0 ε / ((μ+ν)(ε+ν))`, which is the denominator the published index table
//! is consistent with. [`sensitivity_numeric`] checks either by central
//! differences.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{TimeGrid, Trajectory};
use crate::model::ModelKind;
use crate::params::{ModelParams, ParamName, StateVec};
use crate::simulate::simulate;

/// Default relative step of the central-difference mode.
pub const DEFAULT_REL_STEP: f64 = 1e-5;

/// Parameters R0 depends on. `Beta` is the mean transmission `b0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum R0Parameter {
    Beta,
    Epsilon,
    Nu,
    Mu,
}

impl R0Parameter {
    pub const ALL: [R0Parameter; 4] = [R0Parameter::Beta, R0Parameter::Epsilon, R0Parameter::Nu, R0Parameter::Mu];

    pub fn field(self) -> ParamName {
        match self {
            R0Parameter::Beta => ParamName::B0,
            R0Parameter::Epsilon => ParamName::Epsilon,
            R0Parameter::Nu => ParamName::Nu,
            R0Parameter::Mu => ParamName::Mu,
        }
    }
}

impl fmt::Display for R0Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            R0Parameter::Beta => "beta",
            R0Parameter::Epsilon => "epsilon",
            R0Parameter::Nu => "nu",
            R0Parameter::Mu => "mu",
        })
    }
}

impl FromStr for R0Parameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beta" | "b0" => Ok(R0Parameter::Beta),
            "epsilon" => Ok(R0Parameter::Epsilon),
            "nu" => Ok(R0Parameter::Nu),
            "mu" => Ok(R0Parameter::Mu),
            other => Err(Error::UnknownParameter(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SensitivityMode {
    #[serde(rename = "eq3")]
    Eq3,
    #[serde(rename = "table2-variant")]
    Table2,
    #[serde(rename = "numeric")]
    Numeric,
}

impl fmt::Display for SensitivityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SensitivityMode::Eq3 => "eq3",
            SensitivityMode::Table2 => "table2-variant",
            SensitivityMode::Numeric => "numeric",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityIndex {
    pub parameter: R0Parameter,
    pub value: f64,
    pub mode: SensitivityMode,
}

/// The R0 variant whose elasticities match the published index table.
pub fn r0_table2_variant(params: &ModelParams) -> f64 {
    params.b0 * params.epsilon / ((params.mu + params.nu) * (params.epsilon + params.nu))
}

pub fn sensitivity_analytic_eq3(params: &ModelParams, p: R0Parameter) -> SensitivityIndex {
    let ModelParams { mu, nu, epsilon, .. } = *params;
    let value = match p {
        R0Parameter::Beta => 1.0,
        R0Parameter::Epsilon => mu / (epsilon + mu),
        R0Parameter::Nu => -nu / (mu + nu),
        R0Parameter::Mu => -mu / (mu + nu) - mu / (epsilon + mu),
    };
    SensitivityIndex { parameter: p, value, mode: SensitivityMode::Eq3 }
}

pub fn sensitivity_analytic_table2(params: &ModelParams, p: R0Parameter) -> SensitivityIndex {
    let ModelParams { mu, nu, epsilon, .. } = *params;
    let value = match p {
        R0Parameter::Beta => 1.0,
        R0Parameter::Epsilon => nu / (epsilon + nu),
        R0Parameter::Nu => -nu / (mu + nu) - nu / (epsilon + nu),
        R0Parameter::Mu => -mu / (mu + nu),
    };
    SensitivityIndex { parameter: p, value, mode: SensitivityMode::Table2 }
}

/// Central-difference elasticity of `r0_fn` with step `rel_step · p`.
pub fn sensitivity_numeric<F>(r0_fn: F, params: &ModelParams, p: R0Parameter, rel_step: f64) -> Result<SensitivityIndex>
where
    F: Fn(&ModelParams) -> f64,
{
    if !(rel_step > 0.0 && rel_step <= 0.1) {
        return Err(Error::DegenerateValue(format!("rel_step {rel_step} not in (0, 0.1]")));
    }
    let field = p.field();
    let x = params.get(field);
    let r0 = r0_fn(params);
    if r0 == 0.0 || !r0.is_finite() {
        return Err(Error::DegenerateValue(format!("R0 = {r0}")));
    }
    let dx = rel_step * x;
    let hi = r0_fn(&params.with(field, x + dx));
    let lo = r0_fn(&params.with(field, x - dx));
    let derivative = (hi - lo) / (2.0 * dx);
    Ok(SensitivityIndex { parameter: p, value: derivative * x / r0, mode: SensitivityMode::Numeric })
}

/// Same as [`sensitivity_numeric`] with the parameter given by name.
pub fn sensitivity_numeric_by_name<F>(r0_fn: F, params: &ModelParams, name: &str, rel_step: f64) -> Result<SensitivityIndex>
where
    F: Fn(&ModelParams) -> f64,
{
    sensitivity_numeric(r0_fn, params, name.parse()?, rel_step)
}

/// Baseline and perturbed SEIRS runs on the same grid, `field` scaled by `factor`.
#[derive(Debug, Clone)]
pub struct PerturbationPair {
    pub field: ParamName,
    pub factor: f64,
    pub baseline: Trajectory,
    pub perturbed: Trajectory,
}

impl PerturbationPair {
    /// CSV `t,I_baseline,I_perturbed`.
    pub fn write_infectious_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,I_baseline,I_perturbed")?;
        for ((t, a), b) in self.baseline.grid.nodes().zip(&self.baseline.values).zip(&self.perturbed.values) {
            writeln!(out, "{t},{},{}", a[2], b[2])?;
        }
        Ok(())
    }
}

pub fn perturbation_pair(
    params: &ModelParams,
    field: ParamName,
    factor: f64,
    grid: &TimeGrid,
    y0: StateVec,
) -> Result<PerturbationPair> {
    let perturbed_params = params.with(field, params.get(field) * factor);
    perturbed_params.validate()?;
    let baseline = simulate(ModelKind::Seirs, params, grid, y0)?;
    let perturbed = simulate(ModelKind::Seirs, &perturbed_params, grid, y0)?;
    Ok(PerturbationPair { field, factor, baseline, perturbed })
}
