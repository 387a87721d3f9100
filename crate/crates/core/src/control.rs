//! Treatment optimal control by the forward-backward sweep.
//!
//! Minimizes `∫ κ1 I + κ2 T² dt` subject to the controlled SEIRS system with
//! `0 ≤ T ≤ T_max`. Each sweep iteration integrates the states forward with
//! the current control, the costates backward from zero terminal data, and
//! relaxes the control toward the clamped stationarity formula.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{rk4_backward, rk4_forward, TimeGrid, Trajectory};
use crate::model::{adjoint_rhs, controlled_seirs_rhs};
use crate::params::{CostWeights, CostateVec, ModelParams, StateVec};

/// Treatment intensity at the grid nodes, linearly interpolated in between.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSignal {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

impl ControlSignal {
    pub fn zeros(grid: &TimeGrid) -> Self {
        ControlSignal { grid: *grid, values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: &TimeGrid, value: f64) -> Self {
        ControlSignal { grid: *grid, values: vec![value; grid.len()] }
    }

    pub fn new(grid: &TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(ControlSignal { grid: *grid, values })
    }

    /// Errors unless every value lies in `[0, t_max]`.
    pub fn check_admissible(&self, t_max: f64) -> Result<()> {
        match self.values.iter().position(|v| !(*v >= 0.0 && *v <= t_max)) {
            None => Ok(()),
            Some(k) => Err(Error::InvalidParams {
                name: "control",
                reason: format!("value {} at node {k} outside [0, {t_max}]", self.values[k]),
            }),
        }
    }

    #[inline]
    pub fn at(&self, t: f64) -> f64 {
        match self.grid.locate(t) {
            Ok((k, 0.0)) => self.values[k],
            Ok((k, frac)) => self.values[k] + frac * (self.values[k + 1] - self.values[k]),
            Err(_) => {
                if t < self.grid.t0 {
                    self.values[0]
                } else {
                    self.values[self.values.len() - 1]
                }
            }
        }
    }

    /// CSV `t,T`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,T")?;
        for (t, v) in self.grid.nodes().zip(&self.values) {
            writeln!(out, "{t},{v}")?;
        }
        Ok(())
    }
}

/// `min{max{0, (p3 − p4) I / (2 κ2)}, T_max}`.
#[inline]
pub fn extremal_control(p3: f64, p4: f64, infectious: f64, kappa2: f64, t_max: f64) -> f64 {
    ((p3 - p4) * infectious / (2.0 * kappa2)).max(0.0).min(t_max)
}

/// Trapezoid quadrature of `κ1 I + κ2 T²` on the shared grid.
pub fn objective(states: &Trajectory, control: &ControlSignal, weights: &CostWeights) -> Result<f64> {
    if states.grid != control.grid || states.values.len() != control.values.len() {
        return Err(Error::GridMismatch);
    }
    let running: Vec<f64> = states
        .values
        .iter()
        .zip(&control.values)
        .map(|(y, t)| weights.kappa1 * y[2] + weights.kappa2 * t * t)
        .collect();
    states.grid.trapezoid(&running)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    /// Weight of the new projection in the convex control update, in (0, 1].
    pub relaxation: f64,
    /// Relative change below which states, costates and control are all considered settled.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings { relaxation: 0.5, tol: 1e-4, max_iter: 500 }
    }
}

impl SweepSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::Config(format!("relaxation {} not in (0, 1]", self.relaxation)));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::Config("tol must be > 0 and max_iter >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SweepSolution {
    pub states: Trajectory,
    pub costates: Trajectory,
    pub control: ControlSignal,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Largest relative change seen in the last iteration.
    pub final_change: f64,
}

impl SweepSolution {
    pub fn infectious(&self) -> Vec<f64> {
        self.states.component(2)
    }

    /// Largest `|T_k − extremal_control(p3_k, p4_k, I_k)|` over nodes.
    pub fn stationarity_gap(&self, weights: &CostWeights) -> f64 {
        self.control
            .values
            .iter()
            .zip(self.states.values.iter().zip(&self.costates.values))
            .map(|(t, (y, p))| (t - extremal_control(p[2], p[3], y[2], weights.kappa2, weights.t_max)).abs())
            .fold(0.0, f64::max)
    }
}

/// Controlled SEIRS states for a fixed control schedule.
pub fn solve_states(
    params: &ModelParams,
    grid: &TimeGrid,
    y0: StateVec,
    control: &ControlSignal,
) -> Result<Trajectory> {
    rk4_forward(
        |t, y| controlled_seirs_rhs(params, t, &StateVec::from(*y), control.at(t)).to_array(),
        grid,
        y0.to_array(),
    )
}

/// Costates integrated backward from `p(t_f) = 0` along given states and control.
pub fn solve_costates(
    params: &ModelParams,
    weights: &CostWeights,
    states: &Trajectory,
    control: &ControlSignal,
) -> Result<Trajectory> {
    let grid = states.grid;
    rk4_backward(
        |t, p| {
            // stage times lie on [t0, tf] by construction
            let y = states.at(t).unwrap_or_else(|_| if t < grid.t0 { states.first() } else { states.last() });
            adjoint_rhs(params, weights, t, &StateVec::from(y), &CostateVec::from(*p), control.at(t)).to_array()
        },
        &grid,
        [0.0; 4],
    )
}

fn max_relative_change(old: &[f64], new: &[f64]) -> f64 {
    let scale = new.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = old.iter().zip(new).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if diff == 0.0 {
        0.0
    } else if scale == 0.0 {
        f64::INFINITY
    } else {
        diff / scale
    }
}

fn trajectory_change<const D: usize>(old: &Trajectory<D>, new: &Trajectory<D>) -> f64 {
    (0..D).map(|c| max_relative_change(&old.component(c), &new.component(c))).fold(0.0, f64::max)
}

/// Runs the sweep from `T ≡ 0`.
///
/// Stops when the control, every state component and every costate component
/// change by less than `tol` relative to their max-norm. The returned control
/// is the one that produced the returned states and costates. Hitting
/// `max_iter` is not an error: the last iterate comes back with
/// `converged = false`.
pub fn forward_backward_sweep(
    params: &ModelParams,
    weights: &CostWeights,
    y0: StateVec,
    grid: &TimeGrid,
    settings: &SweepSettings,
) -> Result<SweepSolution> {
    params.validate()?;
    weights.validate()?;
    settings.validate()?;
    let mut control = ControlSignal::zeros(grid);
    let mut states = solve_states(params, grid, y0, &control)?;
    let mut costates = solve_costates(params, weights, &states, &control)?;
    let mut change = f64::INFINITY;

    for iteration in 1..=settings.max_iter {
        let updated: Vec<f64> = control
            .values
            .iter()
            .zip(states.values.iter().zip(&costates.values))
            .map(|(old, (y, p))| {
                let target = extremal_control(p[2], p[3], y[2], weights.kappa2, weights.t_max);
                ((1.0 - settings.relaxation) * old + settings.relaxation * target).clamp(0.0, weights.t_max)
            })
            .collect();
        let next_control = ControlSignal { grid: *grid, values: updated };
        let next_states = solve_states(params, grid, y0, &next_control)?;
        let next_costates = solve_costates(params, weights, &next_states, &next_control)?;

        change = max_relative_change(&control.values, &next_control.values)
            .max(trajectory_change(&states, &next_states))
            .max(trajectory_change(&costates, &next_costates));
        control = next_control;
        states = next_states;
        costates = next_costates;

        if change < settings.tol {
            let objective = objective(&states, &control, weights)?;
            return Ok(SweepSolution { states, costates, control, objective, iterations: iteration, converged: true, final_change: change });
        }
    }
    let objective = objective(&states, &control, weights)?;
    Ok(SweepSolution { states, costates, control, objective, iterations: settings.max_iter, converged: false, final_change: change })
}

/// Derivative of the discretized objective with respect to the control value
/// at node `k`, by the adjoint formula and by central differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCheck {
    pub node: usize,
    pub adjoint: f64,
    pub finite_difference: f64,
}

impl GradientCheck {
    pub fn relative_error(&self) -> f64 {
        let scale = self.adjoint.abs().max(self.finite_difference.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.adjoint - self.finite_difference).abs() / scale
        }
    }
}

/// Compares `w_k (2 κ2 T_k − (p3_k − p4_k) I_k)` with
/// `(J(T + δ e_k) − J(T − δ e_k)) / 2δ`, re-solving the states for each side.
pub fn adjoint_gradient_check(
    params: &ModelParams,
    weights: &CostWeights,
    y0: StateVec,
    control: &ControlSignal,
    node: usize,
    fd_step: f64,
) -> Result<GradientCheck> {
    let grid = control.grid;
    if node >= grid.len() {
        return Err(Error::OutOfRange { t: node as f64, t0: 0.0, tf: grid.n_steps as f64 });
    }
    let states = solve_states(params, &grid, y0, control)?;
    let costates = solve_costates(params, weights, &states, control)?;
    let (y, p) = (states.values[node], costates.values[node]);
    let density = 2.0 * weights.kappa2 * control.values[node] - (p[2] - p[3]) * y[2];
    let adjoint = grid.trapezoid_weight(node) * density;

    let perturbed = |delta: f64| -> Result<f64> {
        let mut c = control.clone();
        c.values[node] += delta;
        let s = solve_states(params, &grid, y0, &c)?;
        objective(&s, &c, weights)
    };
    let finite_difference = (perturbed(fd_step)? - perturbed(-fd_step)?) / (2.0 * fd_step);
    Ok(GradientCheck { node, adjoint, finite_difference })
}
