//! Convenience drivers that run the model systems through the integrator.

use crate::error::Result;
use crate::integrator::{rk4_forward, TimeGrid, Trajectory};
use crate::model::{controlled_seirs_rhs, ModelKind};
use crate::params::{ModelParams, StateVec};

pub fn simulate(kind: ModelKind, params: &ModelParams, grid: &TimeGrid, y0: StateVec) -> Result<Trajectory> {
    rk4_forward(|t, y| kind.rhs(params, t, &StateVec::from(*y)).to_array(), grid, y0.to_array())
}

/// Controlled SEIRS with a caller-supplied treatment schedule `control(t)`.
pub fn simulate_controlled<C>(params: &ModelParams, grid: &TimeGrid, y0: StateVec, control: C) -> Result<Trajectory>
where
    C: Fn(f64) -> f64,
{
    rk4_forward(
        |t, y| controlled_seirs_rhs(params, t, &StateVec::from(*y), control(t)).to_array(),
        grid,
        y0.to_array(),
    )
}
