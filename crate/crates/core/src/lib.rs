//! Seasonal SIRS/SEIRS epidemic models with treatment optimal control.
//!
//! The crate covers four tasks on the same model family:
//!
//! * simulation of the periodically forced systems ([`model`], [`integrator`], [`simulate`]),
//! * fitting free parameters to monthly case counts ([`fitting`]),
//! * reproduction numbers, the averaged endemic equilibrium and R0 elasticities
//!   ([`equilibrium`], [`sensitivity`]),
//! * the treatment control problem, solved by a forward-backward sweep and
//!   cross-checked by multiple shooting, plus cost-effectiveness summaries
//!   ([`control`], [`shooting`], [`cost`]).
//!
//! Time is measured in years and every rate is annual.

pub mod control;
pub mod cost;
pub mod equilibrium;
pub mod error;
pub mod fitting;
pub mod integrator;
pub mod model;
pub mod nelder_mead;
pub mod params;
pub mod pipeline;
pub mod sensitivity;
pub mod shooting;
pub mod simulate;

pub use error::{Error, Result};
pub use integrator::{TimeGrid, Trajectory};
pub use model::ModelKind;
pub use params::{CostWeights, CostateVec, ModelParams, ParamName, StateVec};
