//! Efficacy, cases averted, effectiveness, total cost and ACER of a treatment run.
//!
//! `I(0)` is the pre-treatment equilibrium level, so `t_f I(0)` stands for the
//! cases expected with no intervention. `A` and `TC` are reported in scaled
//! case units (fractions multiplied by `s`).

use serde::{Deserialize, Serialize};

use crate::control::{ControlSignal, SweepSolution};
use crate::error::{Error, Result};
use crate::integrator::TimeGrid;
use crate::params::{CostWeights, ModelParams};

/// `F(t) = 1 − I*(t)/I(0)` at every node.
pub fn efficacy(infectious: &[f64], initial: f64) -> Result<Vec<f64>> {
    if initial == 0.0 {
        return Err(Error::ZeroInitial);
    }
    Ok(infectious.iter().map(|i| 1.0 - i / initial).collect())
}

/// `s (t_f I(0) − ∫ I*)`, trapezoid on `grid`.
pub fn cases_averted(grid: &TimeGrid, infectious: &[f64], initial: f64, t_final: f64, scale: f64) -> Result<f64> {
    if initial == 0.0 {
        return Err(Error::ZeroInitial);
    }
    Ok(scale * (t_final * initial - grid.trapezoid(infectious)?))
}

/// `A / (s t_f I(0))`.
pub fn effectiveness(averted: f64, initial: f64, t_final: f64, scale: f64) -> Result<f64> {
    if initial == 0.0 {
        return Err(Error::ZeroInitial);
    }
    Ok(averted / (scale * t_final * initial))
}

/// `s ∫ C T* I*`, trapezoid on the control grid.
pub fn total_cost(control: &ControlSignal, infectious: &[f64], unit_cost: f64, scale: f64) -> Result<f64> {
    if infectious.len() != control.values.len() {
        return Err(Error::GridMismatch);
    }
    let integrand: Vec<f64> = control.values.iter().zip(infectious).map(|(t, i)| unit_cost * t * i).collect();
    Ok(scale * control.grid.trapezoid(&integrand)?)
}

pub fn acer(total_cost: f64, averted: f64) -> Result<f64> {
    if averted == 0.0 {
        return Err(Error::ZeroAverted);
    }
    Ok(total_cost / averted)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectivenessReport {
    pub times: Vec<f64>,
    pub efficacy: Vec<f64>,
    pub efficacy_min: f64,
    pub efficacy_max: f64,
    /// Cases averted, scaled case units.
    pub cases_averted: f64,
    /// Fraction of no-intervention cases averted (dimensionless).
    pub effectiveness: f64,
    /// Total cost, unit cost times scaled case-years treated.
    pub total_cost: f64,
    /// Cost per averted case; `None` when nothing was averted.
    pub acer: Option<f64>,
    pub initial_infectious: f64,
    pub scale: f64,
    pub units: String,
}

impl EffectivenessReport {
    /// Summary without the per-node series, for JSON output.
    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "efficacy_min": self.efficacy_min,
            "efficacy_max": self.efficacy_max,
            "cases_averted": self.cases_averted,
            "effectiveness": self.effectiveness,
            "total_cost": self.total_cost,
            "acer": self.acer,
            "initial_infectious": self.initial_infectious,
            "scale": self.scale,
            "units": self.units,
        })
    }

    /// CSV `t,F`.
    pub fn write_efficacy_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,F")?;
        for (t, f) in self.times.iter().zip(&self.efficacy) {
            writeln!(out, "{t},{f}")?;
        }
        Ok(())
    }
}

/// All measures for a control run, with `I(0)` taken as `initial`.
pub fn evaluate(
    control: &ControlSignal,
    infectious: &[f64],
    initial: f64,
    weights: &CostWeights,
    scale: f64,
) -> Result<EffectivenessReport> {
    let grid = control.grid;
    if infectious.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    let t_final = grid.tf - grid.t0;
    let f = efficacy(infectious, initial)?;
    let averted = cases_averted(&grid, infectious, initial, t_final, scale)?;
    let tc = total_cost(control, infectious, weights.unit_cost, scale)?;
    let acer = match acer(tc, averted) {
        Ok(v) => Some(v),
        Err(Error::ZeroAverted) => None,
        Err(e) => return Err(e),
    };
    Ok(EffectivenessReport {
        times: grid.nodes().collect(),
        efficacy_min: f.iter().copied().fold(f64::INFINITY, f64::min),
        efficacy_max: f.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        efficacy: f,
        cases_averted: averted,
        effectiveness: effectiveness(averted, initial, t_final, scale)?,
        total_cost: tc,
        acer,
        initial_infectious: initial,
        scale,
        units: "cases_averted and total_cost in scaled cases (fraction x s); effectiveness dimensionless".into(),
    })
}

/// [`evaluate`] on a sweep result, with `I(0)` the first state node.
pub fn report_for(solution: &SweepSolution, params: &ModelParams, weights: &CostWeights) -> Result<EffectivenessReport> {
    let infectious = solution.infectious();
    evaluate(&solution.control, &infectious, infectious[0], weights, params.s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid() -> TimeGrid {
        TimeGrid::new(0.0, 5.0, 100).unwrap()
    }

    #[test]
    fn efficacy_cases() {
        assert_eq!(efficacy(&[0.2, 0.2], 0.2).unwrap(), vec![0.0, 0.0]);
        assert_eq!(efficacy(&[0.4], 0.2).unwrap(), vec![-1.0]);
        assert!(matches!(efficacy(&[0.4], 0.0), Err(Error::ZeroInitial)));
    }

    #[test]
    fn averted_cases() {
        let g = grid();
        let flat = vec![0.03; g.len()];
        assert_relative_eq!(cases_averted(&g, &flat, 0.03, 5.0, 35000.0).unwrap(), 0.0, epsilon = 1e-9);
        let half = vec![0.015; g.len()];
        assert_relative_eq!(cases_averted(&g, &half, 0.03, 5.0, 35000.0).unwrap(), 35000.0 * 5.0 * 0.015, max_relative = 1e-12);
        assert_eq!(effectiveness(0.0, 0.03, 5.0, 35000.0).unwrap(), 0.0);
        assert_relative_eq!(20.9 / (5.0 * 974.0), 0.004292, epsilon = 1e-6);
    }

    #[test]
    fn cost_and_ratio() {
        let g = grid();
        let i = vec![0.03; g.len()];
        assert_eq!(total_cost(&ControlSignal::zeros(&g), &i, 1.0, 35000.0).unwrap(), 0.0);
        let c = ControlSignal::constant(&g, 0.5);
        let one = total_cost(&c, &i, 1.0, 35000.0).unwrap();
        assert_relative_eq!(total_cost(&c, &i, 2.0, 35000.0).unwrap(), 2.0 * one);
        assert_eq!(acer(0.0, 3.0).unwrap(), 0.0);
        assert!(matches!(acer(1.0, 0.0), Err(Error::ZeroAverted)));
        assert_relative_eq!(acer(3459.1, 20.9).unwrap(), 165.507, epsilon = 1e-3);
        assert!(matches!(total_cost(&c, &i[1..], 1.0, 1.0), Err(Error::GridMismatch)));
    }

    #[test]
    fn report_identities() {
        let g = grid();
        let i: Vec<f64> = g.nodes().map(|t| 0.03 * (1.0 - 0.1 * (6.0 * t).sin())).collect();
        let c = ControlSignal::new(&g, g.nodes().map(|t| (t / 5.0).min(1.0)).collect()).unwrap();
        let w = CostWeights::hrsv_default();
        let r = evaluate(&c, &i, 0.03, &w, 35000.0).unwrap();
        assert_eq!(r.efficacy[0], 0.0);
        assert_eq!(r.acer.unwrap(), r.total_cost / r.cases_averted);
        assert_eq!(r.effectiveness, r.cases_averted / (35000.0 * 5.0 * 0.03));
        assert!(r.efficacy_min <= r.efficacy_max);
    }
}
