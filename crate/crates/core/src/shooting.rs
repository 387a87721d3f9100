//! Shooting solver for the coupled state/costate boundary-value problem, used
//! as an independent check on the sweep.
//!
//! The control is eliminated through the clamped stationarity formula, giving
//! an 8-dimensional system with states known at `t0` and costates zero at
//! `tf`. Unknowns are the costates at `t0` plus the full 8-vector at each
//! interior segment start; Newton drives continuity defects and the terminal
//! costates to zero. With one segment this is plain single shooting. Forward
//! costate integration grows roughly like `exp((ε + μ) Δt)`, so long horizons
//! need many segments.

use nalgebra::{DMatrix, DVector};

use crate::control::{extremal_control, objective, solve_costates, solve_states, ControlSignal, SweepSolution};
use crate::error::{Error, Result};
use crate::integrator::{rk4_step, TimeGrid, Trajectory};
use crate::model::{adjoint_rhs, controlled_seirs_rhs};
use crate::params::{CostWeights, CostateVec, ModelParams, StateVec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingSettings {
    pub segments: usize,
    /// Max-norm of the full residual (continuity defects and terminal costates) at convergence.
    pub tol: f64,
    pub max_newton: usize,
}

impl Default for ShootingSettings {
    fn default() -> Self {
        ShootingSettings { segments: 100, tol: 1e-10, max_newton: 50 }
    }
}

struct Problem<'a> {
    params: &'a ModelParams,
    weights: &'a CostWeights,
    grid: TimeGrid,
    y0: [f64; 4],
    /// Node index at which each segment starts; last entry is `n_steps`.
    breaks: Vec<usize>,
}

impl Problem<'_> {
    fn rhs(&self, t: f64, z: &[f64; 8]) -> [f64; 8] {
        let y = StateVec::new(z[0], z[1], z[2], z[3]);
        let p = CostateVec::new(z[4], z[5], z[6], z[7]);
        let control = extremal_control(p.p3, p.p4, y.i, self.weights.kappa2, self.weights.t_max);
        let dy = controlled_seirs_rhs(self.params, t, &y, control);
        let dp = adjoint_rhs(self.params, self.weights, t, &y, &p, control);
        [dy.s, dy.e, dy.i, dy.r, dp.p1, dp.p2, dp.p3, dp.p4]
    }

    fn segments(&self) -> usize {
        self.breaks.len() - 1
    }

    fn unknowns(&self) -> usize {
        4 + 8 * (self.segments() - 1)
    }

    fn segment_start(&self, u: &[f64], m: usize) -> [f64; 8] {
        let mut z = [0.0; 8];
        if m == 0 {
            z[..4].copy_from_slice(&self.y0);
            z[4..].copy_from_slice(&u[..4]);
        } else {
            let off = 4 + 8 * (m - 1);
            z.copy_from_slice(&u[off..off + 8]);
        }
        z
    }

    /// Integrates segment `m`, calling `visit(node, value)` for every node after the start.
    fn propagate(&self, m: usize, start: [f64; 8], mut visit: impl FnMut(usize, &[f64; 8])) -> Result<[f64; 8]> {
        let h = self.grid.step();
        let mut rhs = |t: f64, z: &[f64; 8]| self.rhs(t, z);
        let mut z = start;
        for k in self.breaks[m]..self.breaks[m + 1] {
            z = rk4_step(&mut rhs, self.grid.node(k), &z, h);
            if !z.iter().all(|v| v.is_finite()) {
                return Err(Error::NewtonDivergence(format!("non-finite value in segment {m}")));
            }
            visit(k + 1, &z);
        }
        Ok(z)
    }

    fn residual(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.unknowns());
        let last = self.segments() - 1;
        for m in 0..=last {
            let end = self.propagate(m, self.segment_start(u, m), |_, _| {})?;
            if m < last {
                let next = self.segment_start(u, m + 1);
                out.extend((0..8).map(|c| end[c] - next[c]));
            } else {
                out.extend_from_slice(&end[4..]);
            }
        }
        Ok(out)
    }

    fn jacobian(&self, u: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.unknowns();
        let mut jac = DMatrix::<f64>::zeros(n, n);
        let last = self.segments() - 1;
        for m in 0..=last {
            let start = self.segment_start(u, m);
            let (free_first, col0) = if m == 0 { (4, 0) } else { (0, 4 + 8 * (m - 1)) };
            let row0 = 8 * m;
            for (j, c) in (free_first..8).enumerate() {
                let step = 1e-7 * start[c].abs().max(1e-2);
                let mut hi = start;
                let mut lo = start;
                hi[c] += step;
                lo[c] -= step;
                let a = self.propagate(m, hi, |_, _| {})?;
                let b = self.propagate(m, lo, |_, _| {})?;
                let rows: &[usize] = if m < last { &[0, 1, 2, 3, 4, 5, 6, 7] } else { &[4, 5, 6, 7] };
                for (r, &comp) in rows.iter().enumerate() {
                    jac[(row0 + r, col0 + j)] = (a[comp] - b[comp]) / (2.0 * step);
                }
            }
            if m < last {
                let next_col = 4 + 8 * m;
                for c in 0..8 {
                    jac[(row0 + c, next_col + c)] = -1.0;
                }
            }
        }
        Ok(jac)
    }
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Newton multiple shooting on the optimality system.
///
/// The initial guess is the uncontrolled state trajectory and the costates
/// of the uncontrolled problem. Returns [`Error::NewtonDivergence`] when the
/// line search stalls or the iteration limit is hit.
pub fn solve_bvp_oracle(
    params: &ModelParams,
    weights: &CostWeights,
    y0: StateVec,
    grid: &TimeGrid,
    settings: &ShootingSettings,
) -> Result<SweepSolution> {
    params.validate()?;
    weights.validate()?;
    let segments = settings.segments.clamp(1, grid.n_steps);
    let breaks: Vec<usize> = (0..=segments).map(|m| m * grid.n_steps / segments).collect();
    let problem = Problem { params, weights, grid: *grid, y0: y0.to_array(), breaks };

    let zero = ControlSignal::zeros(grid);
    let states = solve_states(params, grid, y0, &zero)?;
    let costates = solve_costates(params, weights, &states, &zero)?;
    let mut u = Vec::with_capacity(problem.unknowns());
    u.extend_from_slice(&costates.values[0]);
    for m in 1..segments {
        let k = problem.breaks[m];
        u.extend_from_slice(&states.values[k]);
        u.extend_from_slice(&costates.values[k]);
    }

    let mut res = problem.residual(&u)?;
    let mut norm = max_norm(&res);
    let mut iterations = 0;
    while norm > settings.tol {
        if iterations == settings.max_newton {
            return Err(Error::NewtonDivergence(format!("residual {norm:e} after {iterations} iterations")));
        }
        iterations += 1;
        let jac = problem.jacobian(&u)?;
        let rhs = DVector::from_iterator(res.len(), res.iter().map(|v| -v));
        let step = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::NewtonDivergence("singular shooting Jacobian".into()))?;

        let mut damping = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, d)| a + damping * d).collect();
            if let Ok(trial_res) = problem.residual(&trial) {
                let trial_norm = max_norm(&trial_res);
                if trial_norm < (1.0 - 1e-4 * damping) * norm {
                    u = trial;
                    res = trial_res;
                    norm = trial_norm;
                    break;
                }
            }
            damping *= 0.5;
            if damping < 1e-6 {
                return Err(Error::NewtonDivergence(format!("line search stalled at residual {norm:e}")));
            }
        }
    }

    let mut values = vec![[0.0; 8]; grid.len()];
    for m in 0..segments {
        let start = problem.segment_start(&u, m);
        values[problem.breaks[m]] = start;
        problem.propagate(m, start, |k, z| values[k] = *z)?;
    }
    let state_values: Vec<[f64; 4]> = values.iter().map(|z| [z[0], z[1], z[2], z[3]]).collect();
    let costate_values: Vec<[f64; 4]> = values.iter().map(|z| [z[4], z[5], z[6], z[7]]).collect();
    let control_values: Vec<f64> = values
        .iter()
        .map(|z| extremal_control(z[6], z[7], z[2], weights.kappa2, weights.t_max))
        .collect();
    let states = Trajectory { grid: *grid, values: state_values };
    let control = ControlSignal::new(grid, control_values)?;
    let objective = objective(&states, &control, weights)?;
    Ok(SweepSolution {
        states,
        costates: Trajectory { grid: *grid, values: costate_values },
        control,
        objective,
        iterations,
        converged: true,
        final_change: norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::endemic_equilibrium_seirs;

    #[test]
    fn zero_state_weight_gives_zero_control() {
        let p = ModelParams::hrsv_seirs(std::f64::consts::FRAC_PI_2);
        let w = CostWeights { kappa1: 0.0, t_final: 1.0, ..CostWeights::hrsv_default() };
        let y0 = endemic_equilibrium_seirs(&p).unwrap();
        let g = TimeGrid::new(0.0, 1.0, 1000).unwrap();
        let sol = solve_bvp_oracle(&p, &w, y0, &g, &ShootingSettings { segments: 20, ..Default::default() }).unwrap();
        assert!(sol.control.values.iter().all(|v| *v == 0.0));
        assert_eq!(sol.objective, 0.0);
    }

    #[test]
    fn short_horizon_residual_converges() {
        let p = ModelParams::hrsv_seirs(std::f64::consts::FRAC_PI_2);
        let w = CostWeights { t_final: 0.5, ..CostWeights::hrsv_default() };
        let y0 = endemic_equilibrium_seirs(&p).unwrap();
        let g = TimeGrid::new(0.0, 0.5, 500).unwrap();
        let sol = solve_bvp_oracle(&p, &w, y0, &g, &ShootingSettings { segments: 10, ..Default::default() }).unwrap();
        assert!(sol.final_change < 1e-10);
        assert!(sol.costates.last().iter().all(|v| v.abs() < 1e-8));
        sol.control.check_admissible(w.t_max).unwrap();
    }
}
