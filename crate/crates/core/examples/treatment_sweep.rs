//! Optimal treatment schedule by forward-backward sweep, with a look at the
//! control profile and the uncontrolled comparison.
//!
//! `cargo run --release --example treatment_sweep`

use seirs_control::control::{forward_backward_sweep, objective, solve_states, ControlSignal, SweepSettings};
use seirs_control::equilibrium::endemic_equilibrium_seirs;
use seirs_control::{CostWeights, ModelParams, TimeGrid};

fn main() -> Result<(), seirs_control::Error> {
    let p = ModelParams::hrsv_seirs(std::f64::consts::FRAC_PI_2);
    let w = CostWeights::hrsv_default();
    let grid = TimeGrid::new(0.0, w.t_final, 5000)?;
    let y0 = endemic_equilibrium_seirs(&p)?;

    let sol = forward_backward_sweep(&p, &w, y0, &grid, &SweepSettings::default())?;
    let zero = ControlSignal::zeros(&grid);
    let j0 = objective(&solve_states(&p, &grid, y0, &zero)?, &zero, &w)?;
    println!("J = {:.8} after {} iterations (converged {})", sol.objective, sol.iterations, sol.converged);
    println!("J without treatment = {:.8}", j0);
    println!("stationarity gap {:.2e}", sol.stationarity_gap(&w));

    println!("{:>6} {:>8} {:>10}", "t", "T", "s*I");
    for k in (0..grid.len()).step_by(250) {
        println!("{:>6.2} {:>8.4} {:>10.2}", grid.node(k), sol.control.values[k], p.s * sol.states.values[k][2]);
    }
    Ok(())
}
