//! Cross-checks the sweep against Newton multiple shooting on the full
//! state/costate boundary-value problem.
//!
//! `cargo run --release --example shooting_check`

use seirs_control::control::{forward_backward_sweep, SweepSettings};
use seirs_control::equilibrium::endemic_equilibrium_seirs;
use seirs_control::shooting::{solve_bvp_oracle, ShootingSettings};
use seirs_control::{CostWeights, ModelParams, TimeGrid};

fn main() -> Result<(), seirs_control::Error> {
    let p = ModelParams::hrsv_seirs(std::f64::consts::FRAC_PI_2);
    let w = CostWeights::hrsv_default();
    let grid = TimeGrid::new(0.0, w.t_final, 5000)?;
    let y0 = endemic_equilibrium_seirs(&p)?;

    let sweep = forward_backward_sweep(&p, &w, y0, &grid, &SweepSettings::default())?;
    let bvp = solve_bvp_oracle(&p, &w, y0, &grid, &ShootingSettings::default())?;
    let max_dt = sweep
        .control
        .values
        .iter()
        .zip(&bvp.control.values)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    println!("sweep    J = {:.10}", sweep.objective);
    println!("shooting J = {:.10}  ({} Newton steps, residual {:.1e})", bvp.objective, bvp.iterations, bvp.final_change);
    println!("relative J gap {:.2e}, max |dT| {:.2e}", (sweep.objective - bvp.objective).abs() / bvp.objective, max_dt);

    // one segment is plain single shooting; the costates blow up over five years
    let single = solve_bvp_oracle(&p, &w, y0, &grid, &ShootingSettings { segments: 1, ..Default::default() });
    println!("single shooting: {}", single.map(|s| format!("J = {}", s.objective)).unwrap_or_else(|e| e.to_string()));
    Ok(())
}
