//! Efficacy, cases averted, total cost and ACER of the optimal treatment.
//!
//! `cargo run --release --example cost_effectiveness`

use seirs_control::control::{forward_backward_sweep, solve_states, ControlSignal, SweepSettings};
use seirs_control::cost::{evaluate, report_for};
use seirs_control::equilibrium::endemic_equilibrium_seirs;
use seirs_control::{CostWeights, ModelParams, TimeGrid};

fn main() -> Result<(), seirs_control::Error> {
    let p = ModelParams::hrsv_seirs(std::f64::consts::FRAC_PI_2);
    let w = CostWeights::hrsv_default();
    let grid = TimeGrid::new(0.0, w.t_final, 5000)?;
    let y0 = endemic_equilibrium_seirs(&p)?;
    let sol = forward_backward_sweep(&p, &w, y0, &grid, &SweepSettings::default())?;
    let r = report_for(&sol, &p, &w)?;
    println!("treated:   A {:8.2}  TC {:8.1}  ACER {:8.2}  Fbar {:.5}", r.cases_averted, r.total_cost, r.acer.unwrap_or(f64::NAN), r.effectiveness);
    println!("           F in [{:.3}, {:.3}]", r.efficacy_min, r.efficacy_max);

    // same measures on the untreated trajectory, for reference
    let zero = ControlSignal::zeros(&grid);
    let untreated = solve_states(&p, &grid, y0, &zero)?.component(2);
    let u = evaluate(&zero, &untreated, y0.i, &w, p.s)?;
    println!("untreated: A {:8.2}  F in [{:.3}, {:.3}]", u.cases_averted, u.efficacy_min, u.efficacy_max);
    Ok(())
}
