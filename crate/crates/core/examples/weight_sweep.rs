//! Solves the treatment problem over a grid of state weights in parallel and
//! compares the resulting schedules.
//!
//! `cargo run --release --example weight_sweep`

use rayon::prelude::*;
use seirs_control::control::{forward_backward_sweep, SweepSettings};
use seirs_control::cost::report_for;
use seirs_control::equilibrium::endemic_equilibrium_seirs;
use seirs_control::{CostWeights, ModelParams, TimeGrid};

fn main() -> Result<(), seirs_control::Error> {
    let p = ModelParams::hrsv_seirs(std::f64::consts::FRAC_PI_2);
    let y0 = endemic_equilibrium_seirs(&p)?;
    let kappas = [0.1, 1.0, 10.0];
    let runs: Vec<_> = kappas
        .par_iter()
        .map(|&k1| {
            let w = CostWeights { kappa1: k1, ..CostWeights::hrsv_default() };
            let grid = TimeGrid::new(0.0, w.t_final, 5000)?;
            let sol = forward_backward_sweep(&p, &w, y0, &grid, &SweepSettings::default())?;
            let report = report_for(&sol, &p, &w)?;
            Ok((k1, sol, report))
        })
        .collect::<Result<_, seirs_control::Error>>()?;

    println!("{:>6} {:>10} {:>6} {:>8} {:>8} {:>10}", "kappa1", "J", "iters", "mean T", "F max", "peak s*I");
    for (k1, sol, r) in &runs {
        let mean_t = sol.control.values.iter().sum::<f64>() / sol.control.values.len() as f64;
        let peak = sol.infectious().into_iter().fold(f64::MIN, f64::max) * p.s;
        println!("{k1:>6} {:>10.6} {:>6} {mean_t:>8.4} {:>8.4} {peak:>10.2}", sol.objective, sol.iterations, r.efficacy_max);
    }
    Ok(())
}
