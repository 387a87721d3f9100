//! Normalized forward sensitivity of R0 to each of its parameters, analytic
//! and by central differences, plus the effect of a 10% rise on the infectious
//! curve.
//!
//! `cargo run --example r0_sensitivity`

use seirs_control::equilibrium::{endemic_equilibrium_seirs, r0_seirs};
use seirs_control::sensitivity::{
    perturbation_pair, r0_table2_variant, sensitivity_analytic_eq3, sensitivity_analytic_table2, sensitivity_numeric,
    R0Parameter, DEFAULT_REL_STEP,
};
use seirs_control::{ModelParams, ParamName, TimeGrid};

fn main() -> Result<(), seirs_control::Error> {
    let p = ModelParams::hrsv_seirs(std::f64::consts::FRAC_PI_2);
    println!("R0 = {:.4}   (alternate form {:.4})", r0_seirs(&p), r0_table2_variant(&p));
    println!("{:>8} {:>12} {:>12} {:>12}", "param", "analytic", "numeric", "alt form");
    for q in R0Parameter::ALL {
        let a = sensitivity_analytic_eq3(&p, q).value;
        let n = sensitivity_numeric(r0_seirs, &p, q, DEFAULT_REL_STEP)?.value;
        let t = sensitivity_analytic_table2(&p, q).value;
        println!("{:>8} {a:>12.6} {n:>12.6} {t:>12.6}", q.to_string());
    }

    let grid = TimeGrid::new(0.0, 5.0, 5000)?;
    let y0 = endemic_equilibrium_seirs(&p)?;
    for field in [ParamName::Nu, ParamName::Mu] {
        let pair = perturbation_pair(&p, field, 1.10, &grid, y0)?;
        let peak = |v: Vec<f64>| v.into_iter().fold(f64::MIN, f64::max);
        println!(
            "{field} +10%: peak I {:.5} -> {:.5}",
            peak(pair.baseline.component(2)),
            peak(pair.perturbed.component(2))
        );
    }
    Ok(())
}
