//! Seasonal SEIRS and SIRS runs from their averaged endemic equilibria, printed
//! as monthly case counts.
//!
//! `cargo run --example simulate_seasonal`

use std::f64::consts::PI;

use seirs_control::equilibrium::{r0_seirs, r0_sirs};
use seirs_control::fitting::{equilibrium_for, predict_cases};
use seirs_control::{ModelKind, ModelParams};

fn main() -> Result<(), seirs_control::Error> {
    let phi = 7.0 * PI / 5.0;
    let seirs = ModelParams::hrsv_seirs(phi);
    let sirs = ModelParams::hrsv_sirs(phi);
    println!("R0  SEIRS {:.3}  SIRS {:.3}", r0_seirs(&seirs), r0_sirs(&sirs));

    let months = 35;
    let a = predict_cases(&seirs, ModelKind::Seirs, months, equilibrium_for(ModelKind::Seirs, &seirs)?)?;
    let b = predict_cases(&sirs, ModelKind::Sirs, months, equilibrium_for(ModelKind::Sirs, &sirs)?)?;
    println!("{:>5} {:>9} {:>9}", "month", "SEIRS", "SIRS");
    for k in 0..months {
        println!("{k:>5} {:>9.1} {:>9.1}", a[k], b[k]);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!("mean  {:>9.1} {:>9.1}", mean(&a), mean(&b));
    Ok(())
}
