//! Recovers seasonal parameters from a noisy synthetic monthly series by
//! multi-start bounded simplex search, then compares SEIRS against SIRS.
//!
//! `cargo run --release --example fit_synthetic`

use std::f64::consts::PI;

use seirs_control::fitting::{fit, synthetic_series, FitSpec, YearMonth};
use seirs_control::{ModelKind, ModelParams, ParamName};

fn main() -> Result<(), seirs_control::Error> {
    let truth = ModelParams::hrsv_seirs(7.0 * PI / 5.0);
    let data = synthetic_series(&truth, ModelKind::Seirs, YearMonth::new(2011, 9)?, 35, Some((0.02, 7)))?;

    let guess = truth
        .with(ParamName::B0, 120.0)
        .with(ParamName::B1, 0.4)
        .with(ParamName::C1, 0.4)
        .with(ParamName::Phi, 1.0)
        .with(ParamName::S, 1e4);
    let free = [ParamName::B0, ParamName::B1, ParamName::C1, ParamName::Phi, ParamName::S];
    let seirs = fit(&data, &FitSpec::new(ModelKind::Seirs, &guess, &free)?)?;
    println!("SEIRS  error {:.4}  start {}", seirs.relative_error, seirs.best_start);
    for name in free {
        println!("  {name:>4} fitted {:>12.5} true {:>12.5}", seirs.params.get(name), truth.get(name));
    }

    // c1 is weakly identified; tying it to b1 removes a free direction.
    let mut tied = FitSpec::new(ModelKind::Seirs, &guess, &[ParamName::B0, ParamName::B1, ParamName::Phi, ParamName::S])?;
    tied.fixed.remove(&ParamName::C1);
    tied.tie_c1_to_b1 = true;
    let tied = fit(&data, &tied)?;
    println!("SEIRS c1=b1  error {:.4}", tied.relative_error);

    let sirs_guess = ModelParams::hrsv_sirs(1.0).with(ParamName::S, 1e4);
    let sirs = fit(&data, &FitSpec::new(ModelKind::Sirs, &sirs_guess, &[ParamName::B0, ParamName::B1, ParamName::Phi, ParamName::S])?)?;
    println!("SIRS   error {:.4}  b0 {:.2} b1 {:.3}", sirs.relative_error, sirs.params.b0, sirs.params.b1);
    Ok(())
}
