use seirs_control::equilibrium::{endemic_equilibrium_seirs, r0_seirs};
use seirs_control::sensitivity::{
    perturbation_pair, r0_table2_variant, sensitivity_analytic_eq3, sensitivity_analytic_table2, sensitivity_numeric,
    R0Parameter,
};
use seirs_control::{ModelParams, ParamName, TimeGrid};

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn peak(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::MIN, f64::max)
}

#[test]
fn analytic_forms_agree_with_differences_of_their_own_r0() {
    let p = ModelParams::hrsv_seirs(0.0);
    for q in R0Parameter::ALL {
        let a = sensitivity_analytic_eq3(&p, q).value;
        let n = sensitivity_numeric(r0_seirs, &p, q, 1e-5).unwrap().value;
        assert!((a - n).abs() <= 1e-6 * a.abs().max(1e-3), "{q}: {a} vs {n}");
        let a = sensitivity_analytic_table2(&p, q).value;
        let n = sensitivity_numeric(r0_table2_variant, &p, q, 1e-5).unwrap().value;
        assert!((a - n).abs() <= 1e-6 * a.abs().max(1e-3), "{q}: {a} vs {n}");
    }
}

#[test]
fn ten_percent_rise_in_recovery_rate_is_visible() {
    let p = ModelParams::hrsv_seirs(std::f64::consts::FRAC_PI_2);
    let grid = TimeGrid::new(0.0, 5.0, 5000).unwrap();
    let y0 = endemic_equilibrium_seirs(&p).unwrap();
    let pair = perturbation_pair(&p, ParamName::Nu, 1.10, &grid, y0).unwrap();
    let (a, b) = (pair.baseline.component(2), pair.perturbed.component(2));
    let diff = a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    assert!(diff > 0.05 * peak(&a), "max difference {diff}");
    // lower R0, fewer infectives on average
    assert!(mean(&b) < 0.9 * mean(&a));
}

#[test]
fn ten_percent_rise_in_birth_rate_is_invisible() {
    let p = ModelParams::hrsv_seirs(std::f64::consts::FRAC_PI_2);
    let grid = TimeGrid::new(0.0, 5.0, 5000).unwrap();
    let y0 = endemic_equilibrium_seirs(&p).unwrap();
    let pair = perturbation_pair(&p, ParamName::Mu, 1.10, &grid, y0).unwrap();
    let (a, b) = (pair.baseline.component(2), pair.perturbed.component(2));
    let diff = a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    assert!(diff < 1e-3 * peak(&a), "max difference {diff}");
}

#[test]
fn unit_factor_gives_identical_curves() {
    let p = ModelParams::hrsv_seirs(1.0);
    let grid = TimeGrid::new(0.0, 1.0, 1000).unwrap();
    let pair = perturbation_pair(&p, ParamName::Epsilon, 1.0, &grid, endemic_equilibrium_seirs(&p).unwrap()).unwrap();
    assert_eq!(pair.baseline.values, pair.perturbed.values);
}
