//! Reproduction numbers and the endemic equilibrium of the season-averaged system.

use crate::error::{Error, Result};
use crate::params::{ModelParams, StateVec};

/// `b0 / (ν + μ)`.
pub fn r0_sirs(params: &ModelParams) -> f64 {
    params.b0 / (params.nu + params.mu)
}

/// `b0 ε / ((μ + ν)(ε + μ))`, with transmission at its seasonal mean.
pub fn r0_seirs(params: &ModelParams) -> f64 {
    params.b0 * params.epsilon / ((params.mu + params.nu) * (params.epsilon + params.mu))
}

/// Stationary point of SEIRS with β ≡ b0 and λ ≡ μ.
///
/// The periodic system has no fixed point; the averaged one is used as the
/// pre-treatment initial condition.
pub fn endemic_equilibrium_seirs(params: &ModelParams) -> Result<StateVec> {
    let r0 = r0_seirs(params);
    if !(r0 > 1.0) {
        return Err(Error::NoEndemicEquilibrium { r0 });
    }
    let ModelParams { mu, nu, gamma, epsilon, .. } = *params;
    let s = 1.0 / r0;
    let i = (1.0 - s) / (1.0 + (mu + nu) / epsilon + nu / (mu + gamma));
    Ok(StateVec { s, e: (mu + nu) * i / epsilon, i, r: nu * i / (mu + gamma) })
}

/// SIRS counterpart of [`endemic_equilibrium_seirs`]; `e` is 0.
pub fn endemic_equilibrium_sirs(params: &ModelParams) -> Result<StateVec> {
    let r0 = r0_sirs(params);
    if !(r0 > 1.0) {
        return Err(Error::NoEndemicEquilibrium { r0 });
    }
    let ModelParams { mu, nu, gamma, .. } = *params;
    let s = 1.0 / r0;
    let i = (1.0 - s) / (1.0 + nu / (mu + gamma));
    Ok(StateVec { s, e: 0.0, i, r: nu * i / (mu + gamma) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{seirs_rhs, sirs_rhs};
    use crate::params::ParamName;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn table1_reproduction_numbers() {
        let sirs = ModelParams::hrsv_sirs(0.0);
        assert!((r0_sirs(&sirs) - 2.06).abs() < 0.01);
        assert_relative_eq!(r0_sirs(&sirs), 74.2 / 36.0113, epsilon = 1e-14);
        let seirs = ModelParams::hrsv_seirs(0.0);
        assert!((r0_seirs(&seirs) - 2.45).abs() < 0.01);
        assert_relative_eq!(r0_seirs(&seirs), 88.25 * 91.0 / (36.0113 * 91.0113), epsilon = 1e-14);
    }

    #[test]
    fn thresholds_and_limits() {
        let p = ModelParams::hrsv_seirs(0.0);
        assert_relative_eq!(r0_sirs(&p.with(ParamName::B0, p.nu + p.mu)), 1.0, epsilon = 1e-15);
        assert_relative_eq!(r0_sirs(&p.with(ParamName::B0, 2.0 * p.b0)), 2.0 * r0_sirs(&p), epsilon = 1e-14);
        let b_crit = (p.mu + p.nu) * (p.epsilon + p.mu) / p.epsilon;
        assert_relative_eq!(r0_seirs(&p.with(ParamName::B0, b_crit)), 1.0, epsilon = 1e-14);
        let fast = p.with(ParamName::Epsilon, 1e12);
        assert_relative_eq!(r0_seirs(&fast), r0_sirs(&p), max_relative = 1e-10);
    }

    #[test]
    fn table3_initial_conditions() {
        let eq = endemic_equilibrium_seirs(&ModelParams::hrsv_seirs(std::f64::consts::FRAC_PI_2)).unwrap();
        let scaled = eq.scaled(35000.0).to_array();
        for (got, want) in scaled.iter().zip([14284.0, 385.0, 974.0, 19357.0]) {
            assert!((got - want).abs() <= 1.0, "{got} vs {want}");
        }
        assert_relative_eq!(eq.s, 0.40812, max_relative = 1e-4);
        assert_relative_eq!(eq.e, 0.011012, max_relative = 1e-4);
        assert_relative_eq!(eq.i, 0.027825, max_relative = 1e-4);
        assert_relative_eq!(eq.r, 0.553047, max_relative = 1e-5);
    }

    #[test]
    fn subcritical_has_no_equilibrium() {
        let p = ModelParams::hrsv_seirs(0.0).with(ParamName::B0, 20.0);
        assert!(matches!(endemic_equilibrium_seirs(&p), Err(Error::NoEndemicEquilibrium { .. })));
        assert!(matches!(endemic_equilibrium_sirs(&p), Err(Error::NoEndemicEquilibrium { .. })));
    }

    #[test]
    fn sirs_equilibrium_is_stationary() {
        let p = ModelParams::hrsv_sirs(0.0).with(ParamName::B1, 0.0);
        let eq = endemic_equilibrium_sirs(&p).unwrap();
        let d = sirs_rhs(&p, 0.3, &eq);
        assert!(d.to_array().iter().all(|v| v.abs() < 1e-12));
        assert_relative_eq!(eq.total(), 1.0, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn equilibrium_identities(
            mu in 0.001f64..0.1, nu in 1.0f64..60.0, gamma in 0.1f64..5.0, epsilon in 5.0f64..200.0, r0 in 1.05f64..6.0,
            t in 0.0f64..3.0,
        ) {
            let mut p = ModelParams { mu, nu, gamma, epsilon, b0: 1.0, b1: 0.0, c1: 0.0, phi: 0.3, s: 1.0 };
            p.b0 = r0 * (mu + nu) * (epsilon + mu) / epsilon;
            let eq = endemic_equilibrium_seirs(&p).unwrap();
            prop_assert!((eq.s * r0_seirs(&p) - 1.0).abs() < 1e-14);
            prop_assert!((eq.total() - 1.0).abs() < 1e-12);
            let d = seirs_rhs(&p, t, &eq);
            for v in d.to_array() {
                prop_assert!(v.abs() < 1e-12 * (1.0 + p.b0), "residual {v}");
            }
        }
    }
}
