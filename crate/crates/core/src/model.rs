//! Right-hand sides of the seasonal SIRS/SEIRS systems, the treatment-controlled
//! SEIRS system and its adjoint.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::params::{CostWeights, CostateVec, ModelParams, StateVec};

/// Seasonal transmission rate `b0 (1 + b1 cos(2πt + φ))`.
#[inline]
pub fn beta_at(params: &ModelParams, t: f64) -> f64 {
    params.b0 * (1.0 + params.b1 * (TAU * t + params.phi).cos())
}

/// Seasonal recruitment rate `μ (1 + c1 cos(2πt + φ))`.
#[inline]
pub fn lambda_at(params: &ModelParams, t: f64) -> f64 {
    params.mu * (1.0 + params.c1 * (TAU * t + params.phi).cos())
}

/// SIRS with constant recruitment μ. The E slot is ignored and its derivative is 0.
pub fn sirs_rhs(params: &ModelParams, t: f64, y: &StateVec) -> StateVec {
    let ModelParams { mu, nu, gamma, .. } = *params;
    let infection = beta_at(params, t) * y.s * y.i;
    StateVec {
        s: mu - mu * y.s - infection + gamma * y.r,
        e: 0.0,
        i: infection - nu * y.i - mu * y.i,
        r: nu * y.i - mu * y.r - gamma * y.r,
    }
}

pub fn seirs_rhs(params: &ModelParams, t: f64, y: &StateVec) -> StateVec {
    controlled_seirs_rhs(params, t, y, 0.0)
}

/// SEIRS with treatment `control` moving infectious individuals to R at rate `control`.
pub fn controlled_seirs_rhs(params: &ModelParams, t: f64, y: &StateVec, control: f64) -> StateVec {
    let ModelParams { mu, nu, gamma, epsilon, .. } = *params;
    let infection = beta_at(params, t) * y.s * y.i;
    let treated = control * y.i;
    StateVec {
        s: lambda_at(params, t) - mu * y.s - infection + gamma * y.r,
        e: infection - (mu + epsilon) * y.e,
        i: epsilon * y.e - (mu + nu) * y.i - treated,
        r: nu * y.i - (mu + gamma) * y.r + treated,
    }
}

/// Costate derivatives `-∂H/∂(S, E, I, R)` for the treatment problem.
pub fn adjoint_rhs(
    params: &ModelParams,
    weights: &CostWeights,
    t: f64,
    y: &StateVec,
    p: &CostateVec,
    control: f64,
) -> CostateVec {
    let ModelParams { mu, nu, gamma, epsilon, .. } = *params;
    let beta = beta_at(params, t);
    CostateVec {
        p1: p.p1 * (mu + beta * y.i) - beta * y.i * p.p2,
        p2: p.p2 * (mu + epsilon) - epsilon * p.p3,
        p3: -weights.kappa1 + beta * p.p1 * y.s - p.p2 * beta * y.s + p.p3 * (mu + nu + control)
            - p.p4 * (nu + control),
        p4: -gamma * p.p1 + p.p4 * (mu + gamma),
    }
}

/// Hamiltonian `κ1 I + κ2 T² + p · f(t, y, T)`. Only used to check [`adjoint_rhs`].
pub fn hamiltonian(
    params: &ModelParams,
    weights: &CostWeights,
    t: f64,
    y: &StateVec,
    p: &CostateVec,
    control: f64,
) -> f64 {
    let f = controlled_seirs_rhs(params, t, y, control);
    weights.kappa1 * y.i
        + weights.kappa2 * control * control
        + p.p1 * f.s
        + p.p2 * f.e
        + p.p3 * f.i
        + p.p4 * f.r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Sirs,
    Seirs,
}

impl ModelKind {
    pub fn rhs(self, params: &ModelParams, t: f64, y: &StateVec) -> StateVec {
        match self {
            ModelKind::Sirs => sirs_rhs(params, t, y),
            ModelKind::Seirs => seirs_rhs(params, t, y),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Sirs => "sirs",
            ModelKind::Seirs => "seirs",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "sirs" => Ok(ModelKind::Sirs),
            "seirs" => Ok(ModelKind::Seirs),
            other => Err(Error::Config(format!("unknown model kind `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn table1(phi: f64) -> ModelParams {
        ModelParams::hrsv_seirs(phi)
    }

    #[test]
    fn beta_values() {
        let p = table1(PI / 2.0);
        assert_relative_eq!(beta_at(&p, 0.0), 88.25, epsilon = 1e-12);
        assert_relative_eq!(beta_at(&p, 0.75), 103.2525, epsilon = 1e-10);
        let flat = ModelParams { b1: 0.0, ..p };
        for t in [0.0, 0.1, 0.37, 2.9] {
            assert_eq!(beta_at(&flat, t), 88.25);
        }
    }

    #[test]
    fn lambda_values() {
        let p = table1(PI / 2.0);
        assert_relative_eq!(lambda_at(&p, 0.0), 0.0113, epsilon = 1e-15);
        let flat = ModelParams { c1: 0.0, ..p };
        assert_eq!(lambda_at(&flat, 0.42), 0.0113);
        // cos(252°) = -(√5 - 1)/4
        let q = table1(7.0 * PI / 5.0);
        assert_relative_eq!(lambda_at(&q, 0.0), 0.0113 * (1.0 - 0.17 * 0.309_016_994_374_947_45), max_relative = 1e-14);
    }

    #[test]
    fn sirs_values() {
        let p = ModelParams::hrsv_sirs(0.0);
        let d = sirs_rhs(&p, 0.3, &StateVec::new(1.0, 0.0, 0.0, 0.0));
        assert_eq!(d, StateVec::default());

        // β(t) = 80 exactly when b0 = 80, b1 = 0.
        let q = ModelParams { b0: 80.0, b1: 0.0, ..p };
        let d = sirs_rhs(&q, 0.0, &StateVec::new(0.5, 0.0, 0.5, 0.0));
        assert_relative_eq!(d.i, 1.99435, epsilon = 1e-12);

        let y = StateVec::new(0.3, 0.0, 0.2, 0.5);
        let d = sirs_rhs(&p, 0.7, &y);
        assert!(d.total().abs() < 1e-13);
    }

    #[test]
    fn seirs_table1_point() {
        // Reference evaluated by hand from the four formulas at t = 0, Φ = π/2:
        // β = 88.25, λ = 0.0113.
        let p = table1(PI / 2.0);
        let y = StateVec::new(0.408, 0.011, 0.0278, 0.553);
        let d = seirs_rhs(&p, 0.0, &y);
        let inf = 88.25 * 0.408 * 0.0278;
        assert_relative_eq!(d.s, 0.0113 - 0.0113 * 0.408 - inf + 1.8 * 0.553, epsilon = 1e-12);
        assert_relative_eq!(d.e, inf - 91.0113 * 0.011, epsilon = 1e-12);
        assert_relative_eq!(d.i, 91.0 * 0.011 - 36.0113 * 0.0278, epsilon = 1e-12);
        assert_relative_eq!(d.r, 36.0 * 0.0278 - 1.8113 * 0.553, epsilon = 1e-12);
        // exact rational evaluation
        let exact = [0.0011228, -0.0001575, -0.00011414, -0.0008489];
        for (got, want) in d.to_array().iter().zip(exact) {
            assert_relative_eq!(*got, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn control_terms() {
        let p = table1(1.0);
        let y = StateVec::new(0.4, 0.01, 0.03, 0.56);
        assert_eq!(controlled_seirs_rhs(&p, 0.2, &y, 0.0), seirs_rhs(&p, 0.2, &y));
        let a = controlled_seirs_rhs(&p, 0.2, &y, 0.8);
        let b = seirs_rhs(&p, 0.2, &y);
        assert_relative_eq!(a.i, b.i - 0.8 * 0.03, epsilon = 1e-14);
        assert_relative_eq!(a.r, b.r + 0.8 * 0.03, epsilon = 1e-14);
        let no_inf = StateVec { i: 0.0, ..y };
        assert_eq!(controlled_seirs_rhs(&p, 0.2, &no_inf, 0.9), seirs_rhs(&p, 0.2, &no_inf));
    }

    #[test]
    fn adjoint_special_cases() {
        let p = table1(PI / 2.0);
        let w = CostWeights::hrsv_default();
        let y = StateVec::new(0.4, 0.01, 0.03, 0.56);
        let d = adjoint_rhs(&p, &w, 0.3, &y, &CostateVec::ZERO, 0.5);
        assert_eq!(d.to_array(), [0.0, 0.0, -1.0, 0.0]);

        let costate = CostateVec::new(0.2, -0.1, 0.05, 0.3);
        let y0 = StateVec::new(0.0, 0.01, 0.0, 0.56);
        let d = adjoint_rhs(&p, &w, 0.3, &y0, &costate, 0.5);
        assert_relative_eq!(d.p1, p.mu * 0.2, epsilon = 1e-15);
        assert_relative_eq!(d.p4, -p.gamma * 0.2 + 0.3 * (p.mu + p.gamma), epsilon = 1e-15);
    }

    fn central_gradient(p: &ModelParams, w: &CostWeights, t: f64, y: &StateVec, q: &CostateVec, u: f64) -> [f64; 4] {
        let step = 1e-6;
        let mut g = [0.0; 4];
        for (k, slot) in g.iter_mut().enumerate() {
            let mut hi = y.to_array();
            let mut lo = y.to_array();
            hi[k] += step;
            lo[k] -= step;
            *slot = (hamiltonian(p, w, t, &hi.into(), q, u) - hamiltonian(p, w, t, &lo.into(), q, u)) / (2.0 * step);
        }
        g
    }

    proptest! {
        #[test]
        fn forcing_is_one_periodic(t in -10.0f64..10.0, phi in 0.0f64..6.283) {
            let p = table1(phi);
            prop_assert!((beta_at(&p, t) - beta_at(&p, t + 1.0)).abs() <= 1e-12 * p.b0);
            prop_assert!((lambda_at(&p, t) - lambda_at(&p, t + 1.0)).abs() <= 1e-12 * p.mu);
        }

        #[test]
        fn seirs_sum_identity(
            t in 0.0f64..5.0, s in 0.0f64..1.0, e in 0.0f64..0.1, i in 0.0f64..0.1, r in 0.0f64..1.0, u in 0.0f64..1.0,
        ) {
            let p = table1(7.0 * PI / 5.0);
            let y = StateVec::new(s, e, i, r);
            let d = controlled_seirs_rhs(&p, t, &y, u);
            let expected = lambda_at(&p, t) - p.mu * y.total();
            prop_assert!((d.total() - expected).abs() <= 1e-12 * (1.0 + beta_at(&p, t)));
        }

        #[test]
        fn adjoint_is_minus_hamiltonian_gradient(
            t in 0.0f64..5.0,
            s in 0.05f64..1.0, e in 0.001f64..0.1, i in 0.001f64..0.1, r in 0.05f64..1.0,
            p1 in -1.0f64..1.0, p2 in -1.0f64..1.0, p3 in -1.0f64..1.0, p4 in -1.0f64..1.0,
            u in 0.0f64..1.0,
        ) {
            let p = table1(PI / 2.0);
            let w = CostWeights::hrsv_default();
            let y = StateVec::new(s, e, i, r);
            let q = CostateVec::new(p1, p2, p3, p4);
            let grad = central_gradient(&p, &w, t, &y, &q, u);
            let d = adjoint_rhs(&p, &w, t, &y, &q, u).to_array();
            for k in 0..4 {
                let scale = d[k].abs().max(1.0);
                prop_assert!((d[k] + grad[k]).abs() <= 1e-6 * scale, "component {k}: {} vs {}", d[k], -grad[k]);
            }
        }
    }
}
