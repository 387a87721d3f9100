//! Parameter, state and weight types shared by every solver.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Epidemiological rates and seasonal forcing constants.
///
/// Rates are per year. `b1` and `c1` are relative amplitudes of the cosine
/// forcing of transmission and recruitment; both share the phase `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub mu: f64,
    pub nu: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub b0: f64,
    pub b1: f64,
    pub c1: f64,
    pub phi: f64,
    pub s: f64,
}

impl ModelParams {
    /// SEIRS row of the fitted HRSV parameter set (Florida, 2011-2014).
    /// The phase is left to the caller.
    pub fn hrsv_seirs(phi: f64) -> Self {
        ModelParams {
            mu: 0.0113,
            nu: 36.0,
            gamma: 1.8,
            epsilon: 91.0,
            b0: 88.25,
            b1: 0.17,
            c1: 0.17,
            phi,
            s: 35000.0,
        }
    }

    /// SIRS row of the same fit. `epsilon` has no role in SIRS; it is kept
    /// positive so the struct stays valid.
    pub fn hrsv_sirs(phi: f64) -> Self {
        ModelParams {
            mu: 0.0113,
            nu: 36.0,
            gamma: 1.8,
            epsilon: 91.0,
            b0: 74.2,
            b1: 0.14,
            c1: 0.0,
            phi,
            s: 35000.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for name in ParamName::ALL {
            let v = self.get(name);
            if !v.is_finite() {
                return Err(Error::InvalidParams { name: name.as_str(), reason: format!("{v} is not finite") });
            }
        }
        for name in [ParamName::Mu, ParamName::Nu, ParamName::Gamma, ParamName::Epsilon, ParamName::B0, ParamName::S] {
            if self.get(name) <= 0.0 {
                return Err(Error::InvalidParams { name: name.as_str(), reason: "must be > 0".into() });
            }
        }
        for name in [ParamName::B1, ParamName::C1] {
            let v = self.get(name);
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParams { name: name.as_str(), reason: format!("{v} not in [0, 1]") });
            }
        }
        Ok(())
    }

    pub fn get(&self, name: ParamName) -> f64 {
        match name {
            ParamName::Mu => self.mu,
            ParamName::Nu => self.nu,
            ParamName::Gamma => self.gamma,
            ParamName::Epsilon => self.epsilon,
            ParamName::B0 => self.b0,
            ParamName::B1 => self.b1,
            ParamName::C1 => self.c1,
            ParamName::Phi => self.phi,
            ParamName::S => self.s,
        }
    }

    pub fn set(&mut self, name: ParamName, value: f64) {
        match name {
            ParamName::Mu => self.mu = value,
            ParamName::Nu => self.nu = value,
            ParamName::Gamma => self.gamma = value,
            ParamName::Epsilon => self.epsilon = value,
            ParamName::B0 => self.b0 = value,
            ParamName::B1 => self.b1 = value,
            ParamName::C1 => self.c1 = value,
            ParamName::Phi => self.phi = value,
            ParamName::S => self.s = value,
        }
    }

    pub fn with(mut self, name: ParamName, value: f64) -> Self {
        self.set(name, value);
        self
    }

    /// Parses the flat `key = value` format. Every key must appear exactly once.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut values: [Option<f64>; 9] = [None; 9];
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: line_no, reason: format!("expected `key = value`, got `{line}`") })?;
            let name: ParamName = key
                .trim()
                .parse()
                .map_err(|_| Error::Parse { line: line_no, reason: format!("unknown key `{}`", key.trim()) })?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse { line: line_no, reason: format!("`{}` is not a number", value.trim()) })?;
            let slot = &mut values[name as usize];
            if slot.is_some() {
                return Err(Error::Parse { line: line_no, reason: format!("duplicate key `{name}`") });
            }
            *slot = Some(value);
        }
        let mut params = ModelParams { mu: 0.0, nu: 0.0, gamma: 0.0, epsilon: 0.0, b0: 0.0, b1: 0.0, c1: 0.0, phi: 0.0, s: 0.0 };
        for name in ParamName::ALL {
            let v = values[name as usize].ok_or_else(|| Error::Parse { line: 0, reason: format!("missing key `{name}`") })?;
            params.set(name, v);
        }
        Ok(params)
    }

    pub fn to_kv_string(&self) -> String {
        let mut out = String::new();
        for name in ParamName::ALL {
            out.push_str(&format!("{name} = {:?}\n", self.get(name)));
        }
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_kv_str(&text)
    }
}

/// Names of the [`ModelParams`] fields, in file order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamName {
    Mu,
    Nu,
    Gamma,
    Epsilon,
    B0,
    B1,
    C1,
    Phi,
    S,
}

impl ParamName {
    pub const ALL: [ParamName; 9] = [
        ParamName::Mu,
        ParamName::Nu,
        ParamName::Gamma,
        ParamName::Epsilon,
        ParamName::B0,
        ParamName::B1,
        ParamName::C1,
        ParamName::Phi,
        ParamName::S,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::Mu => "mu",
            ParamName::Nu => "nu",
            ParamName::Gamma => "gamma",
            ParamName::Epsilon => "epsilon",
            ParamName::B0 => "b0",
            ParamName::B1 => "b1",
            ParamName::C1 => "c1",
            ParamName::Phi => "phi",
            ParamName::S => "s",
        }
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParamName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ParamName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::UnknownParameter(s.to_string()))
    }
}

/// Compartment fractions at one instant. SIRS keeps `e` at zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StateVec {
    pub s: f64,
    pub e: f64,
    pub i: f64,
    pub r: f64,
}

impl StateVec {
    pub const fn new(s: f64, e: f64, i: f64, r: f64) -> Self {
        StateVec { s, e, i, r }
    }

    pub fn total(&self) -> f64 {
        self.s + self.e + self.i + self.r
    }

    pub fn scaled(&self, factor: f64) -> Self {
        StateVec::new(self.s * factor, self.e * factor, self.i * factor, self.r * factor)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.s, self.e, self.i, self.r]
    }
}

impl From<[f64; 4]> for StateVec {
    fn from(a: [f64; 4]) -> Self {
        StateVec::new(a[0], a[1], a[2], a[3])
    }
}

impl From<StateVec> for [f64; 4] {
    fn from(v: StateVec) -> Self {
        v.to_array()
    }
}

/// Adjoint variables paired with (S, E, I, R).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostateVec {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
}

impl CostateVec {
    pub const ZERO: CostateVec = CostateVec { p1: 0.0, p2: 0.0, p3: 0.0, p4: 0.0 };

    pub const fn new(p1: f64, p2: f64, p3: f64, p4: f64) -> Self {
        CostateVec { p1, p2, p3, p4 }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.p1, self.p2, self.p3, self.p4]
    }
}

impl From<[f64; 4]> for CostateVec {
    fn from(a: [f64; 4]) -> Self {
        CostateVec::new(a[0], a[1], a[2], a[3])
    }
}

/// Objective weights and control-problem horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    /// Weight on infectious fraction.
    pub kappa1: f64,
    /// Weight on squared treatment.
    pub kappa2: f64,
    /// Unit cost of detecting and treating one infectious individual.
    pub unit_cost: f64,
    pub t_final: f64,
    pub t_max: f64,
}

impl CostWeights {
    /// kappa1 = 1, kappa2 = 0.001, C = 1, five-year horizon, T_max = 1.
    pub fn hrsv_default() -> Self {
        CostWeights { kappa1: 1.0, kappa2: 0.001, unit_cost: 1.0, t_final: 5.0, t_max: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, v: f64, ok: bool| {
            if ok && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParams { name, reason: format!("{v} out of range") })
            }
        };
        // kappa1 = 0 is allowed: it is the degenerate "no incentive to treat" case.
        check("kappa1", self.kappa1, self.kappa1 >= 0.0)?;
        check("kappa2", self.kappa2, self.kappa2 > 0.0)?;
        check("unit_cost", self.unit_cost, self.unit_cost >= 0.0)?;
        check("t_final", self.t_final, self.t_final > 0.0)?;
        check("t_max", self.t_max, self.t_max > 0.0)
    }
}
