//! Monthly case series, model-to-cases mapping and bounded multi-start fitting.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{endemic_equilibrium_seirs, endemic_equilibrium_sirs, r0_seirs, r0_sirs};
use crate::error::{Error, Result};
use crate::integrator::{rk4_forward, TimeGrid, DEFAULT_STEP};
use crate::model::ModelKind;
use crate::nelder_mead::{self, SimplexSettings};
use crate::params::{ModelParams, ParamName, StateVec};

/// Calendar month, `YYYY-MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::Parse { line: 0, reason: format!("month {month} not in 1..=12") });
        }
        Ok(YearMonth { year, month })
    }

    pub fn succ(self) -> Self {
        if self.month == 12 {
            YearMonth { year: self.year + 1, month: 1 }
        } else {
            YearMonth { year: self.year, month: self.month + 1 }
        }
    }

    pub fn plus(self, months: usize) -> Self {
        let idx = self.year as i64 * 12 + (self.month as i64 - 1) + months as i64;
        YearMonth { year: idx.div_euclid(12) as i32, month: idx.rem_euclid(12) as u32 + 1 }
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse { line: 0, reason: format!("`{s}` is not YYYY-MM") };
        let (y, m) = s.trim().split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        YearMonth::new(y.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?)
    }
}

impl TryFrom<String> for YearMonth {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<YearMonth> for String {
    fn from(m: YearMonth) -> String {
        m.to_string()
    }
}

/// Reported cases per consecutive month.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSeries {
    pub start: YearMonth,
    pub counts: Vec<f64>,
}

impl CaseSeries {
    pub fn new(start: YearMonth, counts: Vec<f64>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::Parse { line: 0, reason: format!("need at least 2 months, got {}", counts.len()) });
        }
        for (k, &c) in counts.iter().enumerate() {
            if !(c >= 0.0) || !c.is_finite() {
                return Err(Error::NegativeCount { month: start.plus(k).to_string(), value: c });
            }
        }
        Ok(CaseSeries { start, counts })
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn months(&self) -> impl Iterator<Item = YearMonth> + '_ {
        (0..self.counts.len()).map(|k| self.start.plus(k))
    }

    /// Parses CSV `month,cases`.
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Parse { line: 1, reason: e.to_string() })?.clone();
        if headers.len() != 2 || &headers[0] != "month" || &headers[1] != "cases" {
            return Err(Error::Parse { line: 1, reason: "expected header `month,cases`".into() });
        }
        let mut start: Option<YearMonth> = None;
        let mut prev: Option<YearMonth> = None;
        let mut counts = Vec::new();
        for (idx, record) in rdr.records().enumerate() {
            let line = idx + 2;
            let record = record.map_err(|e| Error::Parse { line, reason: e.to_string() })?;
            if record.len() != 2 {
                return Err(Error::Parse { line, reason: format!("expected 2 fields, got {}", record.len()) });
            }
            let month: YearMonth = record[0].parse().map_err(|e: Error| Error::Parse { line, reason: e.to_string() })?;
            let cases: f64 = record[1]
                .parse()
                .map_err(|_| Error::Parse { line, reason: format!("`{}` is not a number", &record[1]) })?;
            if cases < 0.0 {
                return Err(Error::NegativeCount { month: month.to_string(), value: cases });
            }
            if let Some(p) = prev {
                if p.succ() != month {
                    return Err(Error::Gap { prev: p.to_string(), next: month.to_string() });
                }
            }
            start.get_or_insert(month);
            prev = Some(month);
            counts.push(cases);
        }
        let start = start.ok_or(Error::Parse { line: 1, reason: "no data rows".into() })?;
        CaseSeries::new(start, counts)
    }

    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "month,cases")?;
        for (m, c) in self.months().zip(&self.counts) {
            writeln!(out, "{m},{c}")?;
        }
        Ok(())
    }
}

pub fn load_case_series(path: impl AsRef<Path>) -> Result<CaseSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    CaseSeries::from_csv_reader(file)
}

/// Averaged-system endemic equilibrium for the given model kind.
pub fn equilibrium_for(kind: ModelKind, params: &ModelParams) -> Result<StateVec> {
    match kind {
        ModelKind::Sirs => endemic_equilibrium_sirs(params),
        ModelKind::Seirs => endemic_equilibrium_seirs(params),
    }
}

/// `s · I(k/12)` for `k = 0..n_months`, starting from `y0` at t = 0.
pub fn predict_cases(params: &ModelParams, kind: ModelKind, n_months: usize, y0: StateVec) -> Result<Vec<f64>> {
    predict_cases_from(params, kind, n_months, y0, 0.0)
}

/// As [`predict_cases`], but starts `burn_in` years before the first month.
pub fn predict_cases_from(
    params: &ModelParams,
    kind: ModelKind,
    n_months: usize,
    y0: StateVec,
    burn_in: f64,
) -> Result<Vec<f64>> {
    if n_months == 0 {
        return Ok(Vec::new());
    }
    let t_start = -burn_in.max(0.0);
    let t_end = (n_months.max(2) - 1) as f64 / 12.0;
    let grid = TimeGrid::with_step(t_start, t_end, DEFAULT_STEP)?;
    let traj = rk4_forward(|t, y| kind.rhs(params, t, &StateVec::from(*y)).to_array(), &grid, y0.to_array())?;
    (0..n_months).map(|k| traj.at(k as f64 / 12.0).map(|v| params.s * v[2])).collect()
}

/// `‖pred − empiric‖₂ / ‖empiric‖₂`.
pub fn relative_error(pred: &[f64], empiric: &CaseSeries) -> Result<f64> {
    relative_error_slices(pred, &empiric.counts)
}

pub fn relative_error_slices(pred: &[f64], empiric: &[f64]) -> Result<f64> {
    if pred.len() != empiric.len() {
        return Err(Error::LengthMismatch { left: pred.len(), right: empiric.len() });
    }
    let norm = empiric.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let diff = pred.iter().zip(empiric).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    Ok(diff / norm)
}

/// Noise-free or multiplicatively perturbed monthly series from the model,
/// started at the averaged-system equilibrium.
pub fn synthetic_series(
    params: &ModelParams,
    kind: ModelKind,
    start: YearMonth,
    n_months: usize,
    noise: Option<(f64, u64)>,
) -> Result<CaseSeries> {
    let y0 = equilibrium_for(kind, params)?;
    let mut counts = predict_cases(params, kind, n_months, y0)?;
    if let Some((rel, seed)) = noise {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, rel).map_err(|e| Error::DegenerateValue(e.to_string()))?;
        for c in &mut counts {
            *c = (*c * (1.0 + normal.sample(&mut rng))).max(0.0);
        }
    }
    CaseSeries::new(start, counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub lower: f64,
    pub upper: f64,
}

impl Bound {
    pub const fn new(lower: f64, upper: f64) -> Self {
        Bound { lower, upper }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }
}

/// Default search boxes for the fitted quantities.
pub fn default_bound(name: ParamName) -> Option<Bound> {
    match name {
        ParamName::B0 => Some(Bound::new(10.0, 300.0)),
        ParamName::B1 | ParamName::C1 => Some(Bound::new(0.0, 0.9)),
        ParamName::Phi => Some(Bound::new(0.0, TAU)),
        ParamName::S => Some(Bound::new(1e3, 1e6)),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub restarts: usize,
    /// Offset into the low-discrepancy start sequence.
    pub seed: u64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings { max_iterations: 3000, tolerance: 1e-12, restarts: 8, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSpec {
    pub kind: ModelKind,
    pub free: BTreeMap<ParamName, Bound>,
    pub fixed: BTreeMap<ParamName, f64>,
    pub initial_guess: BTreeMap<ParamName, f64>,
    /// Force `c1 = b1`; `c1` then appears in neither `free` nor `fixed`.
    pub tie_c1_to_b1: bool,
    /// Years of model time run before the first month; `None` starts at equilibrium.
    pub burn_in: Option<f64>,
    pub settings: OptimizerSettings,
}

impl FitSpec {
    /// Frees `free` with their default bounds, fixes every other field at
    /// `base`, and uses `base` as the initial guess.
    pub fn new(kind: ModelKind, base: &ModelParams, free: &[ParamName]) -> Result<Self> {
        let mut spec = FitSpec {
            kind,
            free: BTreeMap::new(),
            fixed: BTreeMap::new(),
            initial_guess: BTreeMap::new(),
            tie_c1_to_b1: false,
            burn_in: None,
            settings: OptimizerSettings::default(),
        };
        for name in ParamName::ALL {
            if free.contains(&name) {
                let bound = default_bound(name)
                    .ok_or_else(|| Error::InvalidSpec(format!("no default bound for `{name}`; supply one")))?;
                spec.free.insert(name, bound);
                spec.initial_guess.insert(name, base.get(name).clamp(bound.lower, bound.upper));
            } else {
                spec.fixed.insert(name, base.get(name));
            }
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for name in ParamName::ALL {
            let tied = self.tie_c1_to_b1 && name == ParamName::C1;
            let count = self.free.contains_key(&name) as usize + self.fixed.contains_key(&name) as usize + tied as usize;
            if count != 1 {
                return Err(Error::InvalidSpec(format!("`{name}` must be exactly one of free/fixed/tied (found {count})")));
            }
        }
        if self.tie_c1_to_b1 && !(self.free.contains_key(&ParamName::B1) || self.fixed.contains_key(&ParamName::B1)) {
            return Err(Error::InvalidSpec("c1 tied to b1 but b1 is undefined".into()));
        }
        for (name, b) in &self.free {
            if !(b.lower < b.upper) || !b.lower.is_finite() || !b.upper.is_finite() {
                return Err(Error::InvalidSpec(format!("bad bounds for `{name}`: [{}, {}]", b.lower, b.upper)));
            }
            match self.initial_guess.get(name) {
                Some(g) if b.contains(*g) => {}
                Some(g) => return Err(Error::InvalidSpec(format!("guess {g} for `{name}` outside bounds"))),
                None => return Err(Error::InvalidSpec(format!("no initial guess for `{name}`"))),
            }
        }
        if self.free.is_empty() {
            return Err(Error::InvalidSpec("no free parameters".into()));
        }
        if self.settings.restarts == 0 || self.settings.max_iterations == 0 {
            return Err(Error::InvalidSpec("restarts and max_iterations must be >= 1".into()));
        }
        Ok(())
    }

    fn assemble(&self, free_values: &[f64]) -> ModelParams {
        let mut p = ModelParams { mu: 0.0, nu: 0.0, gamma: 0.0, epsilon: 0.0, b0: 0.0, b1: 0.0, c1: 0.0, phi: 0.0, s: 0.0 };
        for (name, v) in &self.fixed {
            p.set(*name, *v);
        }
        for (name, v) in self.free.keys().zip(free_values) {
            p.set(*name, *v);
        }
        if self.tie_c1_to_b1 {
            p.c1 = p.b1;
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: ModelParams,
    pub relative_error: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best objective after each simplex iteration of the winning start.
    pub objective_history: Vec<f64>,
    /// Index of the winning start.
    pub best_start: usize,
    /// Final objective of every start, in start order.
    pub start_errors: Vec<f64>,
    /// `2π t_peak`, where `t_peak` is the first local maximum of the data.
    pub phi_offset: f64,
    /// Phase re-expressed so that 0 aligns the cosine peak with the first data peak.
    pub phi_peak_aligned: f64,
}

/// Maps an unconstrained coordinate onto a bounded interval.
#[derive(Debug, Clone, Copy)]
enum Transform {
    /// `lo + (hi − lo)(1 + sin z)/2`.
    Sine { lo: f64, hi: f64 },
    /// Sine transform applied to `ln x`; for strictly positive ranges spanning decades.
    LogSine { lo: f64, hi: f64 },
    /// Wraps onto `[lo, lo + 2π)`.
    Periodic { lo: f64 },
}

impl Transform {
    fn for_param(name: ParamName, b: Bound) -> Self {
        if name == ParamName::Phi && (b.upper - b.lower - TAU).abs() < 1e-9 {
            Transform::Periodic { lo: b.lower }
        } else if b.lower > 0.0 && b.upper / b.lower >= 100.0 {
            Transform::LogSine { lo: b.lower.ln(), hi: b.upper.ln() }
        } else {
            Transform::Sine { lo: b.lower, hi: b.upper }
        }
    }

    fn to_bounded(self, z: f64) -> f64 {
        match self {
            Transform::Sine { lo, hi } => (lo + (hi - lo) * 0.5 * (1.0 + z.sin())).clamp(lo, hi),
            Transform::LogSine { lo, hi } => (lo + (hi - lo) * 0.5 * (1.0 + z.sin())).clamp(lo, hi).exp(),
            Transform::Periodic { lo } => lo + (z - lo).rem_euclid(TAU),
        }
    }

    fn to_free(self, x: f64) -> f64 {
        let unit = |lo: f64, hi: f64, v: f64| (2.0 * (v - lo) / (hi - lo) - 1.0).clamp(-1.0, 1.0).asin();
        match self {
            Transform::Sine { lo, hi } => unit(lo, hi, x),
            Transform::LogSine { lo, hi } => unit(lo, hi, x.ln()),
            Transform::Periodic { .. } => x,
        }
    }
}

/// Radical inverse of `index` in the given base (Halton sequence component).
fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut out = 0.0;
    let mut scale = inv;
    while index > 0 {
        out += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    out
}

const PRIMES: [u64; 9] = [2, 3, 5, 7, 11, 13, 17, 19, 23];

fn objective(spec: &FitSpec, data: &CaseSeries, free_values: &[f64]) -> f64 {
    let params = spec.assemble(free_values);
    let r0 = match spec.kind {
        ModelKind::Sirs => r0_sirs(&params),
        ModelKind::Seirs => r0_seirs(&params),
    };
    let y0 = match equilibrium_for(spec.kind, &params) {
        Ok(y0) => y0,
        // Disease dies out: prediction is identically zero (error 1), plus a slope back toward R0 > 1.
        Err(_) => return 1.0 + (1.0 - r0).max(0.0),
    };
    let pred = match predict_cases_from(&params, spec.kind, data.len(), y0, spec.burn_in.unwrap_or(0.0)) {
        Ok(p) => p,
        Err(_) => return f64::INFINITY,
    };
    relative_error(&pred, data).unwrap_or(f64::INFINITY)
}

/// Minimizes the relative error over the free parameters.
///
/// Start 0 is the initial guess; the remaining starts are Halton points in the
/// box. Each start runs the simplex and is restarted from its own optimum until
/// the objective stops improving. Starts run in parallel; the lowest error wins,
/// ties going to the lowest start index.
pub fn fit(data: &CaseSeries, spec: &FitSpec) -> Result<FitResult> {
    spec.validate()?;
    let names: Vec<ParamName> = spec.free.keys().copied().collect();
    let transforms: Vec<Transform> = spec.free.iter().map(|(n, b)| Transform::for_param(*n, *b)).collect();

    let starts: Vec<Vec<f64>> = (0..spec.settings.restarts)
        .map(|k| {
            if k == 0 {
                names.iter().map(|n| spec.initial_guess[n]).collect()
            } else {
                let idx = spec.settings.seed + k as u64;
                spec.free
                    .values()
                    .enumerate()
                    .map(|(d, b)| b.lower + (b.upper - b.lower) * radical_inverse(idx, PRIMES[d % PRIMES.len()]))
                    .collect()
            }
        })
        .collect();

    let simplex = SimplexSettings {
        max_iterations: spec.settings.max_iterations,
        f_tol: spec.settings.tolerance,
        x_tol: 1e-10,
        initial_step: 0.3,
    };
    let to_bounded = |z: &[f64]| -> Vec<f64> { z.iter().zip(&transforms).map(|(v, t)| t.to_bounded(*v)).collect() };

    let runs: Vec<_> = starts
        .par_iter()
        .map(|x0| {
            let mut z: Vec<f64> = x0.iter().zip(&transforms).map(|(v, t)| t.to_free(*v)).collect();
            let mut history = Vec::new();
            let mut iterations = 0;
            let mut evaluations = 0;
            let mut best = f64::INFINITY;
            let mut converged = false;
            for _round in 0..6 {
                let r = nelder_mead::minimize(|z| objective(spec, data, &to_bounded(z)), &z, &simplex);
                iterations += r.iterations;
                evaluations += r.evaluations;
                history.extend(r.history.iter().map(|v| v.min(best)));
                converged = r.converged;
                let improved = r.f < best - spec.settings.tolerance.max(1e-14) * best.abs().max(1e-300);
                if r.f < best {
                    best = r.f;
                    z = r.x;
                }
                if !improved {
                    break;
                }
            }
            (to_bounded(&z), best, iterations, evaluations, converged, history)
        })
        .collect();

    let start_errors: Vec<f64> = runs.iter().map(|r| r.1).collect();
    let best_start = (0..runs.len()).fold(0, |acc, k| if start_errors[k] < start_errors[acc] { k } else { acc });
    let (x, err, _, _, converged, history) = runs[best_start].clone();
    let mut params = spec.assemble(&x);
    params.phi = params.phi.rem_euclid(TAU);

    let t_peak = first_peak_month(&data.counts) as f64 / 12.0;
    let phi_offset = TAU * t_peak;
    Ok(FitResult {
        params,
        relative_error: err,
        iterations: runs.iter().map(|r| r.2).sum(),
        evaluations: runs.iter().map(|r| r.3).sum(),
        converged,
        objective_history: history,
        best_start,
        start_errors,
        phi_offset,
        phi_peak_aligned: (params.phi + phi_offset).rem_euclid(TAU),
    })
}

/// Index of the first local maximum (first interior point not exceeded by its
/// neighbours), or the global maximum when the series is monotone.
pub fn first_peak_month(counts: &[f64]) -> usize {
    for k in 1..counts.len().saturating_sub(1) {
        if counts[k] >= counts[k - 1] && counts[k] > counts[k + 1] {
            return k;
        }
    }
    (0..counts.len()).fold(0, |acc, k| if counts[k] > counts[acc] { k } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const SERIES: &str = "month,cases\n2011-09,120\n2011-10,340\n2011-11,910\n";

    #[test]
    fn parses_series() {
        let s = CaseSeries::from_csv_reader(SERIES.as_bytes()).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.start, YearMonth::new(2011, 9).unwrap());
        assert_eq!(s.counts, vec![120.0, 340.0, 910.0]);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), SERIES);
    }

    #[test]
    fn series_errors() {
        assert!(matches!(CaseSeries::from_csv_reader("".as_bytes()), Err(Error::Parse { .. })));
        assert!(matches!(CaseSeries::from_csv_reader("month,cases\n".as_bytes()), Err(Error::Parse { .. })));
        let gap = "month,cases\n2011-09,1\n2011-11,2\n";
        assert!(matches!(CaseSeries::from_csv_reader(gap.as_bytes()), Err(Error::Gap { .. })));
        let neg = "month,cases\n2011-09,1\n2011-10,-2\n";
        assert!(matches!(CaseSeries::from_csv_reader(neg.as_bytes()), Err(Error::NegativeCount { .. })));
        let junk = "month,cases\n2011-09,1\n2011-10,many\n";
        assert!(matches!(CaseSeries::from_csv_reader(junk.as_bytes()), Err(Error::Parse { line: 3, .. })));
        let header = "date,count\n2011-09,1\n2011-10,2\n";
        assert!(CaseSeries::from_csv_reader(header.as_bytes()).is_err());
        let month = "month,cases\n2011-13,1\n2012-01,2\n";
        assert!(CaseSeries::from_csv_reader(month.as_bytes()).is_err());
    }

    #[test]
    fn year_rollover() {
        let dec = YearMonth::new(2013, 12).unwrap();
        assert_eq!(dec.succ(), YearMonth::new(2014, 1).unwrap());
        assert_eq!(YearMonth::new(2011, 9).unwrap().plus(34), YearMonth::new(2014, 7).unwrap());
    }

    #[test]
    fn relative_error_cases() {
        let d = CaseSeries::new(YearMonth::new(2011, 9).unwrap(), vec![3.0, 4.0, 0.0]).unwrap();
        assert_eq!(relative_error(&d.counts, &d).unwrap(), 0.0);
        assert_eq!(relative_error(&[6.0, 8.0, 0.0], &d).unwrap(), 1.0);
        assert_eq!(relative_error(&[0.0; 3], &d).unwrap(), 1.0);
        assert!(matches!(relative_error(&[0.0; 2], &d), Err(Error::LengthMismatch { .. })));
        assert!(matches!(relative_error_slices(&[1.0, 1.0], &[0.0, 0.0]), Err(Error::ZeroNorm)));
    }

    #[test]
    fn prediction_scaling() {
        let p = ModelParams::hrsv_seirs(7.0 * PI / 5.0);
        let y0 = endemic_equilibrium_seirs(&p).unwrap();
        let base = predict_cases(&p, ModelKind::Seirs, 12, y0).unwrap();
        let doubled = predict_cases(&p.with(ParamName::S, 2.0 * p.s), ModelKind::Seirs, 12, y0).unwrap();
        for (a, b) in base.iter().zip(&doubled) {
            assert!((2.0 * a - b).abs() <= 1e-12 * b.abs());
        }
        let mut zero = p;
        zero.s = 0.0;
        assert!(predict_cases(&zero, ModelKind::Seirs, 12, y0).unwrap().iter().all(|v| *v == 0.0));
        assert_eq!(base[0], p.s * y0.i);
    }

    #[test]
    fn spec_validation() {
        let p = ModelParams::hrsv_seirs(1.0);
        let free = [ParamName::B0, ParamName::B1, ParamName::C1, ParamName::Phi, ParamName::S];
        let spec = FitSpec::new(ModelKind::Seirs, &p, &free).unwrap();
        spec.validate().unwrap();

        let mut both = spec.clone();
        both.fixed.insert(ParamName::B0, 80.0);
        assert!(matches!(both.validate(), Err(Error::InvalidSpec(_))));

        let mut tied = spec.clone();
        tied.tie_c1_to_b1 = true;
        assert!(tied.validate().is_err());
        tied.free.remove(&ParamName::C1);
        tied.initial_guess.remove(&ParamName::C1);
        tied.validate().unwrap();

        let mut out = spec.clone();
        out.initial_guess.insert(ParamName::B0, 500.0);
        assert!(out.validate().is_err());

        assert!(FitSpec::new(ModelKind::Seirs, &p, &[ParamName::Gamma]).is_err());
    }

    #[test]
    fn transforms_stay_in_bounds() {
        for (name, b) in [
            (ParamName::B0, Bound::new(10.0, 300.0)),
            (ParamName::S, Bound::new(1e3, 1e6)),
            (ParamName::Phi, Bound::new(0.0, TAU)),
        ] {
            let t = Transform::for_param(name, b);
            for z in [-100.0, -3.0, -0.1, 0.0, 0.7, 2.0, 55.5] {
                let x = t.to_bounded(z);
                assert!(x >= b.lower && x <= b.upper, "{name}: {x}");
            }
            let mid = 0.5 * (b.lower + b.upper);
            assert!((t.to_bounded(t.to_free(mid)) - mid).abs() <= 1e-9 * mid);
        }
    }

    #[test]
    fn halton_points_in_unit_interval() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - 7.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn peak_detection() {
        assert_eq!(first_peak_month(&[1.0, 3.0, 2.0, 5.0, 1.0]), 1);
        assert_eq!(first_peak_month(&[1.0, 2.0, 3.0]), 2);
        assert_eq!(first_peak_month(&[3.0, 2.0, 1.0]), 0);
    }

    #[test]
    fn exact_start_converges_immediately() {
        let p = ModelParams::hrsv_seirs(7.0 * PI / 5.0);
        let data = synthetic_series(&p, ModelKind::Seirs, YearMonth::new(2011, 9).unwrap(), 24, None).unwrap();
        let mut spec = FitSpec::new(ModelKind::Seirs, &p, &[ParamName::B0, ParamName::S]).unwrap();
        spec.settings.restarts = 1;
        let r = fit(&data, &spec).unwrap();
        assert!(r.relative_error < 1e-10, "{}", r.relative_error);
        assert!(r.objective_history.windows(2).all(|w| w[1] <= w[0]));
    }
}
