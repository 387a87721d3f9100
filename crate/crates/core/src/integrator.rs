//! Fixed-step classical RK4 on a uniform grid, forward and backward in time.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default step: 1/1000 year.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Uniform grid `t0 + k h`, `k = 0..=n_steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub tf: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, tf: f64, n_steps: usize) -> Result<Self> {
        if !(t0.is_finite() && tf.is_finite()) || tf <= t0 {
            return Err(Error::InvalidGrid(format!("need t0 < tf, got [{t0}, {tf}]")));
        }
        if n_steps == 0 {
            return Err(Error::InvalidGrid("n_steps must be >= 1".into()));
        }
        Ok(TimeGrid { t0, tf, n_steps })
    }

    /// Grid on `[t0, tf]` whose step is as close as possible to, and not above, `h`.
    pub fn with_step(t0: f64, tf: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidGrid(format!("step {h} must be positive")));
        }
        let n = ((tf - t0) / h - 1e-9).ceil().max(1.0) as usize;
        Self::new(t0, tf, n)
    }

    pub fn step(&self) -> f64 {
        (self.tf - self.t0) / self.n_steps as f64
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.tf
        } else {
            self.t0 + k as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n_steps).map(move |k| self.node(k))
    }

    /// Composite trapezoid weight of node `k`.
    pub fn trapezoid_weight(&self, k: usize) -> f64 {
        if k == 0 || k == self.n_steps {
            0.5 * self.step()
        } else {
            self.step()
        }
    }

    pub fn trapezoid(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.len() {
            return Err(Error::GridMismatch);
        }
        let inner: f64 = values[1..self.n_steps].iter().sum();
        Ok(self.step() * (inner + 0.5 * (values[0] + values[self.n_steps])))
    }

    /// Interval index and fraction for linear interpolation at `t`.
    pub(crate) fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let h = self.step();
        let slack = 1e-9 * h;
        if !(t >= self.t0 - slack && t <= self.tf + slack) {
            return Err(Error::OutOfRange { t, t0: self.t0, tf: self.tf });
        }
        let x = ((t - self.t0) / h).clamp(0.0, self.n_steps as f64);
        let k = (x.floor() as usize).min(self.n_steps - 1);
        Ok((k, x - k as f64))
    }
}

/// Node values on a [`TimeGrid`]. `D` is the system dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const D: usize = 4> {
    pub grid: TimeGrid,
    pub values: Vec<[f64; D]>,
}

impl<const D: usize> Trajectory<D> {
    pub fn first(&self) -> [f64; D] {
        self.values[0]
    }

    pub fn last(&self) -> [f64; D] {
        self.values[self.values.len() - 1]
    }

    pub fn component(&self, c: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[c]).collect()
    }

    /// Linear interpolation between adjacent nodes.
    pub fn at(&self, t: f64) -> Result<[f64; D]> {
        let (k, frac) = self.grid.locate(t)?;
        Ok(lerp(&self.values[k], &self.values[k + 1], frac))
    }

    /// Linear interpolation at each requested time; exact at nodes.
    pub fn sample(&self, times: &[f64]) -> Result<Vec<[f64; D]>> {
        times.iter().map(|&t| self.at(t)).collect()
    }

    /// CSV with the given column names after `t`, one row per node.
    pub fn write_csv<W: Write>(&self, mut out: W, columns: [&str; D]) -> std::io::Result<()> {
        writeln!(out, "t,{}", columns.join(","))?;
        for (t, row) in self.grid.nodes().zip(&self.values) {
            write!(out, "{t}")?;
            for v in row {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Reads the layout written by [`Trajectory::write_csv`]. The time column
    /// must be uniformly spaced.
    pub fn read_csv<R: std::io::Read>(reader: R, columns: [&str; D]) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Parse { line: 1, reason: e.to_string() })?.clone();
        let expected: Vec<&str> = std::iter::once("t").chain(columns).collect();
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Parse { line: 1, reason: format!("expected header `{}`", expected.join(",")) });
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (idx, record) in rdr.records().enumerate() {
            let line = idx + 2;
            let record = record.map_err(|e| Error::Parse { line, reason: e.to_string() })?;
            let mut fields = record.iter().map(|f| {
                f.trim().parse::<f64>().map_err(|_| Error::Parse { line, reason: format!("`{f}` is not a number") })
            });
            times.push(fields.next().ok_or(Error::Parse { line, reason: "empty row".into() })??);
            let mut row = [0.0; D];
            for slot in row.iter_mut() {
                *slot = fields.next().ok_or(Error::Parse { line, reason: "short row".into() })??;
            }
            values.push(row);
        }
        if times.len() < 2 {
            return Err(Error::Parse { line: 0, reason: "need at least two rows".into() });
        }
        let grid = TimeGrid::new(times[0], times[times.len() - 1], times.len() - 1)?;
        let h = grid.step();
        if times.iter().enumerate().any(|(k, t)| (t - grid.node(k)).abs() > 1e-9 * h.max(1.0)) {
            return Err(Error::InvalidGrid("time column is not uniformly spaced".into()));
        }
        Ok(Trajectory { grid, values })
    }

    pub fn load_csv(path: impl AsRef<Path>, columns: [&str; D]) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file, columns)
    }

    pub fn save_csv(&self, path: impl AsRef<Path>, columns: [&str; D]) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_csv(&mut w, columns).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
    }
}

#[inline]
fn lerp<const D: usize>(a: &[f64; D], b: &[f64; D], frac: f64) -> [f64; D] {
    if frac == 0.0 {
        return *a;
    }
    let mut out = [0.0; D];
    for c in 0..D {
        out[c] = a[c] + frac * (b[c] - a[c]);
    }
    out
}

#[inline]
fn axpy<const D: usize>(y: &[f64; D], a: f64, x: &[f64; D]) -> [f64; D] {
    let mut out = *y;
    for c in 0..D {
        out[c] += a * x[c];
    }
    out
}

/// One classical RK4 step of size `h` (may be negative) from `(t, y)`.
#[inline]
pub fn rk4_step<const D: usize, F>(rhs: &mut F, t: f64, y: &[f64; D], h: f64) -> [f64; D]
where
    F: FnMut(f64, &[f64; D]) -> [f64; D],
{
    let half = 0.5 * h;
    let k1 = rhs(t, y);
    let k2 = rhs(t + half, &axpy(y, half, &k1));
    let k3 = rhs(t + half, &axpy(y, half, &k2));
    let k4 = rhs(t + h, &axpy(y, h, &k3));
    let mut out = *y;
    for c in 0..D {
        out[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    }
    out
}

fn check_finite<const D: usize>(y: &[f64; D], t: f64) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteState { t })
    }
}

pub fn rk4_forward<const D: usize, F>(mut rhs: F, grid: &TimeGrid, y0: [f64; D]) -> Result<Trajectory<D>>
where
    F: FnMut(f64, &[f64; D]) -> [f64; D],
{
    check_finite(&y0, grid.t0)?;
    let h = grid.step();
    let mut values = Vec::with_capacity(grid.len());
    values.push(y0);
    let mut y = y0;
    for k in 0..grid.n_steps {
        y = rk4_step(&mut rhs, grid.node(k), &y, h);
        check_finite(&y, grid.node(k + 1))?;
        values.push(y);
    }
    Ok(Trajectory { grid: *grid, values })
}

/// Integrates from `tf` down to `t0`; the result is indexed on the ascending grid.
pub fn rk4_backward<const D: usize, F>(mut rhs: F, grid: &TimeGrid, y_tf: [f64; D]) -> Result<Trajectory<D>>
where
    F: FnMut(f64, &[f64; D]) -> [f64; D],
{
    check_finite(&y_tf, grid.tf)?;
    let h = grid.step();
    let mut values = vec![[0.0; D]; grid.len()];
    values[grid.n_steps] = y_tf;
    let mut y = y_tf;
    for k in (1..=grid.n_steps).rev() {
        y = rk4_step(&mut rhs, grid.node(k), &y, -h);
        check_finite(&y, grid.node(k - 1))?;
        values[k - 1] = y;
    }
    Ok(Trajectory { grid: *grid, values })
}
