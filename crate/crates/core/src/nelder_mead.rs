//! Unconstrained Nelder–Mead simplex search. Box constraints are handled by the
//! caller through a change of variables.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexSettings {
    pub max_iterations: usize,
    /// Stop when the spread of objective values over the simplex falls below this.
    pub f_tol: f64,
    /// ... and the simplex diameter (max-norm) falls below this.
    pub x_tol: f64,
    pub initial_step: f64,
}

impl Default for SimplexSettings {
    fn default() -> Self {
        SimplexSettings { max_iterations: 4000, f_tol: 1e-12, x_tol: 1e-9, initial_step: 0.2 }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best objective value after each iteration; non-increasing.
    pub history: Vec<f64>,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

pub fn minimize<F>(mut f: F, x0: &[f64], settings: &SimplexSettings) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], count: &mut usize| {
        *count += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    points.push(x0.to_vec());
    for k in 0..n {
        let mut p = x0.to_vec();
        p[k] += if p[k] != 0.0 { settings.initial_step * p[k].abs().max(1.0) } else { settings.initial_step };
        points.push(p);
    }
    let mut values: Vec<f64> = points.iter().map(|p| eval(p, &mut evaluations)).collect();

    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < settings.max_iterations {
        // sort ascending, stable so ties keep insertion order
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        points = order.iter().map(|&i| points[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let diameter = points[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&points[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread.abs() <= settings.f_tol && diameter <= settings.x_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n).map(|c| points[..n].iter().map(|p| p[c]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|c| centroid[c] + t * (points[n][c] - centroid[c])).collect() };

        let xr = along(-REFLECT);
        let fr = eval(&xr, &mut evaluations);
        if fr < values[0] {
            let xe = along(-REFLECT * EXPAND);
            let fe = eval(&xe, &mut evaluations);
            if fe < fr {
                points[n] = xe;
                values[n] = fe;
            } else {
                points[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            points[n] = xr;
            values[n] = fr;
        } else {
            let (xc, fc) = if fr < values[n] {
                let xc = along(-REFLECT * CONTRACT);
                let fc = eval(&xc, &mut evaluations);
                (xc, fc)
            } else {
                let xc = along(CONTRACT);
                let fc = eval(&xc, &mut evaluations);
                (xc, fc)
            };
            if fc < values[n].min(fr) {
                points[n] = xc;
                values[n] = fc;
            } else {
                for k in 1..=n {
                    for c in 0..n {
                        points[k][c] = points[0][c] + SHRINK * (points[k][c] - points[0][c]);
                    }
                    values[k] = eval(&points[k], &mut evaluations);
                }
            }
        }
        history.push(values.iter().copied().fold(f64::INFINITY, f64::min));
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    SimplexResult { x: points[best].clone(), f: values[best], iterations, evaluations, converged, history }
}
