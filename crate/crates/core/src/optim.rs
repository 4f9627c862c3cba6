//! Derivative-free Nelder–Mead simplex minimization.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Stop when the spread of objective values over the simplex falls below this.
    pub f_tolerance: f64,
    /// ...and the simplex diameter falls below this.
    pub x_tolerance: f64,
    /// Edge length of the initial simplex, per coordinate.
    pub initial_step: f64,
    /// Number of restarts from the best vertex after convergence.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            f_tolerance: 1e-10,
            x_tolerance: 1e-8,
            initial_step: 0.25,
            restarts: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f` starting from `x0`. Non-finite objective values are treated
/// as +inf, so the objective may signal infeasible points that way.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let mut eval = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut start = x0.to_vec();
    let mut total_iterations = 0;
    let mut result = None;
    for _ in 0..=opts.restarts {
        let remaining = opts.max_iterations.saturating_sub(total_iterations);
        let run = simplex_run(&mut eval, &start, opts, remaining);
        total_iterations += run.iterations;
        let converged = run.converged;
        start.clone_from(&run.x);
        result = Some(run);
        if !converged {
            break;
        }
    }
    let mut best = result.expect("at least one run");
    best.iterations = total_iterations;
    best
}

fn simplex_run<F>(f: &mut F, x0: &[f64], opts: &NelderMeadOptions, budget: usize) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < budget {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let diameter = simplex[1..]
            .iter()
            .map(|v| max_abs_diff(v, &simplex[0]))
            .fold(0.0, f64::max);
        if spread.abs() <= opts.f_tolerance && diameter <= opts.x_tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = along(REFLECT);
        let f_r = f(&reflected);
        if f_r < values[0] {
            let expanded = along(EXPAND);
            let f_e = f(&expanded);
            if f_e < f_r {
                simplex[n] = expanded;
                values[n] = f_e;
            } else {
                simplex[n] = reflected;
                values[n] = f_r;
            }
            continue;
        }
        if f_r < values[n - 1] {
            simplex[n] = reflected;
            values[n] = f_r;
            continue;
        }
        let (candidate, f_c) = if f_r < values[n] {
            let c = along(REFLECT * CONTRACT);
            let fc = f(&c);
            (c, fc)
        } else {
            let c = along(-CONTRACT);
            let fc = f(&c);
            (c, fc)
        };
        if f_c < values[n].min(f_r) {
            simplex[n] = candidate;
            values[n] = f_c;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            for j in 0..n {
                simplex[i][j] = best[j] + SHRINK * (simplex[i][j] - best[j]);
            }
            values[i] = f(&simplex[i]);
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    Minimum {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        converged,
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
