//! Synthetic data: GARCH(1,1) paths and angular samples with a planted
//! change-point.

use std::path::Path;

use chrono::NaiveDate;
use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::angular::{validate_weights, AngleSampler, BernsteinWeights};
use crate::error::{Error, Result};
use crate::ingest::{GarchParams, ReturnSeries};
use crate::margins::AngularSample;

/// Forward GARCH(1,1) simulation with Gaussian innovations, started at the
/// stationary variance. Dates are consecutive days from 2000-01-01.
pub fn simulate_garch11<R: Rng + ?Sized>(
    params: &GarchParams,
    n: usize,
    rng: &mut R,
) -> Result<ReturnSeries> {
    if !params.is_valid() {
        return Err(Error::InvalidInput(format!(
            "GARCH parameters must satisfy omega > 0, alpha, beta >= 0, alpha + beta < 1: {params:?}"
        )));
    }
    let start = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
    let mut var = params.unconditional_variance();
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let z: f64 = StandardNormal.sample(rng);
        let eps = var.sqrt() * z;
        values.push(params.mu + eps);
        var = params.omega + params.alpha * eps * eps + params.beta * var;
    }
    let dates = (0..n as u64).map(|d| start + chrono::Days::new(d)).collect();
    Ok(ReturnSeries { dates, values })
}

/// Planted change-point design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub n_exceed: usize,
    pub tau_true: f64,
    pub theta1: BernsteinWeights,
    pub theta2: BernsteinWeights,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidInput("horizon must be positive".into()));
        }
        if self.n_exceed == 0 || self.n_exceed > self.horizon {
            return Err(Error::InvalidInput(format!(
                "n_exceed = {} must lie in 1..={}",
                self.n_exceed, self.horizon
            )));
        }
        if !(self.tau_true > 0.0 && self.tau_true <= self.horizon as f64) {
            return Err(Error::InvalidInput(format!(
                "tau_true = {} outside (0, {}]",
                self.tau_true, self.horizon
            )));
        }
        for w in [&self.theta1, &self.theta2] {
            let r = validate_weights(w);
            if !r.is_ok() {
                return Err(Error::InvalidWeights(r));
            }
        }
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let spec: SyntheticSpec = serde_json::from_reader(std::io::BufReader::new(file))?;
        spec.validate()?;
        Ok(spec)
    }
}

/// Exceedance times uniform without replacement over `1..=T`; angles from
/// `theta1` up to `tau_true` and from `theta2` after. Radii are unit-Pareto
/// placeholders above 2.
pub fn simulate_changepoint_angles(spec: &SyntheticSpec) -> Result<AngularSample> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut times: Vec<usize> = sample_indices(&mut rng, spec.horizon, spec.n_exceed)
        .into_iter()
        .map(|i| i + 1)
        .collect();
    times.sort_unstable();

    let first = AngleSampler::new(&spec.theta1)?;
    let second = AngleSampler::new(&spec.theta2)?;
    let mut angles = Vec::with_capacity(times.len());
    let mut radii = Vec::with_capacity(times.len());
    for &t in &times {
        let w = if t as f64 <= spec.tau_true {
            first.sample(&mut rng)
        } else {
            second.sample(&mut rng)
        };
        angles.push(w);
        let u: f64 = 1.0 - rng.random::<f64>();
        radii.push(2.0 / u);
    }
    let threshold = radii.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(AngularSample {
        times,
        angles,
        radii,
        horizon: spec.horizon,
        threshold: Some(threshold),
        level: None,
        calendar: None,
    })
}

fn dirichlet_flat<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    let g: Vec<f64> = (0..len).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = g.iter().sum();
    g.into_iter().map(|x| x / s).collect()
}

fn first_moment(theta: &[f64]) -> f64 {
    theta.iter().enumerate().map(|(i, t)| (i + 1) as f64 * t).sum()
}

/// A random point of the feasible weight set: two flat Dirichlet draws with
/// moments on either side of `J / 2`, mixed so the moment is exactly `J / 2`.
pub fn random_valid_weights<R: Rng + ?Sized>(order: usize, rng: &mut R) -> Result<BernsteinWeights> {
    if order < crate::angular::MIN_ORDER {
        return Err(Error::InvalidInput(format!("order {order} too small")));
    }
    let half = order as f64 / 2.0;
    let a = dirichlet_flat(order - 1, rng);
    let mut b = dirichlet_flat(order - 1, rng);
    let (ma, mut mb) = (first_moment(&a), first_moment(&b));
    if (ma - half) * (mb - half) > 0.0 {
        b = a.iter().rev().copied().collect();
        mb = first_moment(&b);
    }
    let theta = if (mb - ma).abs() < 1e-300 {
        a
    } else {
        let lambda = (mb - half) / (mb - ma);
        a.iter()
            .zip(&b)
            .map(|(x, y)| (lambda * x + (1.0 - lambda) * y).max(0.0))
            .collect()
    };
    BernsteinWeights::new(order, theta)
}
