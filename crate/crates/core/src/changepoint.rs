//! Two-regime angular density model split at an unknown time `tau`.
//!
//! Observations at times `t <= tau` follow `theta1`, later ones `theta2`. The
//! prior is flat on each weight polytope and uniform for `tau` on `(0, T)`.

use serde::{Deserialize, Serialize};

use crate::angular::{validate_weights, BernsteinWeights};
use crate::error::{Error, Result};
use crate::margins::AngularSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    First,
    Second,
}

/// Regime of observation index `t`: the first regime is the closed interval `[0, tau]`.
pub fn regime_of(t: usize, tau: f64) -> Regime {
    if t as f64 <= tau {
        Regime::First
    } else {
        Regime::Second
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr")]
pub struct ChangePointModel {
    pub theta1: BernsteinWeights,
    pub theta2: BernsteinWeights,
    pub tau: f64,
    /// Horizon `T`.
    pub horizon: usize,
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    #[serde(rename = "J")]
    order: usize,
    theta1: Vec<f64>,
    theta2: Vec<f64>,
    tau: f64,
    #[serde(rename = "T")]
    horizon: usize,
}

impl TryFrom<ModelRepr> for ChangePointModel {
    type Error = Error;

    fn try_from(r: ModelRepr) -> Result<Self> {
        Ok(ChangePointModel {
            theta1: BernsteinWeights::from_raw(r.order, r.theta1)?,
            theta2: BernsteinWeights::from_raw(r.order, r.theta2)?,
            tau: r.tau,
            horizon: r.horizon,
        })
    }
}

impl From<ChangePointModel> for ModelRepr {
    fn from(m: ChangePointModel) -> Self {
        ModelRepr {
            order: m.theta1.order(),
            theta1: m.theta1.theta().to_vec(),
            theta2: m.theta2.theta().to_vec(),
            tau: m.tau,
            horizon: m.horizon,
        }
    }
}

impl ChangePointModel {
    /// A model whose weights are valid, of equal order, with `0 < tau < T`.
    pub fn new(
        theta1: BernsteinWeights,
        theta2: BernsteinWeights,
        tau: f64,
        horizon: usize,
    ) -> Result<Self> {
        let m = Self {
            theta1,
            theta2,
            tau,
            horizon,
        };
        m.check()?;
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.theta1.order()
    }

    pub fn check(&self) -> Result<()> {
        if self.theta1.order() != self.theta2.order() {
            return Err(Error::InvalidInput(format!(
                "regime orders differ: {} vs {}",
                self.theta1.order(),
                self.theta2.order()
            )));
        }
        for w in [&self.theta1, &self.theta2] {
            let report = validate_weights(w);
            if !report.is_ok() {
                return Err(Error::InvalidWeights(report));
            }
        }
        if !self.tau_in_support() {
            return Err(Error::InvalidInput(format!(
                "tau = {} outside (0, {})",
                self.tau, self.horizon
            )));
        }
        Ok(())
    }

    fn tau_in_support(&self) -> bool {
        self.tau > 0.0 && self.tau < self.horizon as f64
    }

    pub fn weights_for(&self, regime: Regime) -> &BernsteinWeights {
        match regime {
            Regime::First => &self.theta1,
            Regime::Second => &self.theta2,
        }
    }
}

/// Sum of log angular densities, each observation under the weights of its
/// regime. An empty regime contributes nothing.
pub fn log_likelihood(model: &ChangePointModel, sample: &AngularSample) -> Result<f64> {
    for w in [&model.theta1, &model.theta2] {
        let report = validate_weights(w);
        if !report.is_ok() {
            return Err(Error::InvalidWeights(report));
        }
    }
    let mut total = 0.0;
    for (&t, &w) in sample.times.iter().zip(&sample.angles) {
        if !(w > 0.0 && w < 1.0) {
            return Err(Error::InvalidInput(format!("angle {w} outside (0,1)")));
        }
        let h = model.weights_for(regime_of(t, model.tau)).density(w);
        let lh = h.ln();
        if !lh.is_finite() {
            return Err(Error::DensityUnderflow { angle: w });
        }
        total += lh;
    }
    Ok(total)
}

/// Flat prior on each feasible weight set times a uniform prior for `tau` on
/// `(0, T)`; `-inf` outside the support.
pub fn log_prior(model: &ChangePointModel) -> f64 {
    if model.horizon == 0 || model.check().is_err() {
        return f64::NEG_INFINITY;
    }
    -(model.horizon as f64).ln()
}

/// Unnormalized log posterior.
pub fn log_posterior(model: &ChangePointModel, sample: &AngularSample) -> Result<f64> {
    let prior = log_prior(model);
    if prior == f64::NEG_INFINITY {
        return Ok(prior);
    }
    Ok(prior + log_likelihood(model, sample)?)
}
