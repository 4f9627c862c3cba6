//! Bernstein-polynomial angular densities.
//!
//! A density of order `J` is a mixture of Beta densities with shapes
//! `(i, J - i)`, `i = 1..J-1`:
//!
//! ```text
//! h(w) = sum_i theta_i d(w | i, J - i)
//! ```
//!
//! A valid angular density has nonnegative weights summing to one and mean
//! one half, which for this family is `sum_i i theta_i = J / 2`.

use std::fmt;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureOptions};

/// Smallest supported order. At `J = 3` the two constraints pin the weights
/// to a single point.
pub const MIN_ORDER: usize = 4;

/// Tolerance of the sum and mean constraints.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-10;

/// Default number of grid points for exported density curves.
pub const DEFAULT_GRID_POINTS: usize = 512;

/// Mixture weights `theta_i`, `i = 1..J-1`, of a Bernstein density of order `J`.
///
/// Construction only checks the shape; use [`BernsteinWeights::new`] or
/// [`validate_weights`] for the simplex and mean constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightsRepr", into = "WeightsRepr")]
pub struct BernsteinWeights {
    order: usize,
    theta: Vec<f64>,
    log_norm: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct WeightsRepr {
    #[serde(rename = "J")]
    order: usize,
    theta: Vec<f64>,
}

impl TryFrom<WeightsRepr> for BernsteinWeights {
    type Error = Error;

    fn try_from(r: WeightsRepr) -> Result<Self> {
        BernsteinWeights::from_raw(r.order, r.theta)
    }
}

impl From<BernsteinWeights> for WeightsRepr {
    fn from(w: BernsteinWeights) -> Self {
        WeightsRepr {
            order: w.order,
            theta: w.theta,
        }
    }
}

impl BernsteinWeights {
    /// Weights that satisfy every constraint.
    pub fn new(order: usize, theta: Vec<f64>) -> Result<Self> {
        let w = Self::from_raw(order, theta)?;
        let report = validate_weights(&w);
        if report.is_ok() {
            Ok(w)
        } else {
            Err(Error::InvalidWeights(report))
        }
    }

    /// Checks only that `J >= 4`, that there are `J - 1` finite weights.
    pub fn from_raw(order: usize, theta: Vec<f64>) -> Result<Self> {
        if order < MIN_ORDER {
            return Err(Error::InvalidInput(format!(
                "Bernstein order {order} is below the minimum {MIN_ORDER}"
            )));
        }
        if theta.len() != order - 1 {
            return Err(Error::InvalidInput(format!(
                "order {order} needs {} weights, got {}",
                order - 1,
                theta.len()
            )));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("non-finite weight".into()));
        }
        Ok(Self {
            log_norm: log_normalizers(order),
            order,
            theta,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `theta[i - 1]` is the weight of the Beta(i, J - i) component.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Replaces the weights, keeping the order. Only the shape is checked.
    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != self.theta.len() || theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("weight vector shape mismatch".into()));
        }
        Ok(Self {
            order: self.order,
            theta,
            log_norm: self.log_norm.clone(),
        })
    }

    /// Component densities `d(w | i, J - i)` for `i = 1..J-1`, written into `out`.
    pub fn basis_into(&self, w: f64, out: &mut [f64]) {
        let (lw, l1w) = (w.ln(), (-w).ln_1p());
        let j = self.order as f64;
        for (i, (o, ln)) in out.iter_mut().zip(&self.log_norm).enumerate() {
            let a = (i + 1) as f64;
            *o = (ln + (a - 1.0) * lw + (j - a - 1.0) * l1w).exp();
        }
    }

    /// Mixture density at `w`, without constraint checks. `w` must lie in (0, 1).
    pub fn density(&self, w: f64) -> f64 {
        let (lw, l1w) = (w.ln(), (-w).ln_1p());
        let j = self.order as f64;
        self.theta
            .iter()
            .zip(&self.log_norm)
            .enumerate()
            .map(|(i, (t, ln))| {
                let a = (i + 1) as f64;
                t * (ln + (a - 1.0) * lw + (j - a - 1.0) * l1w).exp()
            })
            .sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.theta
            .iter()
            .zip(self.theta.iter().rev())
            .all(|(a, b)| (a - b).abs() <= CONSTRAINT_TOLERANCE)
    }
}

fn log_normalizers(order: usize) -> Vec<f64> {
    let j = order as f64;
    (1..order)
        .map(|i| {
            let a = i as f64;
            ln_gamma(j) - ln_gamma(a) - ln_gamma(j - a)
        })
        .collect()
}

/// Beta density with integer shapes, computed through log-gamma.
pub fn dirichlet_density(w: f64, a1: u32, a2: u32) -> Result<f64> {
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::InvalidInput(format!("angle {w} outside (0,1)")));
    }
    if a1 == 0 || a2 == 0 {
        return Err(Error::InvalidInput("Beta shapes must be at least 1".into()));
    }
    let (a, b) = (f64::from(a1), f64::from(a2));
    let log_d = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b)
        + (a - 1.0) * w.ln()
        + (b - 1.0) * (-w).ln_1p();
    Ok(log_d.exp())
}

/// Outcome of checking the simplex and mean constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    pub order: usize,
    /// Most negative weight as `(component index i, value)`, if any.
    pub most_negative: Option<(usize, f64)>,
    /// `sum theta - 1`.
    pub sum_error: f64,
    /// `sum i theta_i - J / 2`.
    pub mean_error: f64,
}

impl ConstraintReport {
    pub fn nonnegative(&self) -> bool {
        self.most_negative.is_none()
    }

    pub fn sums_to_one(&self) -> bool {
        self.sum_error.abs() <= CONSTRAINT_TOLERANCE
    }

    pub fn mean_is_half(&self) -> bool {
        self.mean_error.abs() <= CONSTRAINT_TOLERANCE
    }

    pub fn is_ok(&self) -> bool {
        self.nonnegative() && self.sums_to_one() && self.mean_is_half()
    }
}

impl fmt::Display for ConstraintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let mut parts = Vec::new();
        if let Some((i, v)) = self.most_negative {
            parts.push(format!("negative weight theta_{i} = {v}"));
        }
        if !self.sums_to_one() {
            parts.push(format!("sum of weights = {} != 1", 1.0 + self.sum_error));
        }
        if !self.mean_is_half() {
            let half = self.order as f64 / 2.0;
            parts.push(format!(
                "sum i*theta_i = {} != {half}",
                half + self.mean_error
            ));
        }
        write!(f, "{}", parts.join("; "))
    }
}

pub fn validate_weights(wts: &BernsteinWeights) -> ConstraintReport {
    let most_negative = wts
        .theta
        .iter()
        .enumerate()
        .filter(|(_, t)| **t < 0.0)
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, t)| (i + 1, *t));
    let sum: f64 = wts.theta.iter().sum();
    let moment: f64 = wts
        .theta
        .iter()
        .enumerate()
        .map(|(i, t)| (i + 1) as f64 * t)
        .sum();
    ConstraintReport {
        order: wts.order,
        most_negative,
        sum_error: sum - 1.0,
        mean_error: moment - wts.order as f64 / 2.0,
    }
}

fn ensure_valid(wts: &BernsteinWeights) -> Result<()> {
    let report = validate_weights(wts);
    if report.is_ok() {
        Ok(())
    } else {
        Err(Error::InvalidWeights(report))
    }
}

pub fn eval_density(wts: &BernsteinWeights, w: f64) -> Result<f64> {
    ensure_valid(wts)?;
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::InvalidInput(format!("angle {w} outside (0,1)")));
    }
    Ok(wts.density(w))
}

/// Analytic mean `sum_i theta_i i / J`.
pub fn density_mean(wts: &BernsteinWeights) -> f64 {
    let j = wts.order as f64;
    wts.theta
        .iter()
        .enumerate()
        .map(|(i, t)| t * (i + 1) as f64)
        .sum::<f64>()
        / j
}

/// Equal weights `1 / (J - 1)`; the centre of the feasible set.
pub fn uniform_weights(order: usize) -> Result<BernsteinWeights> {
    if order < MIN_ORDER {
        return Err(Error::InvalidInput(format!(
            "Bernstein order {order} is below the minimum {MIN_ORDER}"
        )));
    }
    BernsteinWeights::from_raw(order, vec![1.0 / (order - 1) as f64; order - 1])
}

/// Draws angles from a fixed density: pick a component by weight, then draw
/// from its Beta law.
#[derive(Debug, Clone)]
pub struct AngleSampler {
    component: WeightedIndex<f64>,
    betas: Vec<Beta<f64>>,
}

impl AngleSampler {
    pub fn new(wts: &BernsteinWeights) -> Result<Self> {
        ensure_valid(wts)?;
        let j = wts.order as f64;
        let component = WeightedIndex::new(wts.theta.iter().map(|t| t.max(0.0)))
            .map_err(|e| Error::InvalidInput(format!("weights: {e}")))?;
        let betas = (1..wts.order)
            .map(|i| Beta::new(i as f64, j - i as f64).expect("positive shapes"))
            .collect();
        Ok(Self { component, betas })
    }
}

impl Distribution<f64> for AngleSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let beta = &self.betas[self.component.sample(rng)];
        loop {
            let w = beta.sample(rng);
            if w > 0.0 && w < 1.0 {
                return w;
            }
        }
    }
}

pub fn sample_angle<R: Rng + ?Sized>(wts: &BernsteinWeights, rng: &mut R) -> Result<f64> {
    Ok(AngleSampler::new(wts)?.sample(rng))
}

/// Quadrature settings used for the exponent measure.
pub const BEV_QUADRATURE: QuadratureOptions = QuadratureOptions {
    abs_tolerance: 1e-10,
    max_intervals: 4000,
};

/// Exponent `V(x, y) = 2 int max(w/x, (1-w)/y) h(w) dw`, integrated on both
/// sides of the kink at `w = x / (x + y)`.
pub fn exponent_measure(wts: &BernsteinWeights, x: f64, y: f64) -> Result<f64> {
    ensure_valid(wts)?;
    if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "BEV arguments must be positive and finite, got ({x}, {y})"
        )));
    }
    let kink = x / (x + y);
    let left = integrate(|w| (1.0 - w) * wts.density(w), 0.0, kink, &BEV_QUADRATURE)?;
    let right = integrate(|w| w * wts.density(w), kink, 1.0, &BEV_QUADRATURE)?;
    Ok(2.0 * (left / y + right / x))
}

/// Bivariate extreme-value distribution `G(x, y) = exp(-V(x, y))` on unit
/// Fréchet margins.
pub fn bev_cdf(wts: &BernsteinWeights, x: f64, y: f64) -> Result<f64> {
    Ok((-exponent_measure(wts, x, y)?).exp())
}

/// Extreme-value copula `C(u, v) = G(-1/ln u, -1/ln v)` for `u, v` in (0, 1).
pub fn bev_copula(wts: &BernsteinWeights, u: f64, v: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0) {
        return Err(Error::InvalidInput(format!(
            "copula arguments must lie in (0,1), got ({u}, {v})"
        )));
    }
    bev_cdf(wts, -1.0 / u.ln(), -1.0 / v.ln())
}

/// `n` equally spaced cell midpoints `(k + 1/2) / n` in (0, 1).
pub fn density_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| (k as f64 + 0.5) / n as f64).collect()
}

/// Writes a `w,h` two-column CSV.
pub fn write_grid_csv(path: impl AsRef<Path>, grid: &[f64], values: &[f64]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["w", "h"])?;
    for (x, h) in grid.iter().zip(values) {
        w.write_record([x.to_string(), h.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Evaluates `wts` on the default grid and writes it as `w,h` rows.
pub fn export_density(wts: &BernsteinWeights, path: impl AsRef<Path>, points: usize) -> Result<()> {
    ensure_valid(wts)?;
    let grid = density_grid(points);
    let values: Vec<f64> = grid.iter().map(|w| wts.density(*w)).collect();
    write_grid_csv(path, &grid, &values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn weights(theta: &[f64]) -> BernsteinWeights {
        BernsteinWeights::new(theta.len() + 1, theta.to_vec()).unwrap()
    }

    #[test]
    fn beta_density_values() {
        assert!((dirichlet_density(0.5, 1, 1).unwrap() - 1.0).abs() < 1e-14);
        assert!((dirichlet_density(0.5, 2, 2).unwrap() - 1.5).abs() < 1e-13);
        assert!((dirichlet_density(0.25, 1, 3).unwrap() - 1.6875).abs() < 1e-13);
        assert!(dirichlet_density(0.0, 1, 1).is_err());
        assert!(dirichlet_density(1.0, 2, 2).is_err());
    }

    #[test]
    fn beta_density_survives_large_orders() {
        let d = dirichlet_density(0.5, 46, 47).unwrap();
        assert!(d.is_finite() && d > 7.0 && d < 8.0, "{d}");
    }

    #[test]
    fn mixture_values() {
        let third = 1.0 / 3.0;
        let u = weights(&[third, third, third]);
        assert!((eval_density(&u, 0.5).unwrap() - 1.0).abs() < 1e-14);
        let mid = weights(&[0.0, 1.0, 0.0]);
        assert!((eval_density(&mid, 0.5).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn symmetric_weights_give_symmetric_density() {
        let w = weights(&[0.3, 0.1, 0.2, 0.1, 0.3]);
        assert!(w.is_symmetric());
        for k in 1..50 {
            let x = k as f64 / 50.0;
            assert!((w.density(x) - w.density(1.0 - x)).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_of_symmetric_weights() {
        assert_eq!(density_mean(&uniform_weights(4).unwrap()), 0.5);
        assert_eq!(density_mean(&weights(&[0.5, 0.0, 0.5])), 0.5);
    }

    #[test]
    fn uniform_weights_are_feasible() {
        let w4 = uniform_weights(4).unwrap();
        assert_eq!(w4.theta(), &[1.0 / 3.0; 3]);
        let w5 = uniform_weights(5).unwrap();
        assert_eq!(w5.theta(), &[0.25; 4]);
        let moment: f64 = w5.theta().iter().enumerate().map(|(i, t)| (i + 1) as f64 * t).sum();
        assert_eq!(moment, 2.5);
        let w93 = uniform_weights(93).unwrap();
        assert_eq!(w93.theta().len(), 92);
        assert!(validate_weights(&w93).is_ok());
        assert!(uniform_weights(3).is_err());
    }

    #[test]
    fn constraint_reports() {
        assert!(validate_weights(&uniform_weights(4).unwrap()).is_ok());

        let bad_mean = BernsteinWeights::from_raw(4, vec![1.0, 0.0, 0.0]).unwrap();
        let r = validate_weights(&bad_mean);
        assert!(!r.is_ok() && r.nonnegative() && r.sums_to_one());
        assert_eq!(r.mean_error, -1.0);
        assert!(r.to_string().contains("= 1 != 2"), "{r}");

        let negative = BernsteinWeights::from_raw(4, vec![0.5, 0.6, -0.1]).unwrap();
        let r = validate_weights(&negative);
        assert_eq!(r.most_negative, Some((3, -0.1)));
        assert!(r.to_string().contains("negative"));
        assert!(matches!(
            eval_density(&negative, 0.5),
            Err(Error::InvalidWeights(_))
        ));
    }

    #[test]
    fn json_shape() {
        let w = uniform_weights(4).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        assert!(s.starts_with(r#"{"J":4,"theta":["#), "{s}");
        let back: BernsteinWeights = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
        assert!(serde_json::from_str::<BernsteinWeights>(r#"{"J":4,"theta":[1.0]}"#).is_err());
    }

    fn sample_moments(w: &BernsteinWeights, n: usize, seed: u64) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sampler = AngleSampler::new(w).unwrap();
        let xs: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (mean, var)
    }

    #[test]
    fn sampling_moments() {
        // Beta(2,2): mean 1/2
        let (m, _) = sample_moments(&weights(&[0.0, 1.0, 0.0]), 100_000, 1);
        assert!((m - 0.5).abs() < 0.01, "{m}");
        // half Beta(1,3) + half Beta(3,1): E[w^2] = (1/10 + 6/10) / 2 = 0.35,
        // so the variance is 0.35 - 0.25 = 0.1
        let (m, v) = sample_moments(&weights(&[0.5, 0.0, 0.5]), 100_000, 2);
        assert!((m - 0.5).abs() < 0.01, "{m}");
        assert!((v - 0.1).abs() < 0.01, "{v}");
    }

    #[test]
    fn bev_limits_and_symmetry() {
        let w = weights(&[0.3, 0.1, 0.2, 0.1, 0.3]);
        let a = bev_cdf(&w, 1.3, 0.4).unwrap();
        let b = bev_cdf(&w, 0.4, 1.3).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(bev_cdf(&w, 1e9, 1e9).unwrap() > 1.0 - 1e-8);
        assert!(bev_cdf(&w, 0.0, 1.0).is_err());
        let g = bev_cdf(&w, 0.7, 2.0).unwrap();
        assert!(g > 0.0 && g <= 1.0);
    }

    #[test]
    fn exponent_bounds() {
        // independence gives 1/x + 1/y, complete dependence 1/min(x,y)
        let w = weights(&[0.2, 0.3, 0.3, 0.2]);
        let (x, y) = (0.8, 1.7);
        let v = exponent_measure(&w, x, y).unwrap();
        assert!(v <= 1.0 / x + 1.0 / y + 1e-12);
        assert!(v >= 1.0 / x.min(y) - 1e-12);
    }

    #[test]
    fn copula_matches_cdf() {
        let w = uniform_weights(6).unwrap();
        let (u, v) = (0.3, 0.85);
        let c = bev_copula(&w, u, v).unwrap();
        let g = bev_cdf(&w, -1.0 / u.ln(), -1.0 / v.ln()).unwrap();
        assert_eq!(c, g);
        assert!(c <= u.min(v) + 1e-12 && c >= u * v - 1e-12);
    }
}
