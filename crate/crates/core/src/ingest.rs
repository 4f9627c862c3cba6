//! Price loading, negative log returns and the GARCH(1,1) volatility filter.
//!
//! The filter is a constant-mean GARCH(1,1) fitted by Gaussian quasi maximum
//! likelihood:
//!
//! ```text
//! x_t = mu + eps_t,  eps_t = sigma_t z_t
//! sigma_t^2 = omega + alpha eps_{t-1}^2 + beta sigma_{t-1}^2
//! ```
//!
//! The recursion starts from a backcast `sigma_1^2 = omega + (alpha + beta) v`,
//! where `v` is the mean square of `x_t - mu`.

use std::f64::consts::PI;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{nelder_mead, NelderMeadOptions};

/// Closing prices on strictly increasing dates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    dates: Vec<NaiveDate>,
    prices: Vec<f64>,
}

impl PriceSeries {
    pub fn new(dates: Vec<NaiveDate>, prices: Vec<f64>) -> Result<Self> {
        if dates.len() != prices.len() {
            return Err(Error::InvalidInput(format!(
                "{} dates but {} prices",
                dates.len(),
                prices.len()
            )));
        }
        if prices.len() < 2 {
            return Err(Error::TooShort {
                required: 2,
                actual: prices.len(),
            });
        }
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(format!(
                "dates not strictly increasing at {}",
                w[1]
            )));
        }
        if let Some(p) = prices.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
            return Err(Error::InvalidInput(format!("non-positive price {p}")));
        }
        Ok(Self { dates, prices })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

#[derive(Debug, Deserialize)]
struct PriceRow {
    date: String,
    close: String,
}

/// Reads a `date,close` CSV with ISO-8601 dates. Rows may appear in any order;
/// the result is sorted by date.
pub fn load_price_csv(path: impl AsRef<Path>) -> Result<PriceSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);

    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut rows: Vec<(NaiveDate, f64, usize)> = Vec::new();
    for record in reader.deserialize::<PriceRow>() {
        let row = match record {
            Ok(row) => row,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line() as usize);
                return Err(parse_err(line, e.to_string()));
            }
        };
        // header is line 1
        let line = rows.len() + 2;
        let date = NaiveDate::parse_from_str(&row.date, "%Y-%m-%d")
            .map_err(|e| parse_err(line, format!("bad date {:?}: {e}", row.date)))?;
        let price: f64 = row
            .close
            .parse()
            .map_err(|e| parse_err(line, format!("bad price {:?}: {e}", row.close)))?;
        if !price.is_finite() {
            return Err(parse_err(line, format!("non-finite price {price}")));
        }
        if price <= 0.0 {
            return Err(Error::NonPositivePrice {
                path: path.to_path_buf(),
                line,
                price,
            });
        }
        rows.push((date, price, line));
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }

    rows.sort_by_key(|r| r.0);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DuplicateDate {
            path: path.to_path_buf(),
            line: w[0].2.max(w[1].2),
            date: w[1].0,
        });
    }
    let (dates, prices) = rows.into_iter().map(|(d, p, _)| (d, p)).unzip();
    PriceSeries::new(dates, prices)
}

/// Daily negative log returns, each dated by the later of its two days.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

impl ReturnSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn negative_log_returns(prices: &PriceSeries) -> Result<ReturnSeries> {
    if prices.len() < 2 {
        return Err(Error::TooShort {
            required: 2,
            actual: prices.len(),
        });
    }
    let values = prices
        .prices
        .windows(2)
        .map(|w| (w[0] / w[1]).ln())
        .collect();
    Ok(ReturnSeries {
        dates: prices.dates[1..].to_vec(),
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GarchParams {
    pub mu: f64,
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl GarchParams {
    pub fn persistence(&self) -> f64 {
        self.alpha + self.beta
    }

    /// omega > 0, alpha >= 0, beta >= 0 and alpha + beta < 1.
    pub fn is_valid(&self) -> bool {
        self.mu.is_finite()
            && self.omega > 0.0
            && self.omega.is_finite()
            && self.alpha >= 0.0
            && self.beta >= 0.0
            && self.persistence() < 1.0
    }

    /// Stationary variance omega / (1 - alpha - beta).
    pub fn unconditional_variance(&self) -> f64 {
        self.omega / (1.0 - self.persistence())
    }
}

/// Conditional variances of the GARCH(1,1) recursion for `data`.
pub fn conditional_variances(params: &GarchParams, data: &[f64]) -> Result<Vec<f64>> {
    if !params.is_valid() {
        return Err(Error::InvalidInput(format!(
            "GARCH parameters violate constraints: {params:?}"
        )));
    }
    if data.is_empty() {
        return Ok(Vec::new());
    }
    let backcast = data.iter().map(|x| (x - params.mu).powi(2)).sum::<f64>() / data.len() as f64;
    let mut out = Vec::with_capacity(data.len());
    let mut var = params.omega + params.persistence() * backcast;
    out.push(var);
    for x in &data[..data.len() - 1] {
        let eps = x - params.mu;
        var = params.omega + params.alpha * eps * eps + params.beta * var;
        out.push(var);
    }
    if let Some(v) = out.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::Numerical(format!("conditional variance {v}")));
    }
    Ok(out)
}

/// Gaussian quasi log-likelihood of a GARCH(1,1) with constant mean.
pub fn garch_loglik(params: &GarchParams, data: &[f64]) -> Result<f64> {
    let vars = conditional_variances(params, data)?;
    let half_log_2pi = 0.5 * (2.0 * PI).ln();
    let ll: f64 = data
        .iter()
        .zip(&vars)
        .map(|(x, v)| {
            let eps = x - params.mu;
            -half_log_2pi - 0.5 * v.ln() - eps * eps / (2.0 * v)
        })
        .sum();
    if ll.is_finite() {
        Ok(ll)
    } else {
        Err(Error::Numerical(format!("log-likelihood {ll}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GarchFitOptions {
    pub optimizer: NelderMeadOptions,
    /// Shorter series are refused.
    pub min_len: usize,
    /// A fitted persistence above `1 - boundary_tolerance` is flagged.
    pub boundary_tolerance: f64,
}

impl Default for GarchFitOptions {
    fn default() -> Self {
        Self {
            optimizer: NelderMeadOptions::default(),
            min_len: 50,
            boundary_tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchFit {
    pub params: GarchParams,
    pub loglik: f64,
    pub dates: Vec<NaiveDate>,
    pub cond_var: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl GarchFit {
    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }
}

/// The starting point of the optimizer: sample mean, 0.1 of the sample
/// variance, alpha = 0.1, beta = 0.8.
pub fn standard_initial_params(data: &[f64]) -> GarchParams {
    let (mean, var) = mean_var(data);
    GarchParams {
        mu: mean,
        omega: 0.1 * var,
        alpha: 0.1,
        beta: 0.8,
    }
}

fn mean_var(data: &[f64]) -> (f64, f64) {
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let var = data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Unconstrained coordinates: (mu - mean)/sd, log(omega/var), logit(alpha +
/// beta), logit(alpha / (alpha + beta)).
struct Reparam {
    mean: f64,
    var: f64,
}

impl Reparam {
    fn to_params(&self, x: &[f64]) -> GarchParams {
        let persistence = logistic(x[2]);
        let share = logistic(x[3]);
        GarchParams {
            mu: self.mean + self.var.sqrt() * x[0],
            omega: self.var * x[1].exp(),
            alpha: persistence * share,
            beta: persistence * (1.0 - share),
        }
    }

    fn unconstrained(&self, p: &GarchParams) -> Vec<f64> {
        let persistence = p.persistence();
        vec![
            (p.mu - self.mean) / self.var.sqrt(),
            (p.omega / self.var).ln(),
            logit(persistence),
            logit(p.alpha / persistence),
        ]
    }
}

/// Fits the filter and standardizes the returns by the fitted volatility.
pub fn fit_garch11(returns: &ReturnSeries, opts: &GarchFitOptions) -> Result<GarchFit> {
    let data = &returns.values;
    if data.len() < opts.min_len {
        return Err(Error::TooShort {
            required: opts.min_len,
            actual: data.len(),
        });
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite return".into()));
    }
    let (mean, var) = mean_var(data);
    if var.is_nan() || var <= 0.0 {
        return Err(Error::InvalidInput(
            "returns have zero variance; nothing to filter".into(),
        ));
    }

    let reparam = Reparam { mean, var };
    let start = standard_initial_params(data);
    let objective = |x: &[f64]| {
        let p = reparam.to_params(x);
        match garch_loglik(&p, data) {
            Ok(ll) => -ll,
            Err(_) => f64::INFINITY,
        }
    };
    let min = nelder_mead(objective, &reparam.unconstrained(&start), &opts.optimizer);
    if !min.converged {
        return Err(Error::NonConvergence {
            iterations: min.iterations,
        });
    }

    let params = reparam.to_params(&min.x);
    let cond_var = conditional_variances(&params, data)?;
    let loglik = garch_loglik(&params, data)?;
    let residuals = data
        .iter()
        .zip(&cond_var)
        .map(|(x, v)| (x - params.mu) / v.sqrt())
        .collect();

    let mut warnings = Vec::new();
    if params.persistence() > 1.0 - opts.boundary_tolerance {
        let msg = format!(
            "alpha + beta = {:.6} is at the stationarity boundary",
            params.persistence()
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }

    Ok(GarchFit {
        params,
        loglik,
        dates: returns.dates.clone(),
        cond_var,
        residuals,
        iterations: min.iterations,
        warnings,
    })
}

/// Standardized residuals of two assets on their common dates.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualPairs {
    pub dates: Vec<NaiveDate>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

impl ResidualPairs {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

pub fn align_pairs(a: &GarchFit, b: &GarchFit) -> Result<ResidualPairs> {
    if a.residuals.is_empty() || b.residuals.is_empty() {
        return Err(Error::InvalidInput("cannot align an empty fit".into()));
    }
    let mut out = ResidualPairs {
        dates: Vec::new(),
        first: Vec::new(),
        second: Vec::new(),
    };
    let (mut i, mut j) = (0, 0);
    while i < a.dates.len() && j < b.dates.len() {
        match a.dates[i].cmp(&b.dates[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.dates.push(a.dates[i]);
                out.first.push(a.residuals[i]);
                out.second.push(b.residuals[j]);
                i += 1;
                j += 1;
            }
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    Ok(out)
}
