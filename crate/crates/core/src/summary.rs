//! Posterior summaries and plot-ready exports.

use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::angular::{density_grid, write_grid_csv, DEFAULT_GRID_POINTS};
use crate::changepoint::{regime_of, ChangePointModel, Regime};
use crate::error::{Error, Result};
use crate::margins::AngularSample;
use crate::mcmc::PosteriorDraws;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Regime1,
    Regime2,
    Pooled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: CurveKind,
}

impl DensityCurve {
    /// Trapezoid rule over the grid span.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.grid, &self.values)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_grid_csv(path, &self.grid, &self.values)
    }

    /// Reads a `w,h` CSV written by [`DensityCurve::write_csv`].
    pub fn read_csv(path: impl AsRef<Path>, kind: CurveKind) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::Reader::from_path(path)?;
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (i, rec) in reader.deserialize::<(f64, f64)>().enumerate() {
            let (w, h) = rec.map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                message: e.to_string(),
            })?;
            grid.push(w);
            values.push(h);
        }
        Ok(Self { grid, values, kind })
    }
}

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Pointwise posterior mean of the regime density over `draws`. `Pooled`
/// reads the first-regime weights of a single-regime fit.
pub fn predictive_density(
    draws: &[ChangePointModel],
    kind: CurveKind,
    grid: &[f64],
) -> Result<DensityCurve> {
    if draws.is_empty() {
        return Err(Error::InvalidInput("no posterior draws".into()));
    }
    if let Some(w) = grid.iter().find(|w| !(**w > 0.0 && **w < 1.0)) {
        return Err(Error::InvalidInput(format!("grid point {w} outside (0,1)")));
    }
    let regime = match kind {
        CurveKind::Regime2 => Regime::Second,
        CurveKind::Regime1 | CurveKind::Pooled => Regime::First,
    };
    let mut values = vec![0.0; grid.len()];
    for m in draws {
        let wts = m.weights_for(regime);
        for (v, &w) in values.iter_mut().zip(grid) {
            *v += wts.density(w);
        }
    }
    let k = draws.len() as f64;
    values.iter_mut().for_each(|v| *v /= k);
    Ok(DensityCurve {
        grid: grid.to_vec(),
        values,
        kind,
    })
}

/// Posterior mode of `tau` over unit-day bins `[d, d + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauEstimate {
    /// Last day of the first regime.
    pub day: usize,
    pub date: Option<NaiveDate>,
    /// Draws falling in the modal bin.
    pub count: usize,
}

/// Mode of the day histogram of `taus`, earliest day on ties, mapped through
/// the 1-based `calendar` when given.
pub fn tau_estimate(taus: &[f64], calendar: Option<&[NaiveDate]>) -> Result<TauEstimate> {
    if taus.is_empty() {
        return Err(Error::InvalidInput("no tau draws".into()));
    }
    if let Some(t) = taus.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::InvalidInput(format!("invalid tau draw {t}")));
    }
    let mut days: Vec<usize> = taus.iter().map(|t| t.floor() as usize).collect();
    days.sort_unstable();
    let (mut best_day, mut best_count) = (days[0], 0);
    let mut i = 0;
    while i < days.len() {
        let j = days[i..].partition_point(|d| *d == days[i]) + i;
        if j - i > best_count {
            best_day = days[i];
            best_count = j - i;
        }
        i = j;
    }
    let date = calendar.and_then(|c| best_day.checked_sub(1).and_then(|i| c.get(i)).copied());
    Ok(TauEstimate {
        day: best_day,
        date,
        count: best_count,
    })
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Central interval of the `tau` draws at `level`.
pub fn tau_interval(taus: &[f64], level: f64) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidInput(format!("level {level} outside (0,1)")));
    }
    if taus.len() < 2 {
        return Err(Error::TooShort {
            required: 2,
            actual: taus.len(),
        });
    }
    let mut sorted = taus.to_vec();
    sorted.sort_by(f64::total_cmp);
    let alpha = 1.0 - level;
    Ok((
        quantile_sorted(&sorted, alpha / 2.0),
        quantile_sorted(&sorted, 1.0 - alpha / 2.0),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    /// Equal-width bins over [0, 1].
    pub fn of_angles<'a>(angles: impl IntoIterator<Item = &'a f64>, bins: usize) -> Self {
        let mut counts = vec![0; bins];
        for &w in angles {
            let b = ((w * bins as f64).floor() as usize).min(bins - 1);
            counts[b] += 1;
        }
        let edges = (0..=bins).map(|k| k as f64 / bins as f64).collect();
        Self { edges, counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// `bin_lo,bin_hi,count` rows.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["bin_lo", "bin_hi", "count"])?;
        for (k, c) in self.counts.iter().enumerate() {
            w.write_record([
                self.edges[k].to_string(),
                self.edges[k + 1].to_string(),
                c.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportOptions {
    pub bins: usize,
    pub grid_points: usize,
    pub interval_level: f64,
    /// Seed recorded in the summary.
    pub seed: Option<u64>,
    pub chains: usize,
}

impl Default for ExportOptions {
    fn default() -> Self {
        Self {
            bins: 20,
            grid_points: DEFAULT_GRID_POINTS,
            interval_level: 0.95,
            seed: None,
            chains: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub tau: TauEstimate,
    pub tau_interval: (f64, f64),
    pub interval_level: f64,
    #[serde(rename = "K")]
    pub draws: usize,
    #[serde(rename = "J")]
    pub order: usize,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub exceedances: usize,
    /// Exceedances on each side of the estimated change-point.
    pub regime_counts: (usize, usize),
    pub threshold: Option<f64>,
    pub q: Option<f64>,
    pub seed: Option<u64>,
    pub chains: usize,
    pub pooled_fit: bool,
    pub acceptance: Vec<(String, f64)>,
    pub warnings: Vec<String>,
}

impl RunSummary {
    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// Minimum exceedances per regime before the split is flagged as thin.
pub const THIN_REGIME: usize = 5;

/// Writes histograms (whole period and both estimated regimes), predictive
/// density curves and `summary.json` into `out_dir`.
pub fn export_plot_data(
    sample: &AngularSample,
    draws: &PosteriorDraws,
    pooled: Option<&PosteriorDraws>,
    opts: &ExportOptions,
    out_dir: impl AsRef<Path>,
) -> Result<RunSummary> {
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    if opts.bins == 0 || opts.grid_points == 0 {
        return Err(Error::InvalidInput("bins and grid points must be positive".into()));
    }
    let first = draws
        .draws
        .first()
        .ok_or_else(|| Error::InvalidInput("no posterior draws".into()))?;

    let taus = draws.taus();
    let tau = tau_estimate(&taus, sample.calendar.as_deref())?;
    let interval = if taus.len() >= 2 {
        tau_interval(&taus, opts.interval_level)?
    } else {
        (taus[0], taus[0])
    };

    let split = tau.day as f64 + 0.5;
    let mut regime1 = Vec::new();
    let mut regime2 = Vec::new();
    for (&t, w) in sample.times.iter().zip(&sample.angles) {
        match regime_of(t, split) {
            Regime::First => regime1.push(w),
            Regime::Second => regime2.push(w),
        }
    }
    Histogram::of_angles(&sample.angles, opts.bins).write_csv(out_dir.join("hist_whole.csv"))?;
    Histogram::of_angles(regime1.iter().copied(), opts.bins)
        .write_csv(out_dir.join("hist_regime1.csv"))?;
    Histogram::of_angles(regime2.iter().copied(), opts.bins)
        .write_csv(out_dir.join("hist_regime2.csv"))?;

    let grid = density_grid(opts.grid_points);
    predictive_density(&draws.draws, CurveKind::Regime1, &grid)?
        .write_csv(out_dir.join("density_regime1.csv"))?;
    predictive_density(&draws.draws, CurveKind::Regime2, &grid)?
        .write_csv(out_dir.join("density_regime2.csv"))?;
    if let Some(p) = pooled {
        predictive_density(&p.draws, CurveKind::Pooled, &grid)?
            .write_csv(out_dir.join("density_regimepooled.csv"))?;
    }

    let mut warnings = draws.warnings.clone();
    for (name, n) in [("first", regime1.len()), ("second", regime2.len())] {
        if n < THIN_REGIME {
            let msg = format!("{name} estimated regime holds only {n} exceedances");
            log::warn!("{msg}");
            warnings.push(msg);
        }
    }

    let summary = RunSummary {
        tau,
        tau_interval: interval,
        interval_level: opts.interval_level,
        draws: draws.len(),
        order: first.order(),
        horizon: sample.horizon,
        exceedances: sample.len(),
        regime_counts: (regime1.len(), regime2.len()),
        threshold: sample.threshold,
        q: sample.level,
        seed: opts.seed,
        chains: opts.chains,
        pooled_fit: pooled.is_some(),
        acceptance: draws
            .stats
            .iter()
            .map(|s| (format!("{:?}", s.block).to_lowercase(), s.acceptance_rate()))
            .collect(),
        warnings,
    };
    summary.write_json(out_dir.join("summary.json"))?;
    Ok(summary)
}
