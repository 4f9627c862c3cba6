//! Unit-Pareto margins, pseudo-polar coordinates and radial thresholding.

use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::ResidualPairs;

/// Rank-based probability integral transform to the unit-Pareto scale:
/// `1 / (1 - R_i / (n + 1))` with `R_i` the 1-based rank of value `i`.
/// Ties keep their original order.
pub fn rank_pareto_transform(values: &[f64]) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 2 {
        return Err(Error::TooShort {
            required: 2,
            actual: n,
        });
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("NaN in rank transform input".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    // sort_by is stable
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let denom = (n + 1) as f64;
    let mut out = vec![0.0; n];
    for (rank0, &idx) in order.iter().enumerate() {
        let rank = (rank0 + 1) as f64;
        out[idx] = 1.0 / (1.0 - rank / denom);
    }
    Ok(out)
}

/// A bivariate sample on unit-Pareto margins, indexed by observation time
/// `t = 1..=T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoPairs {
    pub times: Vec<usize>,
    pub dates: Option<Vec<NaiveDate>>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

impl ParetoPairs {
    pub fn from_residuals(pairs: &ResidualPairs) -> Result<Self> {
        Ok(Self {
            times: (1..=pairs.len()).collect(),
            dates: Some(pairs.dates.clone()),
            first: rank_pareto_transform(&pairs.first)?,
            second: rank_pareto_transform(&pairs.second)?,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Pseudo-angles `w = e1 / (e1 + e2)` and radii `r = e1 + e2` with their
/// observation times.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularSample {
    /// 1-based observation indices, strictly increasing.
    pub times: Vec<usize>,
    pub angles: Vec<f64>,
    pub radii: Vec<f64>,
    /// Total number of observations `T`, thresholded or not.
    pub horizon: usize,
    /// Smallest retained radius, once thresholded.
    pub threshold: Option<f64>,
    /// Quantile level used for thresholding.
    pub level: Option<f64>,
    /// Calendar date of every observation index `1..=T`, when known.
    pub calendar: Option<Vec<NaiveDate>>,
}

impl AngularSample {
    /// Checks the structural invariants: equal lengths, increasing times
    /// within `1..=T`, angles in the open unit interval and positive radii.
    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        if self.angles.len() != n || self.radii.len() != n {
            return Err(Error::InvalidInput(
                "times, angles and radii differ in length".into(),
            ));
        }
        if self.times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("times not strictly increasing".into()));
        }
        if self.times.first().is_some_and(|t| *t < 1)
            || self.times.last().is_some_and(|t| *t > self.horizon)
        {
            return Err(Error::InvalidInput(format!(
                "times outside 1..={}",
                self.horizon
            )));
        }
        if let Some(w) = self.angles.iter().find(|w| !(**w > 0.0 && **w < 1.0)) {
            return Err(Error::InvalidInput(format!("angle {w} outside (0,1)")));
        }
        if let Some(r) = self.radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidInput(format!("radius {r} is not positive")));
        }
        if let Some(cal) = &self.calendar {
            if cal.len() != self.horizon {
                return Err(Error::InvalidInput(format!(
                    "calendar has {} dates for horizon {}",
                    cal.len(),
                    self.horizon
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Date of observation index `t` (1-based).
    pub fn date_of(&self, t: usize) -> Option<NaiveDate> {
        let cal = self.calendar.as_ref()?;
        t.checked_sub(1).and_then(|i| cal.get(i)).copied()
    }

    /// Writes `t,date,w,r` rows to `csv_path` and the sidecar JSON next to it
    /// (same stem, `.json`).
    pub fn write(&self, csv_path: impl AsRef<Path>) -> Result<()> {
        let csv_path = csv_path.as_ref();
        let mut w = csv::Writer::from_path(csv_path)?;
        w.write_record(["t", "date", "w", "r"])?;
        for i in 0..self.len() {
            let t = self.times[i];
            let date = self.date_of(t).map(|d| d.to_string()).unwrap_or_default();
            w.write_record([
                t.to_string(),
                date,
                self.angles[i].to_string(),
                self.radii[i].to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(csv_path, e))?;

        let sidecar = SampleSidecar {
            horizon: self.horizon,
            threshold: self.threshold,
            q: self.level,
            calendar: self.calendar.clone(),
        };
        let side_path = sidecar_path(csv_path);
        let file = std::fs::File::create(&side_path).map_err(|e| Error::io(&side_path, e))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), &sidecar)?;
        Ok(())
    }

    /// Reads a sample written by [`AngularSample::write`]. Without a sidecar
    /// the horizon defaults to the largest time.
    pub fn read(csv_path: impl AsRef<Path>) -> Result<Self> {
        let csv_path = csv_path.as_ref();
        let file = std::fs::File::open(csv_path).map_err(|e| Error::io(csv_path, e))?;
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
        let mut times = Vec::new();
        let mut angles = Vec::new();
        let mut radii = Vec::new();
        for (i, rec) in reader.deserialize::<SampleRow>().enumerate() {
            let row = rec.map_err(|e| Error::Parse {
                path: csv_path.to_path_buf(),
                line: i + 2,
                message: e.to_string(),
            })?;
            times.push(row.t);
            angles.push(row.w);
            radii.push(row.r);
        }
        if times.is_empty() {
            return Err(Error::EmptyFile(csv_path.to_path_buf()));
        }

        let side_path = sidecar_path(csv_path);
        let sidecar: Option<SampleSidecar> = match std::fs::File::open(&side_path) {
            Ok(f) => Some(serde_json::from_reader(std::io::BufReader::new(f))?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
            Err(e) => return Err(Error::io(side_path, e)),
        };
        let horizon = sidecar
            .as_ref()
            .map_or_else(|| times.last().copied().unwrap_or(0), |s| s.horizon);
        let sample = AngularSample {
            times,
            angles,
            radii,
            horizon,
            threshold: sidecar.as_ref().and_then(|s| s.threshold),
            level: sidecar.as_ref().and_then(|s| s.q),
            calendar: sidecar.and_then(|s| s.calendar),
        };
        sample.validate()?;
        Ok(sample)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SampleSidecar {
    horizon: usize,
    threshold: Option<f64>,
    q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    calendar: Option<Vec<NaiveDate>>,
}

#[derive(Debug, Deserialize)]
struct SampleRow {
    t: usize,
    #[allow(dead_code)]
    date: Option<String>,
    w: f64,
    r: f64,
}

pub fn sidecar_path(csv_path: &Path) -> std::path::PathBuf {
    csv_path.with_extension("json")
}

pub fn make_angular_sample(pairs: &ParetoPairs) -> Result<AngularSample> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("no pairs".into()));
    }
    let (angles, radii) = pairs
        .first
        .iter()
        .zip(&pairs.second)
        .map(|(e1, e2)| {
            let r = e1 + e2;
            (e1 / r, r)
        })
        .unzip();
    let sample = AngularSample {
        times: pairs.times.clone(),
        angles,
        radii,
        horizon: pairs.len(),
        threshold: None,
        level: None,
        calendar: pairs.dates.clone(),
    };
    sample.validate()?;
    Ok(sample)
}

/// Number of exceedances kept at quantile level `q` out of `n` radii:
/// `ceil((1 - q) n)`.
pub fn exceedance_count(n: usize, q: f64) -> usize {
    let k = (1.0 - q) * n as f64;
    // absorb representation error such as (1 - 0.7) * 10 = 3.0000000000000004
    (k - 1e-9).ceil().max(0.0) as usize
}

/// Keeps the `ceil((1 - q) N)` observations with the largest radii, earlier
/// times winning ties. Re-applying the same level is a no-op.
pub fn threshold_exceedances(sample: &AngularSample, q: f64) -> Result<AngularSample> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidInput(format!("quantile level {q} outside (0,1)")));
    }
    if sample.level == Some(q) {
        return Ok(sample.clone());
    }
    let n = sample.len();
    let k = exceedance_count(n, q);
    if k == 0 {
        return Err(Error::InvalidInput(format!(
            "{n} observations are too few for level {q}: no exceedances"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        sample.radii[b]
            .total_cmp(&sample.radii[a])
            .then(sample.times[a].cmp(&sample.times[b]))
    });
    let mut keep = order[..k].to_vec();
    let threshold = keep
        .iter()
        .map(|&i| sample.radii[i])
        .fold(f64::INFINITY, f64::min);
    keep.sort_unstable();
    Ok(AngularSample {
        times: keep.iter().map(|&i| sample.times[i]).collect(),
        angles: keep.iter().map(|&i| sample.angles[i]).collect(),
        radii: keep.iter().map(|&i| sample.radii[i]).collect(),
        horizon: sample.horizon,
        threshold: Some(threshold),
        level: Some(q),
        calendar: sample.calendar.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_with_radii(radii: Vec<f64>) -> AngularSample {
        let n = radii.len();
        AngularSample {
            times: (1..=n).collect(),
            angles: vec![0.5; n],
            radii,
            horizon: n,
            threshold: None,
            level: None,
            calendar: None,
        }
    }

    #[test]
    fn hand_computed_ranks() {
        let v = rank_pareto_transform(&[0.3, -1.2, 2.5, 0.7]).unwrap();
        let expected = [5.0 / 3.0, 1.25, 5.0, 2.5];
        for (a, b) in v.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{v:?}");
        }
    }

    #[test]
    fn ties_ranked_in_original_order() {
        let v = rank_pareto_transform(&[1.0, 1.0, 0.0]).unwrap();
        // ranks (2, 3, 1) over n = 3
        assert_eq!(v, vec![2.0, 4.0, 1.0 / (1.0 - 0.25)]);
    }

    #[test]
    fn rank_transform_needs_two_values() {
        assert!(rank_pareto_transform(&[1.0]).is_err());
    }

    #[test]
    fn polar_coordinates() {
        let pairs = ParetoPairs {
            times: vec![1, 2],
            dates: None,
            first: vec![2.0, 3.0],
            second: vec![2.0, 1.0],
        };
        let s = make_angular_sample(&pairs).unwrap();
        assert_eq!(s.angles, vec![0.5, 0.75]);
        assert_eq!(s.radii, vec![4.0, 4.0]);
        assert_eq!(s.horizon, 2);
    }

    #[test]
    fn exceedance_count_for_1855_returns() {
        assert_eq!(exceedance_count(1855, 0.90), 186);
        assert_eq!(exceedance_count(1855, 0.95), 93);
        assert_eq!(exceedance_count(10, 0.7), 3);
    }

    #[test]
    fn top_one_and_median_split() {
        let s = sample_with_radii((1..=10).map(f64::from).collect());
        let top = threshold_exceedances(&s, 0.9).unwrap();
        assert_eq!(top.radii, vec![10.0]);
        assert_eq!(top.threshold, Some(10.0));
        assert_eq!(top.horizon, 10);

        let half = threshold_exceedances(&s, 0.5).unwrap();
        assert_eq!(half.radii, vec![6.0, 7.0, 8.0, 9.0, 10.0]);
        assert_eq!(half.times, vec![6, 7, 8, 9, 10]);
    }

    #[test]
    fn ties_prefer_earlier_times() {
        let s = sample_with_radii(vec![5.0, 1.0, 5.0, 5.0]);
        let kept = threshold_exceedances(&s, 0.5).unwrap();
        assert_eq!(kept.times, vec![1, 3]);
    }

    #[test]
    fn too_small_for_level() {
        let s = sample_with_radii(vec![1.0, 2.0]);
        assert!(threshold_exceedances(&s, 0.9999).is_ok());
        assert!(threshold_exceedances(&s, 1.0).is_err());
        let empty = sample_with_radii(vec![]);
        assert!(threshold_exceedances(&empty, 0.9).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let d0 = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        let s = AngularSample {
            times: vec![2, 3],
            angles: vec![0.25, 0.8],
            radii: vec![12.5, 30.0],
            horizon: 3,
            threshold: Some(12.5),
            level: Some(0.5),
            calendar: Some(vec![d0, d0.succ_opt().unwrap(), d0 + chrono::Days::new(2)]),
        };
        let path = dir.path().join("angles.csv");
        s.write(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("t,date,w,r\n2,2020-01-02,0.25,12.5\n"), "{text}");
        assert_eq!(AngularSample::read(&path).unwrap(), s);
    }

    proptest! {
        #[test]
        fn rank_outputs_are_the_pareto_grid(v in prop::collection::vec(-1e6f64..1e6, 2..60)) {
            let n = v.len();
            let mut out = rank_pareto_transform(&v).unwrap();
            out.sort_by(f64::total_cmp);
            for (k, x) in out.iter().enumerate() {
                let expected = 1.0 / (1.0 - (k + 1) as f64 / (n + 1) as f64);
                prop_assert_eq!(*x, expected);
            }
        }

        #[test]
        fn ranks_invariant_to_monotone_maps(v in prop::collection::vec(-5f64..5.0, 2..60)) {
            let mapped: Vec<f64> = v.iter().map(|x| x.exp() * 3.0 + 1.0).collect();
            prop_assert_eq!(rank_pareto_transform(&v).unwrap(), rank_pareto_transform(&mapped).unwrap());
        }

        #[test]
        fn polar_identities(e1 in prop::collection::vec(1.0f64..1e4, 1..40), seed in 0u64..1000) {
            let e2: Vec<f64> = e1.iter().enumerate().map(|(i, x)| 1.0 + ((x * (i as f64 + seed as f64 + 1.0)) % 500.0)).collect();
            let pairs = ParetoPairs { times: (1..=e1.len()).collect(), dates: None, first: e1.clone(), second: e2.clone() };
            let s = make_angular_sample(&pairs).unwrap();
            for i in 0..e1.len() {
                prop_assert!(s.angles[i] > 0.0 && s.angles[i] < 1.0);
                prop_assert!((s.angles[i] * s.radii[i] - e1[i]).abs() <= 1e-12 * e1[i]);
                prop_assert!(((1.0 - s.angles[i]) * s.radii[i] - e2[i]).abs() <= 1e-12 * s.radii[i]);
            }
        }

        #[test]
        fn thresholding_keeps_largest_and_is_idempotent(
            radii in prop::collection::vec(1.0f64..100.0, 1..200),
            q in 0.05f64..0.95,
        ) {
            let s = sample_with_radii(radii);
            let k = exceedance_count(s.len(), q);
            prop_assume!(k > 0);
            let once = threshold_exceedances(&s, q).unwrap();
            prop_assert_eq!(once.len(), k);
            let min_kept = once.radii.iter().cloned().fold(f64::INFINITY, f64::min);
            for (t, r) in s.times.iter().zip(&s.radii) {
                if !once.times.contains(t) {
                    prop_assert!(*r <= min_kept);
                }
            }
            prop_assert!(once.times.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(threshold_exceedances(&once, q).unwrap(), once);
        }
    }
}
