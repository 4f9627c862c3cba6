//! Componentwise adaptive Metropolis–Hastings over `(theta1, theta2, tau)`.
//!
//! Each iteration updates three blocks in turn: the regime-one weights, the
//! regime-two weights, then the change-point. Weight moves shift three
//! coordinates `(i, j, k)` along `(j - k, k - i, i - j)`, which leaves both
//! `sum theta` and `sum i theta_i` unchanged, so every proposal satisfies the
//! equality constraints and only nonnegativity can fail (such proposals are
//! rejected). The change-point moves with a normal proposal truncated to
//! `(0, T)`, with the matching Hastings correction.
//!
//! Step sizes adapt on the log scale in batches during burn-in only, by
//! `±min(0.01, n^{-1/2})` after batch `n`, towards the target acceptance rate.

use std::io::{BufRead, Write};
use std::path::Path;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::angular::{uniform_weights, BernsteinWeights, MIN_ORDER};
use crate::changepoint::ChangePointModel;
use crate::error::{Error, Result};
use crate::margins::AngularSample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub batch_size: usize,
    pub target_accept: f64,
    pub seed: u64,
    /// Initial weight step; defaults to `1 / (2 (J - 1))`.
    pub initial_weight_step: Option<f64>,
    /// Initial change-point step; defaults to `T / 20`.
    pub initial_tau_step: Option<f64>,
    /// Holds `tau` at this value instead of sampling it. `tau >= T` fits a
    /// single regime.
    pub fixed_tau: Option<f64>,
    /// Consecutive rejections in one block that trigger a warning.
    pub stall_warning: usize,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            iterations: 15_000,
            burn_in: 5_000,
            thin: 10,
            batch_size: 50,
            target_accept: 0.44,
            seed: 0,
            initial_weight_step: None,
            initial_tau_step: None,
            fixed_tau: None,
            stall_warning: 1_000,
        }
    }
}

impl ChainConfig {
    /// Number of retained draws `(iterations - burn_in) / thin`.
    pub fn retained(&self) -> usize {
        self.iterations.saturating_sub(self.burn_in) / self.thin.max(1)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidInput(format!("chain config: {m}")));
        if self.burn_in >= self.iterations {
            return fail("burn-in must be shorter than the chain");
        }
        if self.thin == 0 {
            return fail("thinning must be at least 1");
        }
        if self.batch_size == 0 {
            return fail("batch size must be at least 1");
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return fail("target acceptance must lie in (0,1)");
        }
        for step in [self.initial_weight_step, self.initial_tau_step].into_iter().flatten() {
            if !(step > 0.0 && step.is_finite()) {
                return fail("initial steps must be positive");
            }
        }
        if let Some(t) = self.fixed_tau {
            if !(t > 0.0 && t.is_finite()) {
                return fail("fixed tau must be positive");
            }
        }
        Ok(())
    }
}

/// Log-scale random-walk step with batch acceptance counters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveScale {
    pub log_step: f64,
    pub batch_accepts: usize,
    pub batch_trials: usize,
    /// Number of completed adaptation batches.
    pub batch_index: usize,
}

impl AdaptiveScale {
    pub fn new(step: f64) -> Self {
        Self {
            log_step: step.ln(),
            batch_accepts: 0,
            batch_trials: 0,
            batch_index: 0,
        }
    }

    pub fn step(&self) -> f64 {
        self.log_step.exp()
    }

    pub fn record(&mut self, accepted: bool) {
        self.batch_trials += 1;
        if accepted {
            self.batch_accepts += 1;
        }
    }

    pub fn batch_rate(&self) -> f64 {
        if self.batch_trials == 0 {
            0.0
        } else {
            self.batch_accepts as f64 / self.batch_trials as f64
        }
    }
}

/// Adaptation amount after batch `n`: `min(0.01, n^{-1/2})`.
pub fn adaptation_increment(batch: usize) -> f64 {
    0.01f64.min(1.0 / (batch.max(1) as f64).sqrt())
}

/// Moves the log step up when the batch acceptance rate is strictly above
/// `target`, down otherwise, and starts a new batch.
pub fn adapt_scale(scale: &AdaptiveScale, rate: f64, batch: usize, target: f64) -> AdaptiveScale {
    let delta = adaptation_increment(batch);
    let log_step = if rate > target {
        scale.log_step + delta
    } else {
        scale.log_step - delta
    };
    AdaptiveScale {
        log_step,
        batch_accepts: 0,
        batch_trials: 0,
        batch_index: batch,
    }
}

/// Unit vector along `(j - k, k - i, i - j)`: zero sum and zero first moment
/// over indices `(i, j, k)`.
pub fn nullspace_direction(i: usize, j: usize, k: usize) -> Result<[f64; 3]> {
    if i == j || j == k || i == k {
        return Err(Error::InvalidInput(format!(
            "indices ({i}, {j}, {k}) are not distinct"
        )));
    }
    let (i, j, k) = (i as f64, j as f64, k as f64);
    let d = [j - k, k - i, i - j];
    let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(d.map(|x| x / norm))
}

/// A proposed shift of three weights, by component index `1..J-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightMove {
    pub components: [usize; 3],
    pub deltas: [f64; 3],
}

impl WeightMove {
    pub fn draw<R: Rng + ?Sized>(order: usize, step: f64, rng: &mut R) -> Self {
        let picked = sample_indices(rng, order - 1, 3);
        let components = [picked.index(0) + 1, picked.index(1) + 1, picked.index(2) + 1];
        let dir = nullspace_direction(components[0], components[1], components[2])
            .expect("sampled without replacement");
        let z: f64 = StandardNormal.sample(rng);
        let eps = step * z;
        Self {
            components,
            deltas: dir.map(|d| eps * d),
        }
    }

    /// The three new coordinate values, or `None` if any would be negative.
    fn new_values(&self, theta: &[f64]) -> Option<[f64; 3]> {
        let mut out = [0.0; 3];
        for ((o, &c), &d) in out.iter_mut().zip(&self.components).zip(&self.deltas) {
            *o = theta[c - 1] + d;
            if *o < 0.0 {
                return None;
            }
        }
        Some(out)
    }

    pub fn apply(&self, theta: &[f64]) -> Vec<f64> {
        let mut out = theta.to_vec();
        for (&c, &d) in self.components.iter().zip(&self.deltas) {
            out[c - 1] += d;
        }
        out
    }
}

/// Random null-space move of a uniformly chosen triple with normal step
/// `N(0, step^2)`. The result may have negative weights; it is never clipped.
pub fn propose_weights<R: Rng + ?Sized>(
    wts: &BernsteinWeights,
    scale: &AdaptiveScale,
    rng: &mut R,
) -> BernsteinWeights {
    let mv = WeightMove::draw(wts.order(), scale.step(), rng);
    wts.with_theta(mv.apply(wts.theta()))
        .expect("same shape, finite values")
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `log P(0 < N(tau, s^2) < T)`.
fn log_truncation_mass(tau: f64, step: f64, horizon: f64) -> f64 {
    // 1 - Phi(-tau/s) - Phi(-(T - tau)/s), both tails evaluated directly
    let lower = std_normal_cdf(-tau / step);
    let upper = std_normal_cdf(-(horizon - tau) / step);
    (1.0 - lower - upper).ln()
}

/// `log q(tau | tau') - log q(tau' | tau)` for the truncated normal proposal.
pub fn tau_hastings_correction(tau: f64, proposal: f64, step: f64, horizon: f64) -> f64 {
    log_truncation_mass(tau, step, horizon) - log_truncation_mass(proposal, step, horizon)
}

/// Draws `tau'` from `N(tau, step^2)` truncated to `(0, T)` by inversion and
/// returns it with the log Hastings correction.
pub fn propose_tau<R: Rng + ?Sized>(
    tau: f64,
    scale: &AdaptiveScale,
    horizon: f64,
    rng: &mut R,
) -> (f64, f64) {
    let step = scale.step();
    let std = Normal::standard();
    let lo = std_normal_cdf(-tau / step);
    let hi = std_normal_cdf((horizon - tau) / step);
    let proposal = loop {
        let u: f64 = rng.random();
        let p = lo + u * (hi - lo);
        let candidate = tau + step * std.inverse_cdf(p);
        if candidate > 0.0 && candidate < horizon {
            break candidate;
        }
    };
    (
        proposal,
        tau_hastings_correction(tau, proposal, step, horizon),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    Theta1,
    Theta2,
    Tau,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockStats {
    pub block: Block,
    pub proposed: usize,
    pub accepted: usize,
    /// Acceptance rate of each adaptation batch during burn-in.
    pub burn_in_batch_rates: Vec<f64>,
    /// Acceptance rate after burn-in.
    pub sampling_rate: f64,
    pub final_step: f64,
    pub longest_rejection_run: usize,
}

impl BlockStats {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}

/// Retained draws with the acceptance flags of the iteration they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorDraws {
    pub draws: Vec<ChangePointModel>,
    /// `[theta1, theta2, tau]` acceptance at each retained iteration.
    pub accept_flags: Vec<[bool; 3]>,
    pub stats: Vec<BlockStats>,
    pub config: ChainConfig,
    pub warnings: Vec<String>,
}

impl PosteriorDraws {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn taus(&self) -> Vec<f64> {
        self.draws.iter().map(|m| m.tau).collect()
    }

    pub fn stats_for(&self, block: Block) -> Option<&BlockStats> {
        self.stats.iter().find(|s| s.block == block)
    }

    /// Concatenates chains run with the same order and horizon.
    pub fn concat(chains: Vec<PosteriorDraws>) -> Result<PosteriorDraws> {
        let mut iter = chains.into_iter();
        let mut out = iter
            .next()
            .ok_or_else(|| Error::InvalidInput("no chains to merge".into()))?;
        for c in iter {
            out.draws.extend(c.draws);
            out.accept_flags.extend(c.accept_flags);
            out.stats.extend(c.stats);
            out.warnings.extend(c.warnings);
        }
        Ok(out)
    }

    /// One JSON model per line.
    pub fn write_jsonl(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        for m in &self.draws {
            serde_json::to_writer(&mut w, m)?;
            w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    pub fn read_jsonl(path: impl AsRef<Path>) -> Result<Vec<ChangePointModel>> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut out = Vec::new();
        for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let m: ChangePointModel = serde_json::from_str(&line).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
            out.push(m);
        }
        Ok(out)
    }

    /// `k,tau,accept_theta1,accept_theta2,accept_tau` rows.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["k", "tau", "accept_theta1", "accept_theta2", "accept_tau"])?;
        for (k, (m, flags)) in self.draws.iter().zip(&self.accept_flags).enumerate() {
            w.write_record([
                (k + 1).to_string(),
                m.tau.to_string(),
                u8::from(flags[0]).to_string(),
                u8::from(flags[1]).to_string(),
                u8::from(flags[2]).to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    pub fn write_diagnostics(&self, path: impl AsRef<Path>) -> Result<()> {
        #[derive(Serialize)]
        struct Diagnostics<'a> {
            retained: usize,
            blocks: &'a [BlockStats],
            warnings: &'a [String],
            config: &'a ChainConfig,
        }
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        serde_json::to_writer_pretty(
            std::io::BufWriter::new(file),
            &Diagnostics {
                retained: self.draws.len(),
                blocks: &self.stats,
                warnings: &self.warnings,
                config: &self.config,
            },
        )?;
        Ok(())
    }
}

/// Read-only view of the chain state handed to observers.
#[derive(Debug, Clone, Copy)]
pub struct ChainState<'a> {
    pub iteration: usize,
    pub theta1: &'a [f64],
    pub theta2: &'a [f64],
    pub tau: f64,
}

/// Per-regime weights with cached densities at every observed angle.
struct RegimeBlock {
    theta: Vec<f64>,
    /// `density[i]` and its log at observation `i`.
    density: Vec<f64>,
    log_density: Vec<f64>,
    scale: AdaptiveScale,
    tracker: Tracker,
}

#[derive(Default)]
struct Tracker {
    proposed: usize,
    accepted: usize,
    sampling_proposed: usize,
    sampling_accepted: usize,
    batch_rates: Vec<f64>,
    rejection_run: usize,
    longest_rejection_run: usize,
    warned: bool,
}

impl Tracker {
    fn record(&mut self, accepted: bool, sampling: bool) {
        self.proposed += 1;
        if sampling {
            self.sampling_proposed += 1;
        }
        if accepted {
            self.accepted += 1;
            if sampling {
                self.sampling_accepted += 1;
            }
            self.rejection_run = 0;
        } else {
            self.rejection_run += 1;
            self.longest_rejection_run = self.longest_rejection_run.max(self.rejection_run);
        }
    }

    fn finish(self, block: Block, scale: &AdaptiveScale) -> BlockStats {
        BlockStats {
            block,
            proposed: self.proposed,
            accepted: self.accepted,
            burn_in_batch_rates: self.batch_rates,
            sampling_rate: if self.sampling_proposed == 0 {
                0.0
            } else {
                self.sampling_accepted as f64 / self.sampling_proposed as f64
            },
            final_step: scale.step(),
            longest_rejection_run: self.longest_rejection_run,
        }
    }
}

/// Row-major `n x (J - 1)` table of component densities at the observed angles.
struct Basis {
    columns: usize,
    values: Vec<f64>,
}

impl Basis {
    fn new(order: usize, angles: &[f64]) -> Result<Self> {
        let proto = uniform_weights(order)?;
        let columns = order - 1;
        let mut values = vec![0.0; angles.len() * columns];
        for (row, &w) in values.chunks_mut(columns).zip(angles) {
            proto.basis_into(w, row);
        }
        Ok(Self { columns, values })
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.columns..(i + 1) * self.columns]
    }

    fn at(&self, i: usize, component: usize) -> f64 {
        self.values[i * self.columns + component - 1]
    }
}

impl RegimeBlock {
    fn new(theta: Vec<f64>, basis: &Basis, n: usize, step: f64) -> Self {
        let mut block = RegimeBlock {
            theta,
            density: vec![0.0; n],
            log_density: vec![0.0; n],
            scale: AdaptiveScale::new(step),
            tracker: Tracker::default(),
        };
        block.refresh(basis);
        block
    }

    /// Recomputes the cached densities from scratch.
    fn refresh(&mut self, basis: &Basis) {
        for i in 0..self.density.len() {
            let h: f64 = basis.row(i).iter().zip(&self.theta).map(|(b, t)| b * t).sum();
            self.density[i] = h;
            self.log_density[i] = h.ln();
        }
    }

    /// One Metropolis step on observations `range`; returns acceptance.
    fn update<R: Rng>(
        &mut self,
        basis: &Basis,
        range: std::ops::Range<usize>,
        rng: &mut R,
        scratch: &mut Vec<f64>,
    ) -> bool {
        let order = self.theta.len() + 1;
        let mv = WeightMove::draw(order, self.scale.step(), rng);
        let u: f64 = rng.random();
        let Some(new_values) = mv.new_values(&self.theta) else {
            return false;
        };
        let shift = |i: usize| -> f64 {
            mv.components
                .iter()
                .zip(&mv.deltas)
                .map(|(&c, &d)| d * basis.at(i, c))
                .sum()
        };

        scratch.clear();
        let mut delta = 0.0;
        for i in range.clone() {
            let h = self.density[i] + shift(i);
            if h.is_nan() || h <= 0.0 {
                return false;
            }
            let lh = h.ln();
            delta += lh - self.log_density[i];
            scratch.push(h);
        }
        let accepted = u.ln() < delta;
        if !accepted {
            return false;
        }

        for (&c, v) in mv.components.iter().zip(new_values) {
            self.theta[c - 1] = v;
        }
        for i in 0..self.density.len() {
            let h = if range.contains(&i) {
                scratch[i - range.start]
            } else {
                self.density[i] + shift(i)
            };
            self.density[i] = h;
            self.log_density[i] = h.ln();
        }
        true
    }
}

/// Log-likelihood change of moving the split from `tau` to `proposal`, given
/// the number of observations at or before each.
fn tau_log_ratio(lh1: &[f64], lh2: &[f64], split: usize, new_split: usize) -> f64 {
    // observations between the splits change regime
    if new_split > split {
        (split..new_split).map(|i| lh1[i] - lh2[i]).sum()
    } else {
        (new_split..split).map(|i| lh2[i] - lh1[i]).sum()
    }
}

/// Runs the sampler from `theta1 = theta2 = uniform`, `tau = T / 2`.
pub fn run_chain(data: &AngularSample, order: usize, cfg: &ChainConfig) -> Result<PosteriorDraws> {
    run_chain_observed(data, order, cfg, |_| {})
}

/// As [`run_chain`], calling `observe` with the state after every iteration.
pub fn run_chain_observed<F>(
    data: &AngularSample,
    order: usize,
    cfg: &ChainConfig,
    observe: F,
) -> Result<PosteriorDraws>
where
    F: FnMut(ChainState<'_>),
{
    run(data, order, cfg, true, observe)
}

fn run<F>(
    data: &AngularSample,
    order: usize,
    cfg: &ChainConfig,
    hastings: bool,
    mut observe: F,
) -> Result<PosteriorDraws>
where
    F: FnMut(ChainState<'_>),
{
    cfg.validate()?;
    data.validate()?;
    if data.is_empty() {
        return Err(Error::InvalidInput("no exceedances to fit".into()));
    }
    if order < MIN_ORDER {
        return Err(Error::InvalidInput(format!(
            "Bernstein order {order} is below the minimum {MIN_ORDER}"
        )));
    }
    if data.horizon == 0 {
        return Err(Error::InvalidInput("horizon is zero".into()));
    }

    let n = data.len();
    let horizon = data.horizon as f64;
    let basis = Basis::new(order, &data.angles)?;
    let start = uniform_weights(order)?;
    let weight_step = cfg
        .initial_weight_step
        .unwrap_or(0.5 / (order - 1) as f64);
    let mut blocks = [
        RegimeBlock::new(start.theta().to_vec(), &basis, n, weight_step),
        RegimeBlock::new(start.theta().to_vec(), &basis, n, weight_step),
    ];
    if let Some(i) = blocks[0].log_density.iter().position(|l| !l.is_finite()) {
        return Err(Error::DensityUnderflow {
            angle: data.angles[i],
        });
    }

    let mut tau = cfg.fixed_tau.unwrap_or(horizon / 2.0);
    let sample_tau = cfg.fixed_tau.is_none();
    let mut tau_scale = AdaptiveScale::new(cfg.initial_tau_step.unwrap_or(horizon / 20.0));
    let mut tau_tracker = Tracker::default();
    let split_of = |tau: f64| data.times.partition_point(|&t| t as f64 <= tau);
    let mut split = split_of(tau);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut scratch = Vec::with_capacity(n);
    let mut draws = Vec::with_capacity(cfg.retained());
    let mut accept_flags = Vec::with_capacity(cfg.retained());
    let mut warnings = Vec::new();

    for iteration in 1..=cfg.iterations {
        let sampling = iteration > cfg.burn_in;
        let mut flags = [false; 3];

        for (r, block) in blocks.iter_mut().enumerate() {
            let range = if r == 0 { 0..split } else { split..n };
            let accepted = block.update(&basis, range, &mut rng, &mut scratch);
            block.scale.record(accepted);
            block.tracker.record(accepted, sampling);
            flags[r] = accepted;
        }

        if sample_tau {
            let (proposal, correction) = propose_tau(tau, &tau_scale, horizon, &mut rng);
            let u: f64 = rng.random();
            let new_split = split_of(proposal);
            let mut log_ratio = tau_log_ratio(
                &blocks[0].log_density,
                &blocks[1].log_density,
                split,
                new_split,
            );
            if hastings {
                log_ratio += correction;
            }
            let accepted = u.ln() < log_ratio;
            if accepted {
                tau = proposal;
                split = new_split;
            }
            tau_scale.record(accepted);
            tau_tracker.record(accepted, sampling);
            flags[2] = accepted;
        }

        let [b1, b2] = &mut blocks;
        for (name, tracker) in [
            ("theta1", &mut b1.tracker),
            ("theta2", &mut b2.tracker),
            ("tau", &mut tau_tracker),
        ] {
            if tracker.rejection_run >= cfg.stall_warning && !tracker.warned {
                tracker.warned = true;
                let msg = format!(
                    "{name}: {} consecutive rejections by iteration {iteration}",
                    tracker.rejection_run
                );
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }

        if iteration % cfg.batch_size == 0 {
            for block in blocks.iter_mut() {
                // keeps the incremental density updates from drifting
                block.refresh(&basis);
            }
            if iteration <= cfg.burn_in {
                let batch = iteration / cfg.batch_size;
                for block in blocks.iter_mut() {
                    let rate = block.scale.batch_rate();
                    block.tracker.batch_rates.push(rate);
                    block.scale = adapt_scale(&block.scale, rate, batch, cfg.target_accept);
                }
                if sample_tau {
                    let rate = tau_scale.batch_rate();
                    tau_tracker.batch_rates.push(rate);
                    tau_scale = adapt_scale(&tau_scale, rate, batch, cfg.target_accept);
                }
            }
        }

        observe(ChainState {
            iteration,
            theta1: &blocks[0].theta,
            theta2: &blocks[1].theta,
            tau,
        });

        if sampling && (iteration - cfg.burn_in) % cfg.thin == 0 {
            draws.push(ChangePointModel {
                theta1: start.with_theta(blocks[0].theta.clone())?,
                theta2: start.with_theta(blocks[1].theta.clone())?,
                tau,
                horizon: data.horizon,
            });
            accept_flags.push(flags);
        }
    }

    let [b1, b2] = blocks;
    let mut stats = vec![
        b1.tracker.finish(Block::Theta1, &b1.scale),
        b2.tracker.finish(Block::Theta2, &b2.scale),
    ];
    if sample_tau {
        stats.push(tau_tracker.finish(Block::Tau, &tau_scale));
    }
    Ok(PosteriorDraws {
        draws,
        accept_flags,
        stats,
        config: cfg.clone(),
        warnings,
    })
}
