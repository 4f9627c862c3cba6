use std::path::{Path, PathBuf};

use bevcp::margins::sidecar_path;
use bevcp::mcmc::PosteriorDraws;
use bevcp::summary::{export_plot_data, ExportOptions, RunSummary};
use bevcp::{
    align_pairs, fit_garch11, load_price_csv, make_angular_sample, negative_log_returns, run_chain,
    simulate_changepoint_angles, threshold_exceedances, AngularSample, ChainConfig, GarchFit,
    GarchFitOptions, ParetoPairs, SyntheticSpec,
};
use rayon::prelude::*;

use crate::args::{RunConfig, SummarizeArgs};
use crate::{CliError, CliResult};

fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| {
        CliError::Core(bevcp::Error::Io {
            path: dir.to_path_buf(),
            source: e,
        })
    })
}

pub struct Prepared {
    pub fit_a: GarchFit,
    pub fit_b: GarchFit,
    /// Thresholded pseudo-angles.
    pub sample: AngularSample,
}

/// Loads both price files, filters each through GARCH(1,1), pairs the
/// residuals on common dates and keeps the exceedances at level `q`.
pub fn prepare(prices_a: &Path, prices_b: &Path, q: f64) -> CliResult<Prepared> {
    let opts = GarchFitOptions::default();
    let fit = |p: &Path| -> CliResult<GarchFit> {
        let returns = negative_log_returns(&load_price_csv(p)?)?;
        let fit = fit_garch11(&returns, &opts)?;
        for w in &fit.warnings {
            log::warn!("{}: {w}", p.display());
        }
        Ok(fit)
    };
    let fit_a = fit(prices_a)?;
    let fit_b = fit(prices_b)?;
    let pairs = align_pairs(&fit_a, &fit_b)?;
    let all = make_angular_sample(&ParetoPairs::from_residuals(&pairs)?)?;
    let sample = threshold_exceedances(&all, q)?;
    Ok(Prepared {
        fit_a,
        fit_b,
        sample,
    })
}

fn required(path: &Option<PathBuf>, flag: &str) -> CliResult<PathBuf> {
    path.clone()
        .ok_or_else(|| CliError::Usage(format!("missing {flag}")))
}

/// Writes `garch_a.json`, `garch_b.json` and `angles.csv` with its sidecar.
pub fn cmd_pipeline(cfg: &RunConfig) -> CliResult<AngularSample> {
    let a = required(&cfg.prices_a, "--prices-a")?;
    let b = required(&cfg.prices_b, "--prices-b")?;
    let prepared = prepare(&a, &b, cfg.q)?;
    create_dir(&cfg.out)?;
    prepared.fit_a.write_json(cfg.out.join("garch_a.json"))?;
    prepared.fit_b.write_json(cfg.out.join("garch_b.json"))?;
    let angles = cfg.out.join("angles.csv");
    prepared.sample.write(&angles)?;
    let s = &prepared.sample;
    println!(
        "N = {}  T = {}  threshold = {:.6}",
        s.len(),
        s.horizon,
        s.threshold.unwrap_or(f64::NAN)
    );
    log::info!("wrote {} and {}", angles.display(), sidecar_path(&angles).display());
    Ok(prepared.sample)
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        log::info!("no seed given; using {s}");
        s
    })
}

/// Runs `chains` chains in parallel with seeds `seed, seed + 1, ...` and
/// concatenates their draws in chain order.
pub fn run_chains(
    data: &AngularSample,
    order: usize,
    chain: &ChainConfig,
    chains: usize,
) -> CliResult<PosteriorDraws> {
    let runs: Vec<PosteriorDraws> = (0..chains as u64)
        .into_par_iter()
        .map(|i| {
            let cfg = ChainConfig {
                seed: chain.seed.wrapping_add(i),
                ..chain.clone()
            };
            run_chain(data, order, &cfg)
        })
        .collect::<bevcp::Result<_>>()?;
    Ok(PosteriorDraws::concat(runs)?)
}

/// Samples the change-point model on the angles file and writes
/// `draws.jsonl`, `draws.csv`, `diagnostics.json`, the plot data and
/// `summary.json` into the output directory.
pub fn cmd_fit(cfg: &RunConfig) -> CliResult<RunSummary> {
    let angles = cfg.angles_path();
    let sample = AngularSample::read(&angles)?;
    let order = cfg.order.resolve(sample.len());
    log::info!("N = {} exceedances, J = {order} ({})", sample.len(), cfg.order);
    let seed = resolve_seed(cfg.seed);
    let chain = ChainConfig {
        seed,
        ..cfg.chain.clone()
    };

    let draws = run_chains(&sample, order, &chain, cfg.chains)?;
    create_dir(&cfg.out)?;
    draws.write_jsonl(cfg.out.join("draws.jsonl"))?;
    draws.write_csv(cfg.out.join("draws.csv"))?;
    draws.write_diagnostics(cfg.out.join("diagnostics.json"))?;

    let pooled = if cfg.pooled {
        let single = ChainConfig {
            fixed_tau: Some(sample.horizon as f64),
            ..chain.clone()
        };
        let p = run_chains(&sample, order, &single, cfg.chains)?;
        p.write_jsonl(cfg.out.join("pooled_draws.jsonl"))?;
        Some(p)
    } else {
        None
    };

    let opts = ExportOptions {
        seed: Some(seed),
        chains: cfg.chains,
        ..Default::default()
    };
    let summary = export_plot_data(&sample, &draws, pooled.as_ref(), &opts, &cfg.out)?;
    print_summary(&summary);
    Ok(summary)
}

fn print_summary(s: &RunSummary) {
    let date = s.tau.date.map(|d| format!(" ({d})")).unwrap_or_default();
    println!(
        "tau = day {}{date}  {:.0}% interval [{:.1}, {:.1}]  K = {}  J = {}",
        s.tau.day,
        100.0 * s.interval_level,
        s.tau_interval.0,
        s.tau_interval.1,
        s.draws,
        s.order
    );
}

/// Writes the synthetic `angles.csv` and a `truth.json` echoing the settings.
pub fn cmd_simulate(spec_path: &Path, out: &Path) -> CliResult<AngularSample> {
    let spec = SyntheticSpec::read_json(spec_path)?;
    let sample = simulate_changepoint_angles(&spec)?;
    create_dir(out)?;
    sample.write(out.join("angles.csv"))?;
    let truth = out.join("truth.json");
    let mut text = serde_json::to_string_pretty(&spec).map_err(bevcp::Error::from)?;
    text.push('\n');
    std::fs::write(&truth, text).map_err(|e| bevcp::Error::Io {
        path: truth.clone(),
        source: e,
    })?;
    println!("N = {}  T = {}", sample.len(), sample.horizon);
    Ok(sample)
}

fn draws_from_file(path: &Path) -> CliResult<PosteriorDraws> {
    let draws = PosteriorDraws::read_jsonl(path)?;
    if draws.is_empty() {
        return Err(CliError::Usage(format!("{}: no draws", path.display())));
    }
    Ok(PosteriorDraws {
        accept_flags: vec![[false; 3]; draws.len()],
        draws,
        stats: Vec::new(),
        config: ChainConfig::default(),
        warnings: Vec::new(),
    })
}

/// Re-exports plot data and `summary.json` from saved draws.
pub fn cmd_summarize(args: &SummarizeArgs) -> CliResult<RunSummary> {
    let sample = AngularSample::read(&args.angles)?;
    let draws = draws_from_file(&args.draws)?;
    let pooled = args.pooled_draws.as_deref().map(draws_from_file).transpose()?;
    let opts = ExportOptions {
        bins: args.bins,
        interval_level: args.level,
        ..Default::default()
    };
    let summary = export_plot_data(&sample, &draws, pooled.as_ref(), &opts, &args.out)?;
    print_summary(&summary);
    Ok(summary)
}
