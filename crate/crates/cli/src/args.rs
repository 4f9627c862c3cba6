use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bevcp::ChainConfig;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

pub const DEFAULT_Q: f64 = 0.90;

#[derive(Debug, Parser)]
#[command(name = "bevcp", version, about = "Change-points in bivariate extremal dependence")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prices to GARCH fits and thresholded pseudo-angles.
    Pipeline(RunArgs),
    /// Posterior sampling on an angles file, then summaries and plot data.
    Fit(RunArgs),
    /// Synthetic angles with a planted change-point.
    Simulate(SimulateArgs),
    /// Recomputes summaries and plot data from saved draws.
    Summarize(SummarizeArgs),
}

/// Bernstein order: a fixed `J` or `max(4, floor(N / 2))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Order {
    #[default]
    Auto,
    Fixed(usize),
}

impl Order {
    pub fn resolve(self, exceedances: usize) -> usize {
        match self {
            Order::Auto => (exceedances / 2).max(bevcp::angular::MIN_ORDER),
            Order::Fixed(j) => j,
        }
    }
}

impl FromStr for Order {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Order::Auto);
        }
        let j: usize = s.parse().map_err(|_| format!("expected \"auto\" or an integer, got {s:?}"))?;
        if j < bevcp::angular::MIN_ORDER {
            return Err(format!("order must be at least {}", bevcp::angular::MIN_ORDER));
        }
        Ok(Order::Fixed(j))
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Auto => f.write_str("auto"),
            Order::Fixed(j) => write!(f, "{j}"),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Order::Auto => s.serialize_str("auto"),
            Order::Fixed(j) => s.serialize_u64(*j as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(usize),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Number(j) => j.to_string().parse(),
            Repr::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Flags shared by `pipeline` and `fit`. Each flag overrides the same field
/// of the `--config` file.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub prices_a: Option<PathBuf>,
    #[arg(long)]
    pub prices_b: Option<PathBuf>,
    /// Angles CSV consumed by `fit` [default: <out>/angles.csv].
    #[arg(long)]
    pub angles: Option<PathBuf>,
    /// Radial quantile level [default: 0.90].
    #[arg(long)]
    pub q: Option<f64>,
    /// Bernstein order, or "auto" [default: auto].
    #[arg(long)]
    pub order: Option<Order>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub burnin: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Independent chains run in parallel, seeded `seed + index`.
    #[arg(long)]
    pub chains: Option<usize>,
    /// Output directory [default: out].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Skip the single-regime refit.
    #[arg(long)]
    pub no_pooled: bool,
}

/// Everything a run needs, after merging flags over the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub prices_a: Option<PathBuf>,
    pub prices_b: Option<PathBuf>,
    pub angles: Option<PathBuf>,
    pub q: f64,
    pub order: Order,
    pub chain: ChainConfig,
    /// `None` draws a seed from system entropy.
    pub seed: Option<u64>,
    pub chains: usize,
    pub out: PathBuf,
    pub pooled: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            prices_a: None,
            prices_b: None,
            angles: None,
            q: DEFAULT_Q,
            order: Order::Auto,
            chain: ChainConfig::default(),
            seed: None,
            chains: 1,
            out: PathBuf::from("out"),
            pooled: true,
        }
    }
}

impl RunConfig {
    pub fn read_json(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| bevcp::Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(CliError::Usage(format!("q = {} outside (0,1)", self.q)));
        }
        if self.chains == 0 {
            return Err(CliError::Usage("--chains must be at least 1".into()));
        }
        self.chain.validate()?;
        Ok(())
    }

    pub fn angles_path(&self) -> PathBuf {
        self.angles.clone().unwrap_or_else(|| self.out.join("angles.csv"))
    }
}

impl RunArgs {
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::read_json(p)?,
            None => RunConfig::default(),
        };
        macro_rules! take {
            ($flag:expr => $field:expr) => {
                if let Some(v) = $flag.clone() {
                    $field = v;
                }
            };
        }
        take!(self.prices_a.clone().map(Some) => cfg.prices_a);
        take!(self.prices_b.clone().map(Some) => cfg.prices_b);
        take!(self.angles.clone().map(Some) => cfg.angles);
        take!(self.q => cfg.q);
        take!(self.order => cfg.order);
        take!(self.iters => cfg.chain.iterations);
        take!(self.burnin => cfg.chain.burn_in);
        take!(self.thin => cfg.chain.thin);
        take!(self.seed.map(Some) => cfg.seed);
        take!(self.chains => cfg.chains);
        take!(self.out => cfg.out);
        if self.no_pooled {
            cfg.pooled = false;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// JSON with T, n_exceed, tau_true, theta1, theta2 and seed.
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SummarizeArgs {
    #[arg(long)]
    pub angles: PathBuf,
    #[arg(long)]
    pub draws: PathBuf,
    /// Draws of the single-regime refit.
    #[arg(long)]
    pub pooled_draws: Option<PathBuf>,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}
