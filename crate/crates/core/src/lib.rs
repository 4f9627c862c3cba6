//! Bayesian change-point detection for bivariate extremal dependence.
//!
//! Two price series are filtered through GARCH(1,1), mapped to unit-Pareto
//! margins by ranks and reduced to pseudo-polar exceedances. The angular
//! density of each regime is a Bernstein polynomial mixture, and the
//! change-point with both weight vectors is sampled by adaptive
//! Metropolis-within-Gibbs.

pub mod angular;
pub mod changepoint;
pub mod error;
pub mod ingest;
pub mod margins;
pub mod mcmc;
pub mod optim;
pub mod quadrature;
pub mod simulate;
pub mod summary;

pub use angular::{bev_cdf, bev_copula, exponent_measure, validate_weights, BernsteinWeights, ConstraintReport};
pub use changepoint::{log_likelihood, log_posterior, log_prior, regime_of, ChangePointModel, Regime};
pub use error::{Error, Result};
pub use ingest::{
    align_pairs, fit_garch11, load_price_csv, negative_log_returns, GarchFit, GarchFitOptions, GarchParams,
    PriceSeries, ResidualPairs, ReturnSeries,
};
pub use margins::{make_angular_sample, rank_pareto_transform, threshold_exceedances, AngularSample, ParetoPairs};
pub use mcmc::{run_chain, run_chain_observed, Block, BlockStats, ChainConfig, PosteriorDraws};
pub use simulate::{simulate_changepoint_angles, simulate_garch11, SyntheticSpec};
pub use summary::{export_plot_data, predictive_density, tau_estimate, tau_interval, ExportOptions, RunSummary};
