use bevcp::ingest::{conditional_variances, garch_loglik};
use bevcp::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TRUE: GarchParams = GarchParams {
    mu: 0.0,
    omega: 0.1,
    alpha: 0.1,
    beta: 0.8,
};

fn fit_seed(params: &GarchParams, n: usize, seed: u64) -> GarchFit {
    let r = simulate_garch11(params, n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
    fit_garch11(&r, &GarchFitOptions::default()).unwrap()
}

#[test]
fn recovers_simulated_parameters() {
    let fit = fit_seed(&TRUE, 5000, 11);
    assert!((fit.params.alpha - 0.1).abs() < 0.05, "{:?}", fit.params);
    assert!((fit.params.beta - 0.8).abs() < 0.1, "{:?}", fit.params);
    assert!(fit.params.is_valid());
}

#[test]
fn iid_input_gives_small_alpha() {
    let iid = GarchParams {
        mu: 0.2,
        omega: 1.5,
        alpha: 0.0,
        beta: 0.0,
    };
    let fit = fit_seed(&iid, 3000, 5);
    assert!(fit.params.alpha <= 0.05, "{:?}", fit.params);
}

#[test]
fn standardized_residuals_have_unit_scale() {
    let fit = fit_seed(&TRUE, 2000, 3);
    let n = fit.residuals.len() as f64;
    let m = fit.residuals.iter().sum::<f64>() / n;
    let v = fit.residuals.iter().map(|z| (z - m).powi(2)).sum::<f64>() / (n - 1.0);
    assert!((0.8..=1.2).contains(&v), "{v}");
    assert_eq!(fit.residuals.len(), fit.dates.len());
}

/// Plain re-statement of the Gaussian quasi-likelihood, written without
/// reusing the library recursion.
fn reference_loglik(p: &GarchParams, x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let backcast = x.iter().map(|v| (v - p.mu).powi(2)).sum::<f64>() / n;
    let mut s2 = p.omega + (p.alpha + p.beta) * backcast;
    let mut ll = 0.0;
    for (t, v) in x.iter().enumerate() {
        if t > 0 {
            let e = x[t - 1] - p.mu;
            s2 = p.omega + p.alpha * e * e + p.beta * s2;
        }
        let e = v - p.mu;
        ll += -0.5 * ((2.0 * std::f64::consts::PI).ln() + s2.ln() + e * e / s2);
    }
    ll
}

#[test]
fn loglik_matches_reference_recursion() {
    let r = simulate_garch11(&TRUE, 700, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
    for p in [
        TRUE,
        GarchParams {
            mu: 0.05,
            omega: 0.3,
            alpha: 0.2,
            beta: 0.5,
        },
    ] {
        let a = garch_loglik(&p, &r.values).unwrap();
        let b = reference_loglik(&p, &r.values);
        assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{a} vs {b}");
        let v = conditional_variances(&p, &r.values).unwrap();
        assert!(v.iter().all(|s| *s >= p.omega));
    }
}
