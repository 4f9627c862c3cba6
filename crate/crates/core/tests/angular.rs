use bevcp::angular::{density_mean, uniform_weights, AngleSampler};
use bevcp::quadrature::{integrate, QuadratureOptions};
use bevcp::simulate::random_valid_weights;
use bevcp::*;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tight() -> QuadratureOptions {
    QuadratureOptions {
        abs_tolerance: 1e-12,
        max_intervals: 4000,
    }
}

fn w4(theta: [f64; 3]) -> BernsteinWeights {
    BernsteinWeights::new(4, theta.to_vec()).unwrap()
}

#[test]
fn density_integrates_to_one_with_mean_half() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for order in [4, 7, 15, 40, 93] {
        for _ in 0..5 {
            let w = random_valid_weights(order, &mut rng).unwrap();
            let mass = integrate(|x| w.density(x), 0.0, 1.0, &tight()).unwrap();
            let mean = integrate(|x| x * w.density(x), 0.0, 1.0, &tight()).unwrap();
            assert!((mass - 1.0).abs() < 1e-8, "J={order} mass {mass}");
            assert!((mean - density_mean(&w)).abs() < 1e-8);
            assert!((density_mean(&w) - 0.5).abs() < 1e-12);
        }
    }
}

#[test]
fn density_is_affine_in_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = random_valid_weights(12, &mut rng).unwrap();
    let b = random_valid_weights(12, &mut rng).unwrap();
    let lambda = 0.3;
    let mix: Vec<f64> = a
        .theta()
        .iter()
        .zip(b.theta())
        .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
        .collect();
    let m = BernsteinWeights::new(12, mix).unwrap();
    for k in 1..50 {
        let w = k as f64 / 50.0;
        let lhs = m.density(w);
        let rhs = lambda * a.density(w) + (1.0 - lambda) * b.density(w);
        assert!((lhs - rhs).abs() < 1e-12);
    }
}

#[test]
fn cdf_is_monotone_in_both_arguments() {
    let w = w4([0.2, 0.6, 0.2]);
    let xs = [0.2, 0.5, 1.0, 2.0, 5.0];
    for &y in &xs {
        let g: Vec<f64> = xs.iter().map(|&x| bev_cdf(&w, x, y).unwrap()).collect();
        assert!(g.windows(2).all(|p| p[0] <= p[1]));
        let g: Vec<f64> = xs.iter().map(|&x| bev_cdf(&w, y, x).unwrap()).collect();
        assert!(g.windows(2).all(|p| p[0] <= p[1]));
    }
}

#[test]
fn cdf_matches_fine_trapezoid() {
    // h = 6 w (1 - w); V(1, 1) = 2 int max(w, 1 - w) h(w) dw
    let w = w4([0.0, 1.0, 0.0]);
    let n = 200_000;
    let f = |x: f64| 2.0 * x.max(1.0 - x) * 6.0 * x * (1.0 - x);
    let step = 1.0 / n as f64;
    let v: f64 = (0..n)
        .map(|k| 0.5 * step * (f(k as f64 * step) + f((k + 1) as f64 * step)))
        .sum();
    let g = bev_cdf(&w, 1.0, 1.0).unwrap();
    assert!((g - (-v).exp()).abs() < 1e-6, "{g} vs {}", (-v).exp());
    // closed form of the same integral: 2 * 11/16
    assert!((v - 1.375).abs() < 1e-8);
}

#[test]
fn cdf_is_max_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for order in [4, 9, 30] {
        let w = random_valid_weights(order, &mut rng).unwrap();
        for &x in &[0.3, 1.0, 4.0] {
            for &y in &[0.5, 2.0] {
                let g = bev_cdf(&w, x, y).unwrap();
                let g2 = bev_cdf(&w, 2.0 * x, 2.0 * y).unwrap();
                assert!((g - g2 * g2).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn independence_and_copula_margins() {
    // uniform density: V(1,1) = 2 int max(w, 1-w) dw = 1.5
    let u = uniform_weights(6).unwrap();
    let v = exponent_measure(&u, 1.0, 1.0).unwrap();
    assert!((v - 1.5).abs() < 1e-9);
    let c = bev_copula(&u, 0.7, 1.0 - 1e-12).unwrap();
    assert!((c - 0.7).abs() < 1e-6);
}

#[test]
fn sampler_matches_quadrature_cdf() {
    let w = BernsteinWeights::new(6, vec![0.1, 0.25, 0.3, 0.25, 0.1]).unwrap();
    let sampler = AngleSampler::new(&w).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut xs: Vec<f64> = (0..100_000).map(|_| sampler.sample(&mut rng)).collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut ks: f64 = 0.0;
    for k in 1..200 {
        let q = k as f64 / 200.0;
        let cdf = integrate(|x| w.density(x), 0.0, q, &tight()).unwrap();
        let emp = xs.partition_point(|x| *x <= q) as f64 / n;
        ks = ks.max((cdf - emp).abs());
    }
    assert!(ks < 0.01, "{ks}");
}
