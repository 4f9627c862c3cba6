#![allow(dead_code)]

use std::path::{Path, PathBuf};

use bevcp::{simulate_garch11, GarchParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const GARCH: GarchParams = GarchParams {
    mu: 0.0,
    omega: 0.1,
    alpha: 0.1,
    beta: 0.8,
};

/// A `date,close` file of `rows` daily prices driven by GARCH(1,1) returns,
/// starting on 2000-01-01 plus `offset_days`.
pub fn write_prices(path: &Path, rows: usize, seed: u64, offset_days: usize) {
    let r = simulate_garch11(&GARCH, rows + offset_days, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
    let mut price = 100.0;
    let mut text = String::from("date,close\n");
    for k in offset_days..offset_days + rows {
        if k > offset_days {
            price *= (-r.values[k] / 100.0).exp();
        }
        text.push_str(&format!("{},{price}\n", r.dates[k]));
    }
    std::fs::write(path, text).unwrap();
}

/// Two overlapping price files in `dir`.
pub fn price_pair(dir: &Path, rows: usize) -> (PathBuf, PathBuf) {
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    write_prices(&a, rows, 1, 0);
    write_prices(&b, rows, 2, 0);
    (a, b)
}

pub const CANONICAL_SPEC: &str = r#"{
  "T": 1000,
  "n_exceed": 200,
  "tau_true": 500.0,
  "theta1": {"J": 4, "theta": [0.5, 0.0, 0.5]},
  "theta2": {"J": 4, "theta": [0.0, 1.0, 0.0]},
  "seed": 7
}"#;
