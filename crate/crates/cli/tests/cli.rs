mod common;

use std::path::Path;
use std::process::{Command, Output};

fn bevcp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bevcp"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn pipeline_counts_exceedances() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = common::price_pair(dir.path(), 1856);
    for (q, n) in [("0.90", 186), ("0.95", 93)] {
        let out = dir.path().join(format!("q{q}"));
        let o = bevcp(&["pipeline", "--prices-a", s(&a), "--prices-b", s(&b), "--q", q, "--out", s(&out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let stdout = String::from_utf8_lossy(&o.stdout);
        assert!(stdout.contains(&format!("N = {n} ")), "{stdout}");
        assert!(stdout.contains("T = 1855"), "{stdout}");
        let sample = bevcp::AngularSample::read(out.join("angles.csv")).unwrap();
        assert_eq!(sample.len(), n);
        assert!(out.join("garch_a.json").exists() && out.join("garch_b.json").exists());
        assert_eq!(json(&out.join("angles.json"))["q"], serde_json::json!(q.parse::<f64>().unwrap()));
    }
}

#[test]
fn disjoint_dates_are_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    common::write_prices(&a, 300, 1, 0);
    common::write_prices(&b, 300, 2, 400);
    let o = bevcp(&["pipeline", "--prices-a", s(&a), "--prices-b", s(&b), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_price_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    std::fs::write(&a, "date,close\n2020-01-01,10\n2020-01-02,0\n").unwrap();
    let o = bevcp(&["pipeline", "--prices-a", s(&a), "--prices-b", s(&a), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("non-positive price") && err.contains('3'), "{err}");
}

#[test]
fn simulate_then_fit_composes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(&spec, common::CANONICAL_SPEC).unwrap();
    let sim = dir.path().join("sim");
    let o = bevcp(&["simulate", "--spec", s(&spec), "--out", s(&sim)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let truth = json(&sim.join("truth.json"));
    assert_eq!(truth["theta1"]["theta"], serde_json::json!([0.5, 0.0, 0.5]));
    assert_eq!(truth["theta2"]["theta"], serde_json::json!([0.0, 1.0, 0.0]));
    assert_eq!(truth["tau_true"], serde_json::json!(500.0));

    let fit = dir.path().join("fit");
    let o = bevcp(&[
        "fit", "--angles", s(&sim.join("angles.csv")), "--order", "4", "--iters", "3000",
        "--burnin", "1000", "--seed", "5", "--out", s(&fit),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "draws.jsonl", "draws.csv", "diagnostics.json", "pooled_draws.jsonl", "hist_whole.csv",
        "hist_regime1.csv", "hist_regime2.csv", "density_regime1.csv", "density_regime2.csv",
        "density_regimepooled.csv", "summary.json",
    ] {
        assert!(fit.join(f).exists(), "missing {f}");
    }
    let summary = json(&fit.join("summary.json"));
    assert_eq!(summary["K"], 200);
    assert_eq!(summary["J"], 4);
    assert_eq!(summary["seed"], 5);

    // summarize reproduces the fit's summary from the saved draws
    let again = dir.path().join("again");
    let o = bevcp(&[
        "summarize", "--angles", s(&sim.join("angles.csv")), "--draws", s(&fit.join("draws.jsonl")),
        "--out", s(&again),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&again.join("summary.json"))["tau"], summary["tau"]);
    assert_eq!(
        std::fs::read(again.join("density_regime1.csv")).unwrap(),
        std::fs::read(fit.join("density_regime1.csv")).unwrap()
    );
}

#[test]
fn invalid_spec_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(&spec, common::CANONICAL_SPEC.replace("500.0", "1500.0")).unwrap();
    let o = bevcp(&["simulate", "--spec", s(&spec), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seeded_fits_repeat_and_unseeded_fits_record_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(&spec, common::CANONICAL_SPEC).unwrap();
    let sim = dir.path().join("sim");
    assert!(bevcp(&["simulate", "--spec", s(&spec), "--out", s(&sim)]).status.success());
    let angles = sim.join("angles.csv");
    let run = |out: &Path, seed: Option<&str>| {
        let mut args = vec![
            "fit", "--angles", s(&angles), "--order", "auto", "--iters", "1500", "--burnin", "500",
            "--chains", "2", "--no-pooled", "--out", s(out),
        ];
        if let Some(seed) = seed {
            args.extend(["--seed", seed]);
        }
        let o = bevcp(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    };
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    run(&a, Some("11"));
    run(&b, Some("11"));
    for f in ["draws.jsonl", "draws.csv", "summary.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let summary = json(&a.join("summary.json"));
    assert_eq!(summary["J"], 100);
    assert_eq!(summary["K"], 200);
    assert_eq!(summary["chains"], 2);

    run(&c, None);
    assert!(json(&c.join("summary.json"))["seed"].is_u64());
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(&spec, common::CANONICAL_SPEC).unwrap();
    let sim = dir.path().join("sim");
    assert!(bevcp(&["simulate", "--spec", s(&spec), "--out", s(&sim)]).status.success());
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("fit");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "angles": sim.join("angles.csv"),
            "order": 6,
            "seed": 3,
            "pooled": false,
            "out": out,
            "chain": {"iterations": 1200, "burn_in": 200, "thin": 10},
        })
        .to_string(),
    )
    .unwrap();
    let o = bevcp(&["fit", "--config", s(&cfg), "--thin", "20"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["J"], 6);
    assert_eq!(summary["K"], 50);
    assert!(!out.join("density_regimepooled.csv").exists());
}
