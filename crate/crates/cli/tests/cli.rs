use std::process::Command;

use cbe_core::composite::{ArmRates, EffectMeasure, EffectSpec, MarginalSpec};
use cbe_core::sizing::{n_composite, DesignSpec, VarianceEstimator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_cbe");

fn cbe(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).env_remove("CBE_BIND").output().expect("run cbe");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = cbe(args);
    assert_eq!(code, 0, "stderr: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn strong_recommendation_for_case_study() {
    let v = json(&[
        "recommend", "--p1", "0.095", "--p2", "0.137", "--d1", "-0.022", "--d2", "-0.027", "--alpha", "0.025",
        "--power", "0.80", "--measure", "rd", "--variance", "pooled", "--category", "strong",
    ]);
    let n = v["n_total"].as_i64().unwrap();
    assert!((n - 4201).abs() <= 2, "{n}");
    assert_eq!(v["command"], "recommend");
}

#[test]
fn unit_margins_span_full_range() {
    let v = json(&["bounds", "--p1", "0.5", "--p2", "0.5", "--d1", "0", "--d2", "0"]);
    assert_eq!(v["lower"].as_f64().unwrap(), -1.0);
    assert_eq!(v["upper"].as_f64().unwrap(), 1.0);
}

#[test]
fn size_matches_library_bit_for_bit() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut done = 0;
    while done < 25 {
        let p1 = rng.random_range(0.03..0.4);
        let p2 = rng.random_range(0.03..0.4);
        let r1 = rng.random_range(0.5..0.95);
        let r2 = rng.random_range(0.5..0.95);
        let rho = rng.random_range(0.0..0.3);
        let variance = VarianceEstimator::ALL[done % 2];
        let spec = MarginalSpec::new(ArmRates::new(p1, p2).unwrap(), EffectSpec::RiskRatio { r1, r2 }).unwrap();
        let d = DesignSpec::new(0.025, 0.8, EffectMeasure::RiskRatio, variance).unwrap();
        let Ok(lib) = n_composite(&spec, rho, &d) else { continue };
        let args = [
            "size".to_string(),
            "--raw".into(),
            format!("--p1={p1}"),
            format!("--p2={p2}"),
            format!("--r1={r1}"),
            format!("--r2={r2}"),
            format!("--rho={rho}"),
            "--measure=rr".into(),
            format!("--variance={variance}"),
        ];
        let v = json(&args.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(v["n_total"].as_u64().unwrap(), lib.n_total);
        assert_eq!(v["n_per_group"].as_u64().unwrap(), lib.n_per_group);
        assert_eq!(v["n_total_raw"].as_f64().unwrap().to_bits(), lib.n_total_raw.to_bits());
        assert_eq!(
            v["achieved_power_at_design"].as_f64().unwrap().to_bits(),
            lib.achieved_power_at_design.to_bits()
        );
        done += 1;
    }
}

#[test]
fn exit_codes() {
    let (code, _, err) = cbe(&["size", "--p1", "0.095", "--d1", "-0.022", "--d2", "-0.027", "--rho", "0.3"]);
    assert_eq!(code, 2);
    let e: Value = serde_json::from_str(&err).unwrap();
    assert_eq!(e["code"], "schema.missing_field");

    let (code, _, err) = cbe(&["size", "--p1", "0.095", "--p2", "0.137", "--d1", "-0.022", "--d2", "-0.027", "--rho", "0.95"]);
    assert_eq!(code, 3);
    let e: Value = serde_json::from_str(&err).unwrap();
    assert_eq!(e["code"], "infeasible_correlation");

    let (code, _, err) = cbe(&["size", "--p1", "1.5", "--p2", "0.137", "--d1", "-0.022", "--d2", "-0.027", "--rho", "0.3"]);
    assert_eq!(code, 2, "{err}");

    let (code, _, _) = cbe(&["size", "--no-such-flag"]);
    assert_eq!(code, 2);
    let (code, out, _) = cbe(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("recommend"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "p1 = 0.095\np2 = 0.137\nd1 = -0.022\nd2 = -0.027\nrho = 0.5\nmeasure = \"rd\"\nvariance = \"pooled\"\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let at_03 = json(&["size", "--config", cfg, "--rho", "0.3"]);
    assert_eq!(at_03["n_total"].as_u64().unwrap(), 3031);
    let at_05 = json(&["size", "--config", cfg]);
    assert!(at_05["n_total"].as_u64().unwrap() > 3031);

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "p1 = 0.1\ncolour = \"red\"\n").unwrap();
    let (code, _, err) = cbe(&["size", "--config", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("schema.unknown_field"), "{err}");
}

#[test]
fn curve_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curve.csv");
    let out = dir.path().join("curve.json");
    let (code, stdout, err) = cbe(&[
        "curve", "--p1", "0.095", "--p2", "0.137", "--d1", "-0.022", "--d2", "-0.027", "--p1-low", "0.078",
        "--p1-high", "0.112", "--p2-low", "0.117", "--p2-high", "0.157", "--n-points", "30", "--csv",
        csv.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rho,n_low,n_point,n_high"));
    assert_eq!(lines.count(), 30);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["points"].as_array().unwrap().len(), 30);
}

#[test]
fn reports_are_reproducible() {
    let args = ["recommend", "--p1", "0.095", "--p2", "0.137", "--d1", "-0.022", "--d2", "-0.027"];
    let (_, a, _) = cbe(&args);
    let (_, b, _) = cbe(&args);
    assert_eq!(a, b);
    let with_workers: Vec<&str> = ["--workers", "3"].into_iter().chain(args).collect();
    assert_eq!(cbe(&with_workers).1, a);
}

#[test]
fn simulate_csv_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.toml");
    std::fs::write(
        &cfg,
        "[simulation]\np1 = [0.05]\np2 = [0.1]\neffect1 = [0.7]\neffect2 = [0.7]\nrho_true = [0.2]\nmeasures = [\"rr\"]\nreps = 100\n",
    )
    .unwrap();
    let (code, out, err) = cbe(&["simulate", "--config", cfg.to_str().unwrap(), "--csv", "-"]);
    assert_eq!(code, 0, "{err}");
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("p1,p2,effect1,effect2,measure,rho_true"));
    assert_eq!(lines.count(), 4 * 2);
}
