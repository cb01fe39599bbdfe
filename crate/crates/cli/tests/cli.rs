use std::path::Path;
use std::process::{Command, Output};

fn mapq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mapq")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn config_1d(dir: &Path, method: &str) -> String {
    let path = dir.join(format!("{method}.json"));
    let text = format!(
        r#"{{
  "name": "bs-put",
  "model": {{"family": "GBM", "d": 1, "spot": [100.0], "rate": 0.0, "maturity": 1.0,
             "sigma": [0.4], "correlation": [[1.0]]}},
  "payoff": {{"family": "BasketPut", "strike": 100.0, "weights": [1.0]}},
  "method": "{method}",
  "options": {{"level": 64, "samples": 2000}},
  "reference": {{"value": 15.851941887820605}}
}}"#
    );
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn price_writes_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_1d(dir.path(), "TP");
    let out = dir.path().join("report.json");
    let o = mapq(&["price", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    let r = &v[0];
    assert_eq!(r["method"], "TP");
    assert!(r["relative_error"].as_f64().unwrap() < 1e-8);
    assert_eq!(r["n_eval"], 128);
}

#[test]
fn registry_example_prices_to_reference() {
    let o = mapq(&["price", "--example", "25", "--method", "TP", "--budget", "24"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v[0]["relative_error"].as_f64().unwrap() < 5e-3);
}

#[test]
fn sweep_emits_fixed_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_1d(dir.path(), "TP");
    let o = mapq(&["sweep", "--config", &cfg, "--budget", "2,4,8,16"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "method,N,N_eval,estimate,relative_error,wall_time_s");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[3].starts_with("TP,16,32,"));
}

#[test]
fn empty_sweep_has_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_1d(dir.path(), "TP");
    let o = mapq(&["sweep", "--config", &cfg, "--budget", ""]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "method,N,N_eval,estimate,relative_error,wall_time_s");
}

#[test]
fn batch_sweep_writes_one_file_per_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let one = std::fs::read_to_string(config_1d(dir.path(), "TP")).unwrap();
    let batch = dir.path().join("batch.json");
    std::fs::write(&batch, format!("[{one},{one}]")).unwrap();
    let out = dir.path().join("conv.csv");
    let o = mapq(&["sweep", "--config", batch.to_str().unwrap(), "--budget", "4,8", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("conv-1.csv").exists());
    assert!(dir.path().join("conv-2.csv").exists());
}

#[test]
fn mc_seed_flag_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_1d(dir.path(), "MC");
    let a = mapq(&["price", "--config", &cfg, "--seed", "11"]);
    let b = mapq(&["price", "--config", &cfg, "--seed", "11"]);
    let c = mapq(&["price", "--config", &cfg, "--seed", "12"]);
    let est = |o: &Output| serde_json::from_str::<serde_json::Value>(&stdout(o)).unwrap()[0]["estimate"].as_f64().unwrap();
    assert_eq!(est(&a), est(&b));
    assert_ne!(est(&a), est(&c));
}

#[test]
fn registry_lists_all_examples() {
    let o = mapq(&["registry"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 36);
    let o = mapq(&["registry", "--id", "22"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["reference"], 0.04634);
}

#[test]
fn optimize_damping_reports_vector() {
    let o = mapq(&["optimize-damping", "--example", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r: Vec<f64> = serde_json::from_value(v[0]["damping"].clone()).unwrap();
    assert!(r.iter().all(|x| (x - 2.5).abs() < 0.1));
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"method": "TP"}"#).unwrap();
    let o = mapq(&["price", "--config", bad.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    // COS on a 4D example is a configuration error.
    let o = mapq(&["price", "--example", "5", "--method", "COS2D"]);
    assert!(!o.status.success());
    let o = mapq(&["price", "--example", "99"]);
    assert!(!o.status.success());
}
