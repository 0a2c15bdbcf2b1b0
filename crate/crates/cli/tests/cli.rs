use std::path::Path;
use std::process::{Command, Output};

fn nvreadout(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nvreadout"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.ends_with('\n'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn preset_fig4_minimum_at_crossover() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig4.csv");
    let o = nvreadout(&["preset", "fig4", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["eta_ueV", "reflectance_at_resonance"]);
    assert_eq!(rows.len(), 200);
    let eta = column(&header, &rows, "eta_ueV");
    let r = column(&header, &rows, "reflectance_at_resonance");
    let imin = (0..r.len()).min_by(|&a, &b| r[a].total_cmp(&r[b])).unwrap();
    let step = (1e4f64).ln() / 199.0;
    assert!((eta[imin] / 36_000.0).ln().abs() <= step);
    assert!(r[0] > 0.98);
    assert!(r.iter().all(|x| (0.0..=1.0).contains(x)));
}

#[test]
fn preset_fig3d_has_rabi_doublet() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig3d.csv");
    assert!(nvreadout(&["preset", "fig3d", "--out", out.to_str().unwrap()]).status.success());
    let (header, rows) = read_csv(&out);
    let d = column(&header, &rows, "detuning_ueV");
    let r = column(&header, &rows, "reflectance");
    let minima: Vec<f64> = (1..r.len() - 1)
        .filter(|&i| r[i] < r[i - 1] && r[i] <= r[i + 1])
        .map(|i| d[i])
        .collect();
    assert_eq!(minima.len(), 2, "{minima:?}");
    assert!(minima.iter().all(|m| (m.abs() - 30.0).abs() <= 0.1));
}

#[test]
fn preset_fig5_contrast_anchors() {
    let o = nvreadout(&["preset", "fig5"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    let ratio = column(&header, &rows, "eta_over_kappa");
    let contrast = column(&header, &rows, "contrast");
    let at = |x: f64| contrast[ratio.iter().position(|&r| r == x).unwrap()];
    assert!((at(50.0) - 0.92).abs() < 0.01);
    assert!((at(10.0) - 0.65).abs() < 0.02);
}

#[test]
fn error_budget_json() {
    let o = nvreadout(&["error-budget"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let total = v["total_error"].as_f64().unwrap();
    assert!((5e-3..=9e-3).contains(&total), "{v}");
    assert_eq!(v["threshold"], 6);
}

#[test]
fn error_budget_from_config_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.json");
    std::fs::write(&cfg, r#"{"detection": {"threshold": 4}}"#).unwrap();
    let o = nvreadout(&["error-budget", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("lambda_dark,lambda_bright,threshold,"));
    assert_eq!(text.lines().nth(1).unwrap().split(',').nth(2), Some("4"));
}

#[test]
fn contrast_report() {
    let o = nvreadout(&["contrast"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["contrast_m_plus1"].as_f64().unwrap() - 0.92).abs() < 0.01);
    assert!((v["q_total"].as_f64().unwrap() - 55.0).abs() < 1e-6);
    assert_eq!(v["regime"], "one_dimensional_atom");
}

#[test]
fn spectrum_and_sweep() {
    let o = nvreadout(&["spectrum", "--min", "-50", "--max", "50", "--points", "11", "--spin", "m_plus1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 12);
    assert!(text.lines().nth(1).unwrap().starts_with("-50.0000000,"));

    let o = nvreadout(&["sweep", "--var", "eta", "--min", "100", "--max", "1e6", "--points", "9", "--log"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("eta_ueV,reflectance_m0,"));
    assert_eq!(text.lines().count(), 10);

    let o = nvreadout(&["sweep", "--var", "threshold", "--min", "0", "--max", "10", "--points", "11", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 11);
    for row in v.as_array().unwrap() {
        let p = row["total_error"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&p));
    }
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = nvreadout(&["simulate", "--trials", "20000", "--seed", "42", "--format", "csv", "--out", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let ta = std::fs::read(&a).unwrap();
    assert!(!ta.is_empty());
    assert_eq!(ta, std::fs::read(&b).unwrap());
}

#[test]
fn presets_are_bit_identical() {
    let a = nvreadout(&["preset", "fig3b"]).stdout;
    let b = nvreadout(&["preset", "fig3b"]).stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn invalid_input_exits_one() {
    for args in [
        vec!["frobnicate"],
        vec!["preset", "fig9"],
        vec!["contrast", "--bogus"],
        vec!["sweep", "--var", "eta"],
        vec!["sweep", "--var", "colour", "--min", "1", "--max", "2"],
        vec!["sweep", "--var", "eta", "--min", "0", "--max", "2", "--log"],
        vec!["error-budget", "--config", "/nonexistent/s.json"],
        vec![],
    ] {
        let o = nvreadout(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn config_violation_names_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"cavity":{"kappa_ueV":-1}}"#).unwrap();
    let o = nvreadout(&["contrast", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kappa_ueV"));
}

#[test]
fn unwritable_output_is_internal_failure() {
    let o = nvreadout(&["preset", "fig4", "--out", "/nonexistent/dir/fig4.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    assert!(nvreadout(&["--help"]).status.success());
}
