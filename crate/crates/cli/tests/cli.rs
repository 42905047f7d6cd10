use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn braggswap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_braggswap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn entangle_defaults_deflect() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = braggswap(&["entangle", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("entangle_summary.json")).unwrap()).unwrap();
    assert!(summary["oracle_deflected"].as_f64().unwrap() >= 0.95);
    assert!(summary["version"].is_string());

    let csv = fs::read_to_string(dir.path().join("entangle_populations.csv")).unwrap();
    assert!(csv.starts_with("# braggswap "));
    assert!(csv.lines().nth(1).unwrap().starts_with("# config: {"));
    for line in data_lines(&csv).iter().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!((cols[5], cols[6]), (1.0, 0.0), "n = 0 block must not move");
    }
}

#[test]
fn entangle_zero_time_is_frozen() {
    let dir = tempfile::tempdir().unwrap();
    let o = braggswap(&["entangle", "--out", dir.path().to_str().unwrap(), "--time-scale", "0"]);
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("entangle_populations.csv")).unwrap();
    for line in data_lines(&csv).iter().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(&cols[1..5], &[1.0, 0.0, 1.0, 0.0]);
    }
}

#[test]
fn protocol_is_deterministic_and_reports_both_labels() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = write_config(a.path(), r#"{"dimensionless": {"g": 1.0, "delta": 100.0}, "shots": 100000, "seed": 42}"#);
    for d in [&a, &b] {
        let o = braggswap(&["protocol", "--config", &cfg, "--out", d.path().to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let csv_a = fs::read_to_string(a.path().join("protocol_report.csv")).unwrap();
    let csv_b = fs::read_to_string(b.path().join("protocol_report.csv")).unwrap();
    // Only the echoed output directory differs between the two runs.
    let strip = |s: &str| data_lines(s).join("\n");
    assert_eq!(strip(&csv_a), strip(&csv_b));
    let header = data_lines(&csv_a)[0];
    assert!(header.contains("classification") && header.contains("paper_label"));

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.path().join("protocol_summary.json")).unwrap()).unwrap();
    let rate = summary["report"]["success_rate"].as_f64().unwrap();
    let sigma = (0.25f64 / 100_000.0).sqrt();
    assert!((rate - 0.5).abs() <= 4.0 * sigma, "{rate}");
    assert_eq!(summary["config"]["seed"], 42);
}

#[test]
fn same_output_dir_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    braggswap(&["protocol", "--out", out, "--shots", "5000", "--seed", "9"]);
    let first = fs::read(dir.path().join("protocol_report.csv")).unwrap();
    let first_json = fs::read(dir.path().join("protocol_summary.json")).unwrap();
    braggswap(&["protocol", "--out", out, "--shots", "5000", "--seed", "9"]);
    assert_eq!(first, fs::read(dir.path().join("protocol_report.csv")).unwrap());
    assert_eq!(first_json, fs::read(dir.path().join("protocol_summary.json")).unwrap());
}

#[test]
fn oracle_assertions_set_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let ok = write_config(dir.path(), r#"{"dimensionless": {"g": 1.0, "delta": 100.0}, "ladder_halfwidth": 8, "assert": {"max_error": 0.02}}"#);
    assert_eq!(braggswap(&["oracle-compare", "--config", &ok, "--out", out]).status.code(), Some(0));
    let strict = write_config(dir.path(), r#"{"dimensionless": {"g": 1.0, "delta": 100.0}, "assert": {"max_error": 1e-9}}"#);
    let o = braggswap(&["oracle-compare", "--config", &strict, "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("max_error"));
}

#[test]
fn invalid_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = braggswap(&["protocol", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read config"));

    let both = write_config(
        dir.path(),
        r#"{"dimensionless": {"g": 1.0, "delta": 100.0}, "physical": {"mass_kg": 1e-25, "wavelength_m": 7.8e-7, "g_rad_s": 1.0, "delta_rad_s": 100.0}}"#,
    );
    let o = braggswap(&["protocol", "--config", &both]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exactly one"));

    let odd = write_config(dir.path(), r#"{"dimensionless": {"g": 1.0, "delta": 100.0}, "l0": 3}"#);
    let o = braggswap(&["entangle", "--config", &odd]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("l0"));

    let o = braggswap(&["protocol", "--shots", "0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_writes_ordered_rows_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"dimensionless": {"g": 1.0, "delta": 100.0}, "shots": 2000, "seed": 1,
            "sweep": {"axis": "interaction_time_scale", "values": [0.9, 1.0, 1.1]}}"#,
    );
    let out = dir.path().join("o");
    let o = braggswap(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let rows = data_lines(&csv);
    assert_eq!(rows.len(), 4);
    let fid: Vec<f64> = rows[1..].iter().map(|l| l.split(',').nth(10).unwrap().parse().unwrap()).collect();
    assert!(fid[1] > fid[0] && fid[1] > fid[2], "{fid:?}");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("sweep.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["rows"], 3);

    let o = braggswap(&["sweep", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "sweep without a sweep block");
}

#[test]
fn physical_units_accepted() {
    let dir = tempfile::tempdir().unwrap();
    // ⁸⁵Rb at 780 nm; g and Δ chosen as 1 and 100 recoil frequencies.
    let cfg = write_config(
        dir.path(),
        r#"{"physical": {"mass_kg": 1.409993199e-25, "wavelength_m": 7.8e-7,
                         "g_rad_s": 24266.07883256896, "delta_rad_s": 2426607.883256896}, "shots": 1000}"#,
    );
    let o = braggswap(&["protocol", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("protocol_summary.json")).unwrap()).unwrap();
    let w = summary["config"]["omega_rec_rad_s"].as_f64().unwrap();
    assert!((w - 24266.07883256896).abs() < 1.0, "{w}");
}
