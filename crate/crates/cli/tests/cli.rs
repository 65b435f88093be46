use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn wavekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavekit"))
        .args(args)
        .env_remove("WAVEKIT_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_numbers(text: &str) -> Vec<Vec<Option<f64>>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse::<f64>().ok()).collect())
        .collect()
}

#[test]
fn moments_both_methods_agree_and_saturate() {
    let o = wavekit(&["moments", "--dispersion", "rel", "--mass", "1", "--alpha", "1", "--beta-re", "0.5", "--method", "both"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("quantity,closed,quadrature,abs_diff\n"));
    for line in text.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let (closed, quad): (f64, f64) = (cells[1].parse().unwrap(), cells[2].parse().unwrap());
        match cells[0] {
            "saturation_residual" => assert!(quad.abs() < 1e-7),
            _ => assert!((closed - quad).abs() <= 1e-8 * closed.abs().max(quad.abs()) + 1e-12, "{line}"),
        }
    }
}

#[test]
fn identical_config_gives_identical_bytes() {
    let args = ["evolve", "--dispersion", "rel", "--beta-re", "0.3", "--x-steps", "41", "--t-steps", "5"];
    let a = wavekit(&args);
    let b = wavekit(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("t,x,density\n"));
    assert!(text.ends_with('\n'));
    assert_eq!(text.lines().count(), 1 + 41 * 5);
}

#[test]
fn csv_and_json_hold_the_same_values() {
    let base = ["moments", "--dispersion", "nonrel", "--beta-re", "0.25", "--method", "both"];
    let csv = stdout(&wavekit(&[&base[..], &["--format", "csv"]].concat()));
    let json: Value = serde_json::from_str(&stdout(&wavekit(&[&base[..], &["--format", "json"]].concat()))).unwrap();
    let rows = json["rows"].as_array().unwrap();
    let parsed = csv_numbers(&csv);
    assert_eq!(rows.len(), parsed.len());
    for (row, cells) in rows.iter().zip(parsed) {
        for (col, value) in ["closed", "quadrature", "abs_diff"].iter().zip(&cells[1..]) {
            assert_eq!(row[*col].as_f64(), *value, "{col}");
        }
    }
    assert!(json["error_estimates"]["quadrature"]["mean_x2"].as_f64().unwrap() >= 0.0);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"dispersion": "nonrel", "alpha": 2.0, "beta_re": 0.5, "method": "closed"}"#).unwrap();
    let from_file = stdout(&wavekit(&["moments", "--config", cfg.to_str().unwrap()]));
    let direct = stdout(&wavekit(&["moments", "--dispersion", "nonrel", "--alpha", "2", "--beta-re", "0.5"]));
    assert_eq!(from_file, direct);
    let overridden = stdout(&wavekit(&["moments", "--config", cfg.to_str().unwrap(), "--alpha", "1"]));
    let expected = stdout(&wavekit(&["moments", "--dispersion", "nonrel", "--alpha", "1", "--beta-re", "0.5"]));
    assert_eq!(overridden, expected);
}

#[test]
fn config_errors_exit_with_two() {
    for args in [
        &["moments", "--alpha", "0"][..],
        &["moments", "--dispersion", "lattice", "--beta-re", "0.1"],
        &["evolve", "--x-steps", "1"],
        &["boost", "--dispersion", "massless", "--boost", "0.2"],
        &["boost", "--boost", "1.5"],
        &["cosmo", "--dispersion", "lattice"],
        &["figures", "--which", "7"],
    ] {
        let o = wavekit(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"colour": 1}"#).unwrap();
    assert_eq!(wavekit(&["moments", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn tolerance_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_wavekit"))
        .args(["moments", "--method", "quadrature"])
        .env("WAVEKIT_TOL", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_wavekit"))
        .args(["moments", "--method", "quadrature", "--tol", "1e-8"])
        .env("WAVEKIT_TOL", "2")
        .output()
        .unwrap();
    assert!(o.status.success());
}

fn grid_rows(path: &Path) -> Vec<(f64, f64, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("t,x,density\n"));
    csv_numbers(&text).into_iter().map(|r| (r[0].unwrap(), r[1].unwrap(), r[2].unwrap())).collect()
}

#[test]
fn figure_four_is_bimodal_at_t5() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig4.csv");
    let o = wavekit(&["figures", "--which", "4", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(dir.path().join("fig4_bottom.csv").exists());
    let row: Vec<(f64, f64)> = grid_rows(&out).into_iter().filter(|r| r.0 == 5.0).map(|r| (r.1, r.2)).collect();
    let maxima: Vec<f64> = row
        .windows(3)
        .filter(|w| w[1].1 > w[0].1 && w[1].1 > w[2].1)
        .map(|w| w[1].0)
        .collect();
    assert_eq!(maxima.len(), 2, "{maxima:?}");
    assert!((maxima[0] + 5.0).abs() <= 0.5 && (maxima[1] - 5.0).abs() <= 0.5);
}

#[test]
fn figures_into_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("figs");
    assert!(wavekit(&["figures", "--out", out.to_str().unwrap()]).status.success());
    for name in ["fig1_top", "fig1_bottom", "fig2", "fig3_top", "fig3_bottom", "fig4_top", "fig4_bottom"] {
        assert!(out.join(format!("{name}.csv")).exists(), "{name}");
    }
    let lattice = grid_rows(&out.join("fig2.csv"));
    assert!(lattice.iter().all(|r| r.1.fract() == 0.0));
}

#[test]
fn spread_matches_law() {
    let o = wavekit(&["spread", "--dispersion", "nonrel", "--beta-re", "0.5", "--t-steps", "3", "--x-min", "-40", "--x-max", "40", "--x-steps", "801"]);
    assert!(o.status.success());
    for r in csv_numbers(&stdout(&o)) {
        let (law, full) = (r[1].unwrap(), r[3].unwrap());
        assert!((law - full).abs() <= 1e-5 * law);
    }
}

#[test]
fn boost_prediction_matches_recomputation() {
    let o = wavekit(&["boost", "--dispersion", "rel", "--beta-re", "0.3", "--boost", "0.6", "--format", "json"]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for row in doc["rows"].as_array().unwrap() {
        if let Some(d) = row["abs_diff"].as_f64() {
            assert!(d < 1e-7, "{row}");
        }
    }
}

#[test]
fn cosmo_static_and_expanding() {
    let o = wavekit(&["cosmo", "--dispersion", "massless", "--beta-re", "0.5", "--model", "exponential", "--rate", "0.2", "--t-steps", "4"]);
    assert!(o.status.success());
    for r in csv_numbers(&stdout(&o)) {
        assert!((r[5].unwrap() - 0.5).abs() < 1e-10);
    }
    let o = wavekit(&["cosmo", "--dispersion", "rel", "--model", "tabulated", "--table", "0:1,2:1.5,10:3", "--t-steps", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn selfcheck_single_criterion() {
    let o = wavekit(&["selfcheck", "--criteria", "9"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("criterion  9 [PASS]"));
    assert!(!text.contains("criterion  1"));
}
