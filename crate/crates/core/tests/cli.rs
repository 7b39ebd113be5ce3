//! End-to-end runs of the command-line tool.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_clustered-hetnet"))
}

fn example() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/two_tier.toml")
}

fn example_text() -> String {
    std::fs::read_to_string(example()).unwrap()
}

fn run(args: &[&str], config: &Path) -> Output {
    bin().args(args).arg("--config").arg(config).output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn sweep_csv_schema() {
    let out = run(&["sweep", "--no-sim"], &example());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# clustered-hetnet sweep variable=tau_db seed=24301 trials=100000"));
    assert_eq!(
        lines[1],
        "sweep_var,sweep_value,assoc_0,assoc_1,assoc_2,cov_analytic,cov_lower,cov_upper,cov_ppp_limit,cov_sim_mean,cov_sim_halfwidth"
    );
    assert_eq!(lines.len(), 7);
    let mut previous = f64::INFINITY;
    for line in &lines[2..] {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 11);
        let assoc: f64 = cells[2..5].iter().map(|c| c.parse::<f64>().unwrap()).sum();
        assert!((assoc - 1.0).abs() < 1e-6);
        let total: f64 = cells[5].parse().unwrap();
        let lower: f64 = cells[6].parse().unwrap();
        let upper: f64 = cells[7].parse().unwrap();
        assert!(lower <= total && total <= upper);
        assert!(total <= previous);
        previous = total;
        assert!(cells[9].is_empty() && cells[10].is_empty());
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name);
        let out = bin()
            .args(["coverage", "--trials", "3000", "--seed", "9", "--tau-db", "-3"])
            .arg("--config")
            .arg(example())
            .arg("--out")
            .arg(&path)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        files.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let text = String::from_utf8(files[0].clone()).unwrap();
    assert!(text.lines().next().unwrap().contains("seed=9 trials=3000"));
    let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(row[1], "-3");
    let sim: f64 = row[9].parse().unwrap();
    let analytic: f64 = row[5].parse().unwrap();
    let half: f64 = row[10].parse().unwrap();
    assert!((sim - analytic).abs() < 3.0 * half.max(0.01));
}

#[test]
fn limits_and_json_output() {
    let out = run(&["limits", "--format", "json", "--tau-db", "0,10"], &example());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["simulated"].is_null()));
    let limit = rows[0]["analytic"]["ppp_limit"].as_f64().unwrap();
    assert!(limit > 0.0 && limit < 1.0);
}

#[test]
fn validate_underpowered_flags_wide_intervals() {
    let out = run(&["validate", "--trials", "100", "--seed", "1"], &example());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert_eq!(r["wide_interval"], true);
        let covered = r["abs_diff"].as_f64().unwrap() <= r["sim_half_width"].as_f64().unwrap();
        if covered {
            assert_eq!(r["pass"], true);
        }
    }
    let expected = if v["all_pass"] == true { 0 } else { 1 };
    assert_eq!(out.status.code(), Some(expected));
}

#[test]
fn validate_exits_one_on_disagreement() {
    // a 40 m window drops nearly all interference, so the simulation overshoots
    let dir = tempfile::tempdir().unwrap();
    let text = example_text()
        .replace("window_radius = 5000.0", "window_radius = 40.0")
        .replace("min_expected_bs = 50.0", "min_expected_bs = 0.0");
    let cfg = write_config(dir.path(), "small.toml", &text);
    let out = run(&["validate", "--trials", "4000", "--format", "csv", "--tau-db", "0"], &cfg);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.lines().nth(2).unwrap().ends_with(",false"));
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let alpha = write_config(dir.path(), "alpha.toml", &example_text().replace("alpha = 4.0", "alpha = 2.0"));
    let out = run(&["coverage", "--no-sim"], &alpha);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("alpha must exceed 2"));

    let matern = example_text().replace("model = \"thomas\"\nsigma = 20.0", "model = \"matern\"\nradius = -5.0");
    let matern = write_config(dir.path(), "matern.toml", &matern);
    let out = run(&["coverage", "--no-sim"], &matern);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).to_lowercase().contains("radius"));

    let unknown = write_config(dir.path(), "unknown.toml", &example_text().replace("shadow_eta_db", "shadow_eta"));
    let out = run(&["coverage", "--no-sim"], &unknown);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("shadow_eta"));

    let out = run(&["coverage", "--no-sim"], &dir.path().join("missing.toml"));
    assert_eq!(out.status.code(), Some(2));

    let out = bin().args(["sweep"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_config_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let value: toml::Value = toml::from_str(&example_text()).unwrap();
    let cfg = write_config(dir.path(), "cfg.json", &serde_json::to_string(&value).unwrap());
    let from_json = run(&["sweep", "--no-sim"], &cfg);
    let from_toml = run(&["sweep", "--no-sim"], &example());
    assert_eq!(from_json.status.code(), Some(0), "{}", stderr(&from_json));
    assert_eq!(from_json.stdout, from_toml.stdout);
}
