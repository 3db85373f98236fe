use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac-sea"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

const SINC: &str = r#"{"box": {"length": 10, "mass": 1}, "potential": {"sinc": {"w": 1, "t": 20}},
  "cutoffs": {"n": [1, 5, 40, 200]}, "shift": {"branch": -1, "r_min": -60, "r_max": 60},
  "oracle": {"q": [2e-3, 1e-3], "steps": 4000, "modes": [{"branch": -1, "r": 1}]}}"#;

const RANDOM: &str = r#"{"box": {"length": 10, "mass": 1}, "potential": {"random": {"seed": 11}},
  "cutoffs": {"n": [1, 3, 6]}, "shift": {"r_min": -4, "r_max": 4},
  "oracle": {"q": [1e-2, 1e-3], "steps": 2000, "modes": [{"branch": -1, "r": 0}, {"branch": 1, "r": -2}]}}"#;

#[test]
fn shift_rows_match_closed_form() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "c.json", SINC);
    let out = run(dir.path(), &["shift", "--config", "c.json", "--out", "o"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("o/shift.csv"));
    assert_eq!(header, ["r", "closed_form", "mode_sum", "relative_diff"]);
    assert_eq!(rows.len(), 121);
    assert!(column(&header, &rows, "closed_form").iter().all(|&c| c < 0.0));
    assert!(column(&header, &rows, "relative_diff").iter().all(|&d| d < 1e-10));
    assert!(dir.path().join("o/shift.json").exists());
}

#[test]
fn empty_shift_range_writes_header_only() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "c.json",
        r#"{"box": {"length": 10, "mass": 1}, "potential": {"sinc": {"w": 1}}, "shift": {"r_min": 3, "r_max": 2}}"#,
    );
    let out = run(dir.path(), &["shift", "--config", "c.json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("shift.csv")).unwrap();
    assert_eq!(text, "r,closed_form,mode_sum,relative_diff\n");
}

#[test]
fn vacuum_columns_for_sinc_burst() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "c.json", SINC);
    let out = run(dir.path(), &["vacuum", "--config", "c.json", "--extrapolate"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("vacuum.csv"));
    assert_eq!(
        header,
        ["N", "Y_N", "X1_N", "X2_N", "total", "qft_standard", "qft_redefined", "analytic_limit"]
    );
    assert!(column(&header, &rows, "qft_standard").iter().all(|&q| q == 0.0));
    let total = column(&header, &rows, "total");
    let redefined = column(&header, &rows, "qft_redefined");
    for (t, r) in total.iter().zip(&redefined) {
        assert!((t - r).abs() <= 1e-12 * t.abs());
    }
    let limit = column(&header, &rows, "analytic_limit")[0];
    assert!((limit + 16.0 * std::f64::consts::PI.powi(3) / 10.0).abs() < 1e-12);
    assert!(total[3] < -49.0);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("vacuum.json")).unwrap()).unwrap();
    let extrapolated = summary["extrapolated_total"].as_f64().unwrap();
    assert!((extrapolated - limit).abs() < (total[3] - limit).abs());
    assert_eq!(summary["rows"].as_array().unwrap().len(), 4);
    assert!(summary["rows"][0].get("x2a").is_some());
}

#[test]
fn oracle_agrees_with_perturbation() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "c.json", SINC);
    let out = run(dir.path(), &["oracle", "--config", "c.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("oracle.csv"));
    assert_eq!(rows.len(), 2);
    assert!(column(&header, &rows, "norm_drift").iter().all(|&d| d < 1e-8));
    let diffs = column(&header, &rows, "relative_diff");
    assert!(diffs[1] < 1e-2);
}

#[test]
fn zero_potential_oracle_gives_zero() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "c.json",
        r#"{"box": {"length": 10, "mass": 1},
            "potential": {"spec": {"harmonics": [], "window": {"t0": 0, "tf": 5}}},
            "oracle": {"q": [1e-2, 1e-3], "steps": 100, "modes": [{"branch": 1, "r": 3}]}}"#,
    );
    let out = run(dir.path(), &["oracle", "--config", "c.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("oracle.csv"));
    assert!(column(&header, &rows, "measured_over_q2").iter().all(|&x| x == 0.0));
    assert!(column(&header, &rows, "perturbative").iter().all(|&x| x == 0.0));
}

#[test]
fn spec_path_is_relative_to_config() {
    let dir = TempDir::new().unwrap();
    std::fs::create_dir(dir.path().join("cfg")).unwrap();
    write(
        &dir.path().join("cfg"),
        "v.json",
        r#"{"harmonics": [
              {"n": 1, "profile": {"kind": "sampled", "times": [0, 1, 2], "re": [0, 0.3, 0], "im": [0, 0.1, 0]}},
              {"n": -1, "profile": {"kind": "sampled", "times": [0, 1, 2], "re": [0, 0.3, 0], "im": [0, -0.1, 0]}}],
            "window": {"t0": 0, "tf": 2}}"#,
    );
    write(
        &dir.path().join("cfg"),
        "c.json",
        r#"{"box": {"length": 10, "mass": 1}, "potential": {"spec_path": "v.json"}, "cutoffs": {"n": [2]}}"#,
    );
    let out = run(dir.path(), &["ftable", "--config", "cfg/c.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("ftable.csv"));
    assert_eq!(header, ["dest_branch", "dest_r", "src_branch", "src_r", "re", "im"]);
    assert!(!rows.is_empty());
}

#[test]
fn output_is_identical_across_thread_counts() {
    for (name, text) in [("sinc", SINC), ("random", RANDOM)] {
        let dir = TempDir::new().unwrap();
        write(dir.path(), "c.json", text);
        for cmd in ["shift", "vacuum", "oracle", "ftable"] {
            let mut outputs = Vec::new();
            for threads in ["1", "3"] {
                let out_dir = format!("t{threads}");
                let out = run(dir.path(), &[cmd, "--config", "c.json", "--out", &out_dir, "--threads", threads]);
                assert!(out.status.success(), "{name} {cmd}: {}", String::from_utf8_lossy(&out.stderr));
                let csv = std::fs::read(dir.path().join(&out_dir).join(format!("{cmd}.csv"))).unwrap();
                let json = std::fs::read(dir.path().join(&out_dir).join(format!("{cmd}.json"))).unwrap();
                outputs.push((csv, json));
            }
            assert!(outputs[0] == outputs[1], "{name} {cmd} differs across thread counts");
        }
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let code = |args: &[&str]| run(dir.path(), args).status.code();

    // malformed and missing configuration
    write(dir.path(), "bad.json", r#"{"box": {"length": 10}}"#);
    assert_eq!(code(&["shift", "--config", "bad.json"]), Some(2));
    assert_eq!(code(&["shift", "--config", "missing.json"]), Some(2));
    assert_eq!(code(&["shift"]), Some(2));
    assert_eq!(code(&["nonsense"]), Some(2));

    // k_w ≥ m
    write(
        dir.path(),
        "fast.json",
        r#"{"box": {"length": 10, "mass": 1}, "potential": {"sinc": {"w": 2}}}"#,
    );
    assert_eq!(code(&["vacuum", "--config", "fast.json"]), Some(3));

    // table window below N + w
    write(
        dir.path(),
        "narrow.json",
        r#"{"box": {"length": 10, "mass": 1}, "potential": {"sinc": {"w": 1}}, "cutoffs": {"n": [10], "s": 10}}"#,
    );
    assert_eq!(code(&["vacuum", "--config", "narrow.json"]), Some(3));

    // oracle basis too small to hold the evolved state
    write(
        dir.path(),
        "leak.json",
        r#"{"box": {"length": 10, "mass": 1}, "potential": {"sinc": {"w": 1, "t": 5}}, "cutoffs": {"m": 2},
            "oracle": {"q": [0.1], "steps": 200, "modes": [{"branch": -1, "r": 1}]}}"#,
    );
    assert_eq!(code(&["oracle", "--config", "leak.json"]), Some(3));

    write(
        dir.path(),
        "ok.json",
        r#"{"box": {"length": 10, "mass": 1}, "potential": {"sinc": {"w": 1}}, "cutoffs": {"n": [3]}}"#,
    );
    assert_eq!(code(&["vacuum", "--config", "ok.json"]), Some(0));
}
