use std::path::Path;
use std::process::{Command, Output};

use wente_cli::report::{Summary, SurfaceReport};

fn wente(args: &[&str]) -> Output {
    wente_env(args, &[])
}

fn wente_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wente"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("run wente")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn table2_prints_all_rows() {
    let o = wente(&["table2", "--paper-check"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("17.732434"));
    assert!(text.contains("2.555602"));
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(wente(&["matrix", "2/4"]).status.code(), Some(2));
    assert_eq!(wente(&["matrix", "three/two"]).status.code(), Some(2));
    assert_eq!(wente(&["matrix", "5/2"]).status.code(), Some(2));
    assert_eq!(wente(&["matrix", "7/5"]).status.code(), Some(2));
    assert_eq!(wente(&["integrals", "5/4"]).status.code(), Some(2));
    assert_eq!(wente(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(wente(&["table2", "--h", "-1"]).status.code(), Some(2));
    assert_eq!(
        wente(&["oracle", "3/2", "--cutoff", "1"]).status.code(),
        Some(2)
    );
}

#[test]
fn strict_margin_fails_verification() {
    let o = wente(&["matrix", "3/2", "--min-margin", "100"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("NOT negative definite"));
    let o = wente(&["verify-all", "--min-margin", "100", "--oracle-cutoff", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn matrix_both_paths() {
    let o = wente(&[
        "matrix",
        "3/2",
        "--mode",
        "both",
        "--format",
        "json",
        "--paper-check",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["max_discrepancy"].as_f64().unwrap() < 1e-7);
    assert_eq!(v["theorem1_bound"], 8);
    let diag = v["matrix_table4"][0][0].as_f64().unwrap();
    assert!((diag + 9.497).abs() < 1e-3, "{diag}");

    let o = wente(&["matrix", "4/3", "--mode", "both"]);
    let text = stdout(&o);
    assert!(text.contains("-0.254"));
    assert!(text.contains("max discrepancy"));
}

#[test]
fn integrals_json() {
    let o = wente(&["integrals", "4/3", "--format", "json", "--paper-check"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let rows = v["integrals"].as_array().unwrap();
    let i0 = rows.iter().find(|r| r["label"] == "I0(0,4)").unwrap();
    assert!((i0["value"].as_f64().unwrap() - 0.0667).abs() < 1e-3);
}

#[test]
fn oracle_counts_and_invariance() {
    let o = wente(&["oracle", "3/2", "--cutoff", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("h_invariance: true"));
    let v = json(&wente(&[
        "oracle", "3/2", "--cutoff", "4", "--format", "json",
    ]));
    let counts: Vec<u64> = v["counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c[1].as_u64().unwrap())
        .collect();
    assert_eq!(counts.len(), 3);
    assert!(counts.windows(2).all(|w| w[0] <= w[1]));
    assert!(*counts.last().unwrap() >= 9);
}

fn strip_timing(mut v: serde_json::Value) -> serde_json::Value {
    if let Some(o) = v.as_object_mut() {
        o.remove("timing");
    }
    v
}

fn read_dir_json(dir: &Path) -> Vec<(String, serde_json::Value)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let v: serde_json::Value =
                serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                strip_timing(v),
            )
        })
        .collect()
}

#[test]
fn verify_all_json_is_deterministic_and_round_trips() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = wente(&[
            "verify-all",
            "--paper-check",
            "--oracle-cutoff",
            "3",
            "--format",
            "json",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let (ra, rb) = (read_dir_json(a.path()), read_dir_json(b.path()));
    assert_eq!(ra.len(), 9);
    assert_eq!(ra, rb);

    let summary: Summary = serde_json::from_value(
        ra.iter()
            .find(|(n, _)| n == "summary.json")
            .unwrap()
            .1
            .clone(),
    )
    .unwrap();
    assert!(summary.all_verified);
    assert_eq!(summary.candidates.len(), 8);
    assert_eq!(summary.fractions.len(), 27);
    let text = std::fs::read_to_string(a.path().join("W_3_2.json")).unwrap();
    let report: SurfaceReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.theorem1_bound, Some(8));
    assert!(report.paper_check.as_ref().unwrap().iter().all(|c| c.pass));
    let again: SurfaceReport =
        serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(again, report);
}

#[test]
fn verify_all_csv() {
    let o = wente(&["verify-all", "--format", "csv", "--oracle-cutoff", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9);
    assert!(lines[0].starts_with("frac,"));
    assert!(lines[1].starts_with("3/2,"));
    assert!(lines[8].starts_with("16/9,"));
}

#[test]
fn config_file_and_env_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "min_margin = 100.0\nformat = \"json\"\n").unwrap();
    let p = path.to_str().unwrap();

    let o = wente(&["--config", p, "matrix", "7/4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(json(&o)["definiteness"]["negative_definite"] == false);

    // Environment beats the file; flags beat both.
    let o = wente_env(
        &["--config", p, "matrix", "7/4"],
        &[("WENTE_MIN_MARGIN", "1.0")],
    );
    assert_eq!(o.status.code(), Some(0));
    let o = wente_env(
        &[
            "--config",
            p,
            "--format",
            "text",
            "matrix",
            "7/4",
            "--min-margin",
            "0",
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("index >= 8"));

    std::fs::write(&path, "no_such_key = 1\n").unwrap();
    assert_eq!(wente(&["--config", p, "table2"]).status.code(), Some(2));
    assert_eq!(
        wente(&["--config", "/nonexistent.toml", "table2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        wente_env(&["table2"], &[("WENTE_H", "abc")]).status.code(),
        Some(2)
    );
}

#[test]
fn mean_curvature_rescales_periods() {
    let v = json(&wente(&["table2", "--h", "1", "--format", "json"]));
    let x = v["rows"][0]["x_len"].as_f64().unwrap();
    // Lengths scale like 1/sqrt(H).
    assert!((x - 2.555_601_9 / 2f64.sqrt()).abs() < 1e-6, "{x}");
}
