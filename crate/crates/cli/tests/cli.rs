use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cslbounds"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn report_flags_only_back_motion() {
    let o = run(&["report", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(rows.len() >= 25, "{} rows", rows.len());
    let failing: Vec<&&str> = rows.iter().filter(|r| r.ends_with(",FAIL")).collect();
    assert_eq!(failing.len(), 1, "{failing:?}");
    assert!(failing[0].contains("ion_back_motion"));
}

#[test]
fn report_channel_filter() {
    let o = run(&["report", "--channel", "igm", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
    assert_eq!(run(&["report", "--channel", "nowhere"]).status.code(), Some(3));
}

#[test]
fn report_zero_tolerance_fails() {
    let o = run(&[
        "report",
        "--channel",
        "igm",
        "--tolerance-scale",
        "0",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().skip(1).all(|r| r.ends_with(",FAIL")));
}

#[test]
fn eval_supercurrent_case_i() {
    let o = run(&["eval", "supercurrent", "--lambda", "4e-10", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let obs = v[0]["observables"].as_array().unwrap();
    let rate = obs.iter().find(|o| o["name"] == "decay_rate").unwrap()["value"]
        .as_f64()
        .unwrap();
    assert!(rate > 0.5e-19 && rate < 2e-19, "{rate}");
}

#[test]
fn eval_dust_overrides() {
    let o = run(&["eval", "dust", "--Tg", "20", "--kappa", "0.05", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let obs = v[0]["observables"].as_array().unwrap();
    let w = obs.iter().find(|o| o["name"] == "emissivity").unwrap()["value"]
        .as_f64()
        .unwrap();
    assert!((w / 2e14 - 1.0).abs() <= 0.25, "{w}");
}

#[test]
fn eval_errors() {
    assert_eq!(run(&["eval", "nope"]).status.code(), Some(3));
    assert_eq!(run(&["eval", "dust", "--Tg", "hot"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "dust", "--grating_cm", "1"]).status.code(), Some(2));
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    fs::write(&path, r#"{"grid": {"lambda_points": 0}}"#).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(run(&["--config", p, "scan"]).status.code(), Some(2));
    fs::write(&path, r#"{"mystery": 1}"#).unwrap();
    assert_eq!(run(&["--config", p, "report"]).status.code(), Some(2));
    fs::write(&path, r#"{"channels": []}"#).unwrap();
    assert_eq!(run(&["--config", p, "scan"]).status.code(), Some(2));
    fs::write(&path, "not json").unwrap();
    assert_eq!(run(&["--config", p, "report"]).status.code(), Some(2));
}

#[test]
fn scan_deterministic_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    for fmt in ["csv", "json"] {
        let a = dir.path().join(format!("a.{fmt}"));
        let b = dir.path().join(format!("b.{fmt}"));
        for (path, threads) in [(&a, "1"), (&b, "6")] {
            let o = run(&[
                "scan",
                "--format",
                fmt,
                "--threads",
                threads,
                "--out",
                path.to_str().unwrap(),
            ]);
            assert_eq!(o.status.code(), Some(0));
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    }
    let csv = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "lambda_s_inv,r_c_cm,channel,verdict,bound_s_inv,multiplier,flags"
    );
    assert_eq!(csv.lines().count(), 1 + 50 * 50 * 14);
}

#[test]
fn scan_standard_cell() {
    let o = run(&["scan", "--case", "standard", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains(",photographic,lower_bound_unmet,"));
    assert!(text.contains(",planetary,flagged,"));
    assert_eq!(text.lines().count(), 15);
}

#[test]
fn scan_unwritable_output() {
    let o = run(&["scan", "--case", "standard", "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_passes() {
    let o = run(&["oracle"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("FAIL"));
}
