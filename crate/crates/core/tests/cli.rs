use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boundcount")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn tmp(name: &str, text: &str) -> std::path::PathBuf {
    let p = std::env::temp_dir().join(format!("boundcount-{}-{name}", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn count_disk_total() {
    let out = run(&["count", "--catalog", "square_well", "--depth", "25", "--dim", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["count"], 6);
    assert_eq!(v["command"], "count");
    assert_eq!(v["classifier"], "COMPACT");
    assert!(v["version"].is_string());
    assert_eq!(v["config"]["potential"]["depth"], 25.0);
}

#[test]
fn count_csv_lists_channels() {
    let out = run(&["count", "--catalog", "square_well", "--depth", "25", "--dim", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["m,count,multiplicity", "0,2,1", "1,1,2", "2,1,2"]);
}

#[test]
fn infinite_tail() {
    let out = run(&["count", "--catalog", "inverse_square_tail", "--lambda", "1.25"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["count"], "infinite");
}

#[test]
fn potential_file_round_trip() {
    let path = tmp(
        "well.json",
        r#"{"space":"line","dimension":1,"pieces":[{"from":-1,"to":1,"expr":"-50"}]}"#,
    );
    let out = run(&["count", "--file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    // 2·√50/π = 4.5
    assert_eq!(json(&out)["count"], 5);
}

#[test]
fn parse_errors_exit_2() {
    let bad = tmp("bad.json", "{\"space\": \"line\", \"pieces\": [");
    let out = run(&["count", "--file", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["error"].is_string());

    let expr = tmp(
        "expr.json",
        r#"{"space":"line","dimension":1,"pieces":[{"from":0,"to":1,"expr":"-1/(x"}]}"#,
    );
    assert_eq!(run(&["count", "--file", expr.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["count", "--catalog", "no_such_family"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--catalog", "square_well", "--depth", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn strict_marginal_exits_3() {
    let args = ["count", "--catalog", "log_log_tail", "--param", "form=1", "--mu", "1"];
    let lax = run(&args);
    assert_eq!(lax.status.code(), Some(0));
    assert_eq!(json(&lax)["classifier"], "BORDERLINE");
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(run(&strict).status.code(), Some(3));
}

#[test]
fn bounds_report_and_filter() {
    let out = run(&["bounds", "--catalog", "square_well", "--depth", "1", "--dim", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let j = v["entries"]["NEWTON_SETO"]["value"].as_f64().unwrap();
    assert!((j - 1.125).abs() < 1e-6);
    assert_eq!(v["entries"]["ONE_D_LINEAR"]["applicable"], false);
    assert_eq!(v["ln_minus"], "ln⁻(t) = max(−ln t, 0)");

    let out = run(&["bounds", "--catalog", "square_well", "--depth", "1", "--dim", "2", "--formula", "total_2d", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("TOTAL_2D,"));
}

#[test]
fn energy_with_bracket() {
    let out = run(&["energy", "--catalog", "nieto_well", "--bracket", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let e = v["eigenvalue"]["energy"].as_f64().unwrap();
    assert!((e / -8.8506e-18 - 1.0).abs() < 1e-3, "{e}");
    let lo = v["bracket"]["lower_kappa2"].as_f64().unwrap();
    let hi = v["bracket"]["upper_kappa2"].as_f64().unwrap();
    assert!(lo < -e && -e < hi);
}

#[test]
fn energy_missing_state() {
    let out = run(&["energy", "--catalog", "square_well", "--depth", "1", "--dim", "1", "--index", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["error"].as_str().unwrap().contains("no such state"));
}

#[test]
fn regge_count_matches() {
    let out = run(&["regge", "--catalog", "square_well", "--depth", "25", "--dim", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["count"]["count"], 6);
    assert!(v["moments"]["lhs"].as_f64().unwrap() <= v["moments"]["mid"].as_f64().unwrap());
}

#[test]
fn verify_suite_writes_file() {
    let path = std::env::temp_dir().join(format!("boundcount-{}-verify.json", std::process::id()));
    let out = run(&["verify", "--suite", "appendix3", "--trials", "20", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["suites"][0]["suite"], "appendix3");
    assert_eq!(v["suites"][0]["checks"], 20);
    assert_eq!(v["passed"], true);
}

#[test]
fn transform_output_loads_back() {
    let out = run(&["transform", "--catalog", "square_well", "--depth", "3", "--dim", "1", "--kind", "log-map"]);
    assert_eq!(out.status.code(), Some(0));
    let path = tmp("mapped.json", std::str::from_utf8(&out.stdout).unwrap());
    let back = run(&["count", "--file", path.to_str().unwrap(), "--m", "0"]);
    assert_eq!(back.status.code(), Some(0));
    let line = run(&["count", "--catalog", "square_well", "--depth", "3", "--dim", "1"]);
    assert_eq!(json(&back)["count"], json(&line)["count"]);
}
