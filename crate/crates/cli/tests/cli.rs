use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn circsizer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circsizer"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn missing_input_names_the_path() {
    let out = circsizer(&["density", "--input", "/no/such/dir/winds.csv"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("/no/such/dir/winds.csv"), "{}", stderr(&out));
}

#[test]
fn unknown_scenario_lists_valid_names() {
    let out = circsizer(&["simulate", "--scenario", "D9"]);
    assert!(!out.status.success());
    let msg = stderr(&out);
    for name in ["D9", "D1", "D2", "D3", "D4", "R1"] {
        assert!(msg.contains(name), "{msg}");
    }
    let out = circsizer(&["density", "--scenario", "D9"]);
    assert!(!out.status.success());
}

#[test]
fn input_and_scenario_are_exclusive() {
    let out = circsizer(&["density", "--scenario", "D1", "--input", "x.csv"]);
    assert!(!out.status.success());
    let out = circsizer(&["density"]);
    assert!(!out.status.success());
}

#[test]
fn repeated_runs_are_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let json = dir.path().join(format!("map{workers}.json"));
        let svg = dir.path().join(format!("map{workers}.svg"));
        let out = circsizer(&[
            "density", "--scenario", "D2", "--n", "150", "--seed", "11", "--nu", "2,8,25",
            "--ngrid", "64", "--B", "60", "--workers", workers,
            "--out-json", json.to_str().unwrap(), "--out-svg", svg.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        outputs.push((std::fs::read(&json).unwrap(), std::fs::read(&svg).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn d2_map_has_expected_size_and_two_peaks_at_nu_10() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("d2.json");
    let out = circsizer(&[
        "density", "--scenario", "D2", "--n", "200", "--seed", "1", "--nu", "1,5,10,20,31",
        "--out-json", json.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = read_json(&json);
    assert_eq!(v["cells"].as_array().unwrap().len(), 5 * 250);
    let summary = stdout(&out);
    let line = summary.lines().find(|l| l.starts_with("nu=10\t")).unwrap();
    assert!(line.contains("peaks=2\t"), "{line}");
    // progress goes to stderr only
    assert!(!summary.contains("ring"));
    assert!(stderr(&out).contains("ring 5/5"));
}

#[test]
fn json_records_effective_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("m.json");
    let out = circsizer(&[
        "run", "--mode", "density", "--scenario", "D1", "--n", "80", "--seed", "5",
        "--nu", "1:20:4", "--nu-log", "--B", "30", "--out-json", json.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = read_json(&json);
    assert_eq!(v["mode"], "density");
    assert_eq!(v["grid"]["ngrid"], 250);
    assert_eq!(v["grid"]["nu"].as_array().unwrap().len(), 4);
    assert_eq!(v["grid"]["nu"][3], 20.0);
    assert_eq!(v["config"]["alpha"], 0.05);
    assert_eq!(v["config"]["B"], 30);
    assert_eq!(v["config"]["B2"], 250);
    assert_eq!(v["config"]["seed"], 5);
    assert_eq!(v["config"]["ess_threshold"], 5.0);
    assert_eq!(v["provenance"]["kind"], "scenario");
    assert_eq!(v["provenance"]["source"], "D1");
    assert!(v["provenance"]["note"].as_str().unwrap().contains("stand-in"));
    assert_eq!(v["provenance"]["details"]["labels"], "3");
    assert!(v["provenance"]["details"].get("workers").is_none());
}

#[test]
fn simulate_is_deterministic_and_feeds_density() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = circsizer(&["simulate", "--scenario", "D2", "--n", "200", "--seed", "1", "--output", p.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("# scenario D2"));
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 201);

    // reading the simulated file gives the same map as simulating in place
    let from_file = dir.path().join("file.json");
    let in_place = dir.path().join("scen.json");
    let common = ["--seed", "1", "--nu", "3,12", "--ngrid", "40", "--B", "40"];
    let mut args = vec!["density", "--input", a.to_str().unwrap(), "--out-json", from_file.to_str().unwrap()];
    args.extend(common);
    assert!(circsizer(&args).status.success());
    let mut args = vec!["density", "--scenario", "D2", "--n", "200", "--out-json", in_place.to_str().unwrap()];
    args.extend(common);
    assert!(circsizer(&args).status.success());
    assert_eq!(read_json(&from_file)["cells"], read_json(&in_place)["cells"]);
}

#[test]
fn large_d2_sample_is_balanced_about_the_axis() {
    let out = circsizer(&["simulate", "--scenario", "D2", "--n", "10000", "--seed", "3"]);
    assert!(out.status.success());
    let angles: Vec<f64> = stdout(&out)
        .lines()
        .filter(|l| !l.starts_with('#') && *l != "theta")
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(angles.len(), 10_000);
    let n = angles.len() as f64;
    let c = angles.iter().map(|t| t.cos()).sum::<f64>() / n;
    let s = angles.iter().map(|t| t.sin()).sum::<f64>() / n;
    assert!(c.abs() < 0.03 && s.abs() < 0.03, "{c} {s}");
}

#[test]
fn regression_requires_response_column() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    std::fs::write(&csv, "theta,speed\n0.1,1\n0.5,2\n1.0,3\n").unwrap();
    let out = circsizer(&["regression", "--input", csv.to_str().unwrap()]);
    assert!(!out.status.success());
    let msg = stderr(&out);
    assert!(msg.contains("'y'") && msg.contains("speed"), "{msg}");
}

#[test]
fn constant_response_gives_no_significant_cells() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("flat.csv");
    let mut text = String::from("theta,y\n");
    for i in 0..60 {
        text.push_str(&format!("{},{}\n", i as f64 * 0.1047, 3.5));
    }
    std::fs::write(&csv, text).unwrap();
    let json = dir.path().join("flat.json");
    let out = circsizer(&[
        "regression", "--input", csv.to_str().unwrap(), "--nu", "2,10", "--ngrid", "30",
        "--B", "20", "--B2", "10", "--out-json", json.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = read_json(&json);
    for c in v["cells"].as_array().unwrap() {
        let state = c["state"].as_str().unwrap();
        assert!(state == "flat" || state == "sparse", "{state}");
        assert_eq!(c["estimate"], 0.0);
    }
}

#[test]
fn compass_degree_input_with_lag() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("wind.csv");
    let mut text = String::from("time,dir\n");
    for h in 0..2000 {
        text.push_str(&format!("{h},{}\n", if h % 7 == 0 { 999 } else { (h * 37) % 360 }));
    }
    std::fs::write(&csv, text).unwrap();
    let json = dir.path().join("w.json");
    let out = circsizer(&[
        "density", "--input", csv.to_str().unwrap(), "--angle-column", "dir",
        "--angle-unit", "degrees", "--convention", "compass", "--lag", "5", "--sentinel", "999",
        "--nu", "2,6", "--ngrid", "36", "--B", "20", "--out-json", json.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = read_json(&json);
    let details = &v["provenance"]["details"];
    assert_eq!(details["rows_read"], "2000");
    assert_eq!(details["lag"], "5");
    // rows 0, 5, ..., 1995; those divisible by 35 are calm codes
    assert_eq!(v["provenance"]["n"], 400 - 58);
    assert!(stderr(&out).contains("dropped 58 of 400"));
}

#[test]
fn invalid_flags_fail() {
    for args in [
        vec!["density", "--scenario", "D1", "--labels", "5"],
        vec!["density", "--scenario", "D1", "--alpha", "0.7"],
        vec!["density", "--scenario", "D1", "--nu", "5,1"],
        vec!["density", "--scenario", "D1", "--ngrid", "4"],
        vec!["density", "--scenario", "R1"],
        vec!["regression", "--scenario", "D1"],
    ] {
        let out = circsizer(&args);
        assert!(!out.status.success(), "{args:?}");
    }
}

#[test]
fn unwritable_output_fails() {
    let out = circsizer(&[
        "density", "--scenario", "D1", "--n", "50", "--nu", "5", "--ngrid", "16", "--B", "10",
        "--out-json", "/no/such/dir/map.json",
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("/no/such/dir/map.json"));
}
