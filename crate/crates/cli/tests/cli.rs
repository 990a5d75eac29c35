//! CLI behavior: exit codes, error records, file outputs.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_signorini")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("signorini-cli-tests").join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn case_list_prints_all_names() {
    let out = Command::new(bin()).args(["case", "list"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().collect();
    assert_eq!(
        names,
        ["endpoint", "l-sd", "l-ss", "square-zero", "square-pos", "square-neg", "bubble"]
    );
}

#[test]
fn emit_unknown_case_is_input_error() {
    let out = Command::new(bin())
        .args(["case", "emit", "nonsense"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    let record: serde_json::Value = serde_json::from_str(err.trim()).expect("JSON error record");
    assert_eq!(record["error"]["kind"], "input");
}

#[test]
fn malformed_problem_file_is_input_error() {
    let dir = scratch("malformed");
    let problem = dir.join("bad.json");
    fs::write(&problem, "{\"vertices\": [[0, 0]]").unwrap();
    let out = Command::new(bin())
        .args([
            "solve",
            "--problem",
            problem.to_str().unwrap(),
            "--out",
            dir.join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("\"kind\":\"input\""), "stderr: {err}");
}

#[test]
fn analyze_without_solutions_is_analysis_error() {
    let dir = scratch("missing");
    let ok = Command::new(bin())
        .args(["case", "emit", "square-zero", "--out", dir.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(ok.success());
    let out = Command::new(bin())
        .args([
            "analyze",
            "--problem",
            dir.join("square-zero.json").to_str().unwrap(),
            "--levels",
            "3",
            "--out",
            dir.join("empty").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn solve_analyze_fit_convergence_roundtrip() {
    let dir = scratch("roundtrip");
    let status = Command::new(bin())
        .args(["case", "emit", "endpoint", "--out", dir.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let problem = dir.join("endpoint.json");
    let out_dir = dir.join("run");
    let base_args = |cmd: &str| {
        vec![
            cmd.to_string(),
            "--problem".into(),
            problem.to_str().unwrap().to_string(),
            "--h".into(),
            "0.25".into(),
            "--levels".into(),
            "3".into(),
            "--out".into(),
            out_dir.to_str().unwrap().to_string(),
        ]
    };
    assert!(Command::new(bin()).args(base_args("solve")).status().unwrap().success());
    for k in 0..3 {
        assert!(out_dir.join(format!("mesh_L{k}.txt")).exists());
        assert!(out_dir.join(format!("solution_L{k}.csv")).exists());
        assert!(out_dir.join(format!("trace_L{k}.json")).exists());
    }
    assert!(Command::new(bin()).args(base_args("analyze")).status().unwrap().success());
    let stability: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("stability.json")).unwrap())
            .unwrap();
    assert_eq!(stability["stability"]["verdict"], "stable");
    assert_eq!(stability["interval_counts"], serde_json::json!([1, 1, 1]));

    let mut fit_args = base_args("fit");
    fit_args.push("--center".into());
    fit_args.push("endpoint:0".into());
    assert!(Command::new(bin()).args(&fit_args).status().unwrap().success());
    let exponent: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("exponent.json")).unwrap())
            .unwrap();
    assert_eq!(exponent["predicted"], 1.5);
    let fitted = exponent["fitted"].as_f64().unwrap();
    assert!((fitted - 1.5).abs() < 0.25, "coarse fit {fitted}");

    assert!(Command::new(bin())
        .args(base_args("convergence"))
        .status()
        .unwrap()
        .success());
    let table = fs::read_to_string(out_dir.join("convergence.csv")).unwrap();
    assert!(table.starts_with("level,h,nodes,l2_error,h1_error\n"));
    assert!(table.lines().last().unwrap().starts_with("rates,"));
}

#[test]
fn convergence_without_exact_solution_is_analysis_error() {
    let dir = scratch("noexact");
    assert!(Command::new(bin())
        .args(["case", "emit", "square-neg", "--out", dir.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let problem = dir.join("square-neg.json");
    let out_dir = dir.join("run");
    assert!(Command::new(bin())
        .args([
            "solve",
            "--problem",
            problem.to_str().unwrap(),
            "--levels",
            "2",
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .status()
        .unwrap()
        .success());
    let out = Command::new(bin())
        .args([
            "convergence",
            "--problem",
            problem.to_str().unwrap(),
            "--levels",
            "2",
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("no exact solution"), "stderr: {err}");
}

#[test]
fn verify_map_writes_identity_report() {
    let dir = scratch("verify");
    assert!(Command::new(bin())
        .args([
            "verify-map",
            "--alpha",
            "pi/2",
            "--resolution",
            "64",
            "--out",
            dir.to_str().unwrap(),
        ])
        .status()
        .unwrap()
        .success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("verify_map.json")).unwrap()).unwrap();
    assert!(report["relative_difference"].as_f64().unwrap() <= 1e-6);
    // Bad angle is an input error.
    let out = Command::new(bin())
        .args(["verify-map", "--alpha", "7"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn grading_flag_is_parsed_and_applied() {
    let dir = scratch("grading");
    assert!(Command::new(bin())
        .args(["case", "emit", "l-sd", "--out", dir.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let problem = dir.join("l-sd.json");
    let out_dir = dir.join("run");
    assert!(Command::new(bin())
        .args([
            "solve",
            "--problem",
            problem.to_str().unwrap(),
            "--h",
            "0.25",
            "--levels",
            "1",
            "--grade",
            "0=1/3,0.5",
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .status()
        .unwrap()
        .success());
    // The graded mesh pulls nodes toward the reentrant corner: the
    // nearest node ends up well inside the target h = 0.25.
    let mesh_text = fs::read_to_string(out_dir.join("mesh_L0.txt")).unwrap();
    let mesh = signorini_core::TriMesh::from_text(&mesh_text).unwrap();
    let min_positive = mesh
        .nodes()
        .iter()
        .map(|p| p.dist(signorini_core::Point::new(0.0, 0.0)))
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min);
    assert!(min_positive < 0.1, "closest node at {min_positive}");
    // Malformed grading spec is an input error.
    let out = Command::new(bin())
        .args([
            "solve",
            "--problem",
            problem.to_str().unwrap(),
            "--grade",
            "bogus",
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
