use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gashell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gashell")).args(args).output().expect("spawn gashell")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const BENDING_CASE: &str = r#"{
    "schema": "gashell-case/1",
    "chart": {"kind": "cylinder", "radius": 1.5},
    "motion": {"kind": "displacement", "terms": [
        {"component": 2, "basis": "frame", "coeff": 0.02, "powers": [2, 0, 0]},
        {"component": 0, "coeff": 0.01, "powers": [0, 0, 1], "freq": [0, 1, 0]}
    ]},
    "grid": {"x1": [-0.5, 0.5], "x2": [0.0, 1.0], "n1": 3, "n2": 3},
    "time": 0.3,
    "body_force": "manufactured",
    "outputs": ["E", "H", "detF", "S", "momentum", "angular", "mass"]
}"#;

#[test]
fn verify_geometry_passes() {
    let o = gashell(&["verify", "geometry"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.lines().last().unwrap().starts_with("PASS:"));
    assert!(out.lines().filter(|l| l.starts_with("[PASS] geometry/")).count() > 10);
}

#[test]
fn injected_asymmetry_is_reported() {
    let o = gashell(&["verify", "balance", "--inject-asymmetry"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let failing: Vec<&str> = out.lines().filter(|l| l.starts_with("[FAIL]")).collect();
    assert!(!failing.is_empty());
    for line in &failing {
        assert!(line.contains("angular_momentum/") && line.ends_with("/12 measured=1.000e-1 tol=1.0e-10"), "{line}");
    }
    assert!(out.contains("r12=-0.100000000000"), "{out}");
}

#[test]
fn tolerance_override_applies() {
    let o = gashell(&["verify", "stress", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("tol=1.0e-300"));
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let o = gashell(&["verify", "everything"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown suite"), "{}", stderr(&o));
}

#[test]
fn missing_config_is_an_io_error() {
    let o = gashell(&["run", "/nonexistent/case.json"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("cannot read"));
}

#[test]
fn malformed_configs_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("typo.json", BENDING_CASE.replace("\"time\"", "\"tiem\"")),
        ("schema.json", BENDING_CASE.replace("gashell-case/1", "gashell-case/9")),
        ("radius.json", BENDING_CASE.replace("1.5", "0.0")),
        ("syntax.json", BENDING_CASE.replace('}', "")),
    ];
    for (name, text) in cases {
        let path = write(dir.path(), name, &text);
        let o = gashell(&["run", &path]);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error:"), "{name}: {}", stderr(&o));
    }
}

#[test]
fn run_writes_json_and_passes_manufactured_case() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "case.json", BENDING_CASE);
    let out = dir.path().join("out.json");
    let o = gashell(&["run", &cfg, "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("[PASS] momentum"));

    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["schema"], "gashell-result/1");
    assert_eq!(v["pass"], true);
    assert_eq!(v["config"]["chart"]["radius"], 1.5);
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 9);
    let p = &points[4];
    assert_eq!(p["i"], 1);
    assert_eq!(p["j"], 1);
    assert!(p["values"]["S_12"].is_number());
    assert!(p["values"]["momentum_3"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn run_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "case.json", BENDING_CASE);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = gashell(&["run", &cfg, "-o", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("i,j,X1,X2,"), "{header}");
    assert!(header.contains(",E_11,E_12,E_21,E_22,"), "{header}");
    assert!(header.ends_with(",error"));
    assert_eq!(lines.count(), 9);
}

#[test]
fn json_on_stdout_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "case.json", BENDING_CASE);
    let a = gashell(&["run", &cfg]);
    let b = gashell(&["run", &cfg]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    serde_json::from_slice::<Value>(&a.stdout).unwrap();
    assert!(stderr(&a).contains("[PASS] angular"));
}

#[test]
fn body_moment_enters_transverse_shear() {
    let dir = tempfile::tempdir().unwrap();
    let run = |text: &str, name: &str| -> Value {
        let cfg = write(dir.path(), name, text);
        let o = gashell(&["run", &cfg]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        serde_json::from_slice(&o.stdout).unwrap()
    };
    let base = run(BENDING_CASE, "a.json");
    let moved = run(&BENDING_CASE.replace("\"time\"", "\"body_moment\": [0.01, 0.0], \"time\""), "b.json");
    let s31 = |v: &Value| v["points"][4]["values"]["S_31"].as_f64().unwrap();
    let s11 = |v: &Value| v["points"][4]["values"]["S_11"].as_f64().unwrap();
    assert!((s31(&base) - s31(&moved)).abs() > 1e-4);
    assert_eq!(s11(&base), s11(&moved));
}

#[test]
fn cylinder_subcommand_compares_tables() {
    let dir = tempfile::tempdir().unwrap();
    let terms = r#"[
        {"component": 0, "basis": "frame", "coeff": 0.3, "powers": [1, 1, 0]},
        {"component": 1, "basis": "frame", "coeff": -0.2, "powers": [0, 2, 0]},
        {"component": 2, "basis": "frame", "coeff": 0.4, "powers": [2, 0, 0]}
    ]"#;
    let up = write(dir.path(), "uprime.json", terms);
    let out = dir.path().join("cyl.csv");
    let o = gashell(&["cylinder", "--R", "0.8", "--eps", "0.05", "--uprime", &up, "-o", out.to_str().unwrap()]);
    let summary = stdout(&o);
    let csv = fs::read_to_string(&out).unwrap();
    let header = csv.lines().next().unwrap();
    for col in ["closed_E0_11", "general_E0_11", "delta_Hprime_22", "delta_Sprime_22"] {
        assert!(header.contains(col), "{col} missing from {header}");
    }
    // the closed-form S' table carries the curvature term on 11 instead of 22
    assert_eq!(o.status.code(), Some(1), "{summary}");
    assert!(summary.contains("over tolerance: Sprime_11, Sprime_22"), "{summary}");
}

#[test]
fn cylinder_subcommand_rejects_bad_terms() {
    let dir = tempfile::tempdir().unwrap();
    let up = write(dir.path(), "uprime.json", r#"[{"component": 5, "coeff": 1.0}]"#);
    let o = gashell(&["cylinder", "--R", "1", "--eps", "0.1", "--uprime", &up]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}
