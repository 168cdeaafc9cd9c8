use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_schurkit"));
    c.env_remove("SCHURKIT_DENSE_CAP");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn schema(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_valid(name: &str, doc: &Value) {
    let v = jsonschema::validator_for(&schema(name)).expect("schema compiles");
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

fn temp_file(dir: &tempfile::TempDir, name: &str, contents: &Value) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(contents).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

fn column(v: &[(f64, f64)]) -> Value {
    serde_json::json!({
        "rows": v.len(),
        "cols": 1,
        "data": v.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
        "row_labels": (0..v.len()).map(|i| i.to_string()).collect::<Vec<_>>(),
        "col_labels": ["0"],
    })
}

fn dephasing_spec(p: f64) -> Value {
    let (c, s) = ((1.0 - p).sqrt(), p.sqrt());
    let m = [[c, 0.0], [s, 0.0], [0.0, c], [0.0, -s]];
    serde_json::json!({
        "d_b": 2,
        "d_e": 2,
        "isometry": {
            "rows": 4,
            "cols": 2,
            "data": m.iter().flatten().map(|&x| [x, 0.0]).collect::<Vec<_>>(),
            "row_labels": ["00", "01", "10", "11"],
            "col_labels": ["0", "1"],
        },
    })
}

#[test]
fn dims_lists_qubit_triple_dimensions() {
    let out = run(&["dims", "--d", "2", "--n", "3", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows, vec![vec!["(3,0)", "4", "1"], vec!["(2,1)", "2", "2"]]);
    let doc = json_of(&["dims", "--d", "2", "--n", "3"]);
    assert_eq!(doc["total"], 8);
}

#[test]
fn schur_on_one_qudit_is_identity_shaped() {
    let doc = json_of(&["schur", "--d", "2", "--n", "1"]);
    let m = &doc["matrix"];
    assert_eq!((m["rows"].as_u64(), m["cols"].as_u64()), (Some(2), Some(2)));
    let data: Vec<[f64; 2]> = serde_json::from_value(m["data"].clone()).unwrap();
    assert_eq!(data, vec![[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]);
    assert_eq!(doc["codec"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_reports_no_leakage() {
    let doc = json_of(&["verify", "--d", "2", "--n", "4", "--trials", "20", "--seed", "7"]);
    assert!(doc["max_leakage"].as_f64().unwrap() < 1e-10);
    assert!(doc["max_residual"].as_f64().unwrap() < 1e-9);
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["trials"].as_array().unwrap().len(), 20);
}

#[test]
fn every_document_matches_its_schema() {
    let dir = tempfile::tempdir().unwrap();
    let spec = temp_file(&dir, "channel.json", &dephasing_spec(0.3));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let state = temp_file(&dir, "psi.json", &column(&[(h, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, h)]));
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("dims", vec!["dims", "--d", "3", "--n", "4"]),
        ("kostka", vec!["kostka", "--d", "3", "--lambda", "2,1"]),
        ("schur", vec!["schur", "--d", "2", "--n", "3"]),
        ("cg", vec!["cg", "--d", "3", "--lambda", "2,1"]),
        ("verify", vec!["verify", "--d", "3", "--n", "2", "--trials", "3"]),
        ("rho", vec!["rho", "--r", "0.6,0.3,0.1", "--n", "3"]),
        ("spectrum", vec!["spectrum", "--r", "0.7,0.3", "--n", "8", "--trials", "50", "--delta", "0.1,0.3"]),
        ("concentrate", vec!["concentrate", "--n", "3", "--state", &state]),
        ("compress", vec!["compress", "--r", "0.9,0.1", "--n", "40", "--rate", "0.8"]),
        ("compress", vec!["compress", "--r", "0.5,0.5", "--n", "4", "--rate", "0.2"]),
        ("typebounds", vec!["typebounds", "--r", "0.8,0.2", "--n", "10"]),
        ("qft", vec!["qft", "--n", "3"]),
        ("gpe", vec!["gpe", "--d", "2", "--n", "3", "--seed", "4"]),
        ("channel", vec!["channel", "--spec", &spec, "--n", "2"]),
    ];
    for (name, args) in cases {
        let doc = json_of(&args);
        assert_eq!(doc["command"], name);
        assert_valid(name, &doc);
    }
    let mut broken = json_of(&["dims", "--d", "2", "--n", "2"]);
    broken["irreps"][0]["dim_q"] = Value::from("two");
    assert!(!jsonschema::validator_for(&schema("dims")).unwrap().is_valid(&broken));
    assert_valid("channel_spec", &dephasing_spec(0.3));
    assert_valid("matrix_document", &dephasing_spec(0.3)["isometry"]);
}

#[test]
fn output_is_deterministic_given_seed() {
    for args in [
        vec!["spectrum", "--r", "0.7,0.3", "--n", "16", "--trials", "200", "--seed", "11", "--format", "csv"],
        vec!["verify", "--d", "2", "--n", "3", "--trials", "4", "--seed", "5"],
        vec!["concentrate", "--n", "3", "--seed", "9"],
        vec!["gpe", "--d", "2", "--n", "3", "--seed", "3"],
    ] {
        let (a, b) = (run(&args), run(&args));
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let a = run(&["spectrum", "--r", "0.7,0.3", "--n", "16", "--trials", "200", "--seed", "11", "--format", "csv"]);
    let b = run(&["spectrum", "--r", "0.7,0.3", "--n", "16", "--trials", "200", "--seed", "12", "--format", "csv"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dims.json");
    let out = run(&["dims", "--d", "3", "--n", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), run(&["dims", "--d", "3", "--n", "3"]).stdout);
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 1);
}

#[test]
fn csv_has_header_and_rows() {
    let out = run(&["spectrum", "--r", "0.7,0.3", "--n", "8", "--trials", "25", "--seed", "1", "--format", "csv"]);
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(r.headers().unwrap(), vec!["trial", "lambda", "estimate", "l1_error"]);
    assert_eq!(r.records().count(), 25);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(&["dims", "--d", "2", "--n", "3", "--bogus"]).status.code(), Some(64));
    assert_eq!(run(&["nonsense"]).status.code(), Some(64));
    assert_eq!(run(&["dims", "--d", "2"]).status.code(), Some(64));
    assert_eq!(run(&[]).status.code(), Some(64));
    let out = run(&["dims", "--x"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn validation_errors_exit_1() {
    assert_eq!(run(&["cg", "--d", "2", "--lambda", "1,2"]).status.code(), Some(1));
    assert_eq!(run(&["cg", "--d", "2", "--lambda", "1,1,1"]).status.code(), Some(1));
    assert_eq!(run(&["spectrum", "--r", "0.5,0.2", "--n", "4"]).status.code(), Some(1));
    assert_eq!(run(&["qft", "--n", "9"]).status.code(), Some(1));
    assert_eq!(run(&["concentrate", "--n", "2", "--state", "/nonexistent/psi.json"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = temp_file(&dir, "bad.json", &column(&[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]));
    assert_eq!(run(&["gpe", "--d", "2", "--n", "2", "--state", &bad]).status.code(), Some(1));
}

#[test]
fn dense_cap_comes_from_environment() {
    let args = ["schur", "--d", "2", "--n", "4"];
    assert_eq!(run(&args).status.code(), Some(0));
    let capped = bin().args(args).env("SCHURKIT_DENSE_CAP", "8").output().unwrap();
    assert_eq!(capped.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("cap 8"));
    let garbage = bin().args(args).env("SCHURKIT_DENSE_CAP", "lots").output().unwrap();
    assert_eq!(garbage.status.code(), Some(1));
}

#[test]
fn failed_check_exits_2_and_still_reports() {
    let out = run(&["verify", "--d", "3", "--n", "3", "--trials", "2", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(2));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["passed"], false);
    assert!(doc["max_leakage"].as_f64().unwrap() < 1e-10);
}

#[test]
fn channel_and_concentration_checks_pass_on_valid_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = temp_file(&dir, "channel.json", &dephasing_spec(0.3));
    let doc = json_of(&["channel", "--spec", &spec, "--n", "2"]);
    assert!(doc["reconstruction_residual"].as_f64().unwrap() < 1e-9);
    assert!(doc["isometry_residual"].as_f64().unwrap() < 1e-9);
    let doc = json_of(&["concentrate", "--n", "4", "--seed", "2"]);
    assert_eq!(doc["verified"], true);
}
