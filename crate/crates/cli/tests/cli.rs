use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn kerconf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kerconf"))
        .args(args)
        .env_remove("KERCONF_FIELD")
        .output()
        .expect("spawn kerconf")
}

fn run_file(cmd: &[&str], file: &str) -> Output {
    let path = data(file);
    let mut args = cmd.to_vec();
    args.push(path.to_str().unwrap());
    kerconf(&args)
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn temp_json(v: &Value) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "{v}").unwrap();
    f
}

#[test]
fn normalize_two_polynomial_theory() {
    let out = run_file(&["normalize"], "two_polys.json");
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        stdout_json(&out),
        json!({
            "field": "Q",
            "default": "0",
            "exceptions": [{"f": {"field": "Q", "coeffs": ["1", "0", "1"]}, "v": 1}],
            "degree": 2
        })
    );
}

#[test]
fn normalize_empty_theory_is_unconstrained() {
    let out = run_file(&["normalize"], "empty.json");
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["default"], "inf");
    assert_eq!(v["degree"], "inf");
    assert_eq!(v["exceptions"], json!([]));
}

#[test]
fn normalize_inconsistent_exits_2() {
    let out = run_file(&["normalize"], "inconsistent.json");
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out), json!("inconsistent"));
}

#[test]
fn malformed_and_missing_input_exit_1() {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), "{").unwrap();
    let out = kerconf(&["normalize", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("parse error"));

    let out = kerconf(&["normalize", "/nonexistent/input.json"]);
    assert_eq!(out.status.code(), Some(1));

    let out = kerconf(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn field_flag_and_env() {
    let poly = temp_json(&json!({"coeffs": [1, 0, 1]}));
    let p = poly.path().to_str().unwrap();
    let out = kerconf(&["--field", "GF(5)", "model", "build", p]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout_json(&out)["field"], json!({"GFp": 5}));

    let out = Command::new(env!("CARGO_BIN_EXE_kerconf"))
        .args(["model", "build", p])
        .env("KERCONF_FIELD", "7")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&out)["field"], json!({"GFp": 7}));

    let out = kerconf(&["--field", "GF(6)", "model", "build", p]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn model_build_and_check() {
    let poly = temp_json(&json!({"coeffs": ["0", "1"]}));
    let out = kerconf(&["model", "build", poly.path().to_str().unwrap(), "--copies", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let m = stdout_json(&out);
    assert_eq!(m["dim"], 2);
    assert_eq!(m["theta"], json!([["0", "0"], ["0", "0"]]));

    let model = temp_json(&m);
    let cfg = data("x_value_1.json");
    let out = kerconf(&["model", "check", model.path().to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["c_endomorphism"], true);
    assert_eq!(v["image_complete"], true);
    assert_eq!(v["minimal_polynomial"]["coeffs"], json!(["0", "1"]));

    // A nilpotent shift of index 3 has Ker X != Ker X^2.
    let shift = data("shift3.json");
    let out = kerconf(&["model", "check", shift.to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    assert_eq!(stdout_json(&out)["c_endomorphism"], false);
}

#[test]
fn model_extend_modes() {
    let m = data("one_dim_zero.json");
    let cfg = data("x_value_1.json");
    let (m, cfg) = (m.to_str().unwrap(), cfg.to_str().unwrap());
    let out = kerconf(&["model", "extend", m, "--config", cfg, "--mode", "standard"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout_json(&out)["dim"], 2);

    let out = kerconf(&["model", "extend", m, "--config", cfg, "--mode", "image-complete"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["steps"], 0);
    assert_eq!(v["model"]["dim"], 1);
}

#[test]
fn ring_commands() {
    let out = run_file(&["ring", "eq"], "ring_id.json");
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout_json(&out), json!({"equal": true}));

    let out = run_file(&["ring", "canon"], "ring_id.json");
    let v = stdout_json(&out);
    assert_eq!(v["ker"], json!([]));
    assert_eq!(v["im"]["rho"]["coeffs"], json!(["1"]));

    let out = run_file(&["ring", "eval"], "ring_id.json");
    assert_eq!(stdout_json(&out)["matrix"], json!([["1", "0"], ["0", "1"]]));
}

#[test]
fn rcf_of_nilpotent_jordan_block() {
    let out = run_file(&["rcf"], "matrix.json");
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["xi"], json!([{"field": "Q", "coeffs": ["0", "0", "1"]}]));
    assert_eq!(v["A"], json!([["0", "1"], ["1", "0"]]));
}

#[test]
fn diagonalize_coupled_pair() {
    let out = run_file(&["diagonalize", "--self-check"], "nilpotent_pair.json");
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    let ld = v["system"]["ld"].as_array().unwrap();
    assert_eq!(ld.len(), 1);
    assert_eq!(ld[0]["xi"]["coeffs"], json!(["0", "0", "1"]));
    assert_eq!(ld[0]["u"]["y1"]["coeffs"], json!(["1"]));
    assert_eq!(ld[0]["u"]["y2"]["coeffs"], json!(["0", "1"]));
    assert_eq!(v["substitutions"].as_array().unwrap().len(), 2);
}

#[test]
fn diagonalize_is_identity_on_diagonal_input() {
    let out = run_file(&["diagonalize"], "nilpotent_pair.json");
    let first = stdout_json(&out);
    let sys = temp_json(&first["system"]);
    let out = kerconf(&["diagonalize", sys.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let again = stdout_json(&out);
    assert_eq!(again["system"], first["system"]);
}

#[test]
fn diagonalize_rejects_unclosed_kernel_block() {
    let out = run_file(&["diagonalize"], "not_closed.json");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("t-term closure"), "{}", stderr(&out));
}

#[test]
fn verify_is_deterministic_and_filterable() {
    let args = ["verify", "--seed", "11", "--trials", "2", "--suite", "rcf", "--suite", "ring-axioms"];
    let a = kerconf(&args);
    let b = kerconf(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["suites"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["ring-axioms", "rcf"]);

    let out = kerconf(&["verify", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(1));

    let out = kerconf(&["verify", "--list"]);
    assert_eq!(stdout_json(&out).as_array().unwrap().len(), 11);
}
