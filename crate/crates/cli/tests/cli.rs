//! End-to-end checks of the command-line surface: exit codes, file formats
//! and report determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isingpulse"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_params(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const FIG5_J: &str = r#"{"J":[2.0,0.4,0.6],"B1":1.0,"B2":-0.3,"axis":1}"#;

#[test]
fn evolve_at_zero_time_writes_identity() {
    let dir = tempfile::tempdir().unwrap();
    let params = write_params(dir.path(), "p.json", FIG5_J);
    let out_path = dir.path().join("u.json");
    let out = run(&["evolve", "--params", &params, "--t", "0", "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["unitary"]["basis"], "bell");
    for k in 0..4 {
        assert_eq!(v["unitary"]["matrix"][k][k][0], 1.0);
        assert_eq!(v["unitary"]["matrix"][k][k][1], 0.0);
    }
    assert_eq!(v["form"]["IdentityLoop"]["sign"], "Plus");
}

#[test]
fn evolve_rejects_malformed_json_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let params = write_params(dir.path(), "bad.json", "{not json");
    let out = run(&["evolve", "--params", &params, "--t", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn evolve_requires_duration_for_single_params() {
    let dir = tempfile::tempdir().unwrap();
    let params = write_params(dir.path(), "p.json", FIG5_J);
    let out = run(&["evolve", "--params", &params]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn evolve_composes_two_pulse_sequence_into_exchange() {
    // The worked-example exchange pulses: the composed matrix is the
    // displayed form swapping the first Bell pair with one sign.
    let dir = tempfile::tempdir().unwrap();
    let synth_out = dir.path().join("spec.json");
    let out = run(&[
        "synth-exchange",
        "--j", "2.0,0.4,0.6",
        "--axis", "1",
        "--antidiag-sector", "1",
        "--n-anti", "0",
        "--n-prime-anti", "0",
        "--m-diag", "2",
        "--n-diag", "-4",
        "--out", synth_out.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let spec: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&synth_out).unwrap()).unwrap();
    let rep = spec["specs"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| {
            s["pulse1"]["params"]["B1"].as_f64().unwrap() > 0.0
                && s["exchange_sign"].as_i64() == Some(1)
        })
        .expect("positive-field spec");
    let t1 = rep["pulse1"]["t"].as_f64().unwrap();
    let t2 = rep["pulse2"]["t"].as_f64().unwrap();
    assert!((t1 - 1.77).abs() < 0.005, "t = {t1}");
    assert!((t2 - 7.65).abs() < 0.005, "t' = {t2}");
    assert_eq!(rep["verification"]["pass"], true);

    // Feed the two pulses back through evolve as a sequence file.
    let seq = serde_json::json!({
        "pulses": [
            { "params": rep["pulse1"]["params"], "t": t1 },
            { "params": rep["pulse2"]["params"], "t": t2 },
        ]
    });
    let seq_path = write_params(dir.path(), "seq.json", &seq.to_string());
    let u_path = dir.path().join("u.json");
    let traj_path = dir.path().join("traj.csv");
    let out = run(&[
        "evolve",
        "--params", &seq_path,
        "--out", u_path.to_str().unwrap(),
        "--trajectory", traj_path.to_str().unwrap(),
        "--steps", "64",
        "--initial", "bell:00",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&u_path).unwrap()).unwrap();
    // Column 1 of the composed matrix is -e2: β00 -> -β01.
    let m = &v["unitary"]["matrix"];
    assert!((m[1][0][0].as_f64().unwrap() + 1.0).abs() < 1e-8);
    assert!(v["form"].get("DiagAntidiag").is_some(), "{}", v["form"]);
    let csv = std::fs::read_to_string(&traj_path).unwrap();
    assert!(csv.starts_with("t,alpha,beta,gamma,concurrence,folded,degenerate\n"));
    assert_eq!(csv.lines().count(), 128); // 2 pulses x 64 samples per pulse
}

#[test]
fn synth_loop_reports_identity_loop() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("loop.json");
    let out = run(&[
        "synth-loop",
        "--j", "10.0,0.4,0.5",
        "--axis", "1",
        "--m-minus", "2",
        "--n-minus", "1",
        "--m-plus", "1",
        "--n-plus", "2",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let first = &v["specs"][0];
    assert!(first["verification"]["achieved"].get("IdentityLoop").is_some());
    assert_eq!(first["verification"]["pass"], true);
}

#[test]
fn synth_loop_rejects_zero_axis_coupling() {
    let out = run(&[
        "synth-loop",
        "--j", "0.0,0.4,0.5",
        "--axis", "1",
        "--m-minus", "2",
        "--n-minus", "1",
        "--m-plus", "1",
        "--n-plus", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn synth_form_diagonal_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("d.json");
    let out = run(&[
        "synth-form",
        "--kind", "diagonal",
        "--j", "2.0,0.4,0.6",
        "--axis", "1",
        "--t", "1.3",
        "--n-minus", "2",
        "--n-plus", "3",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["specs"][0]["verification"]["pass"], true);
}

#[test]
fn feasibility_emits_grid_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("grid.csv");
    let out = run(&[
        "feasibility",
        "--resolution", "21",
        "--branch", "minus",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert!(csv.starts_with("A,B,branch,xi\n"));
    assert_eq!(csv.lines().count(), 1 + 21 * 21);
    assert!(csv.lines().skip(1).all(|l| l.split(',').count() == 4));
    // The origin cell is structurally empty.
    assert!(csv.lines().any(|l| l.starts_with("0,0,-,nan")));
}

#[test]
fn teleport_reports_unit_fidelity() {
    let out = run(&["teleport", "--a-re", "0.6", "--b-re", "0.8", "--basis", "bell"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcomes"].as_array().unwrap().len(), 4);
    assert!(v["worst_infidelity"].as_f64().unwrap() < 1e-10);
}

#[test]
fn verify_passes_and_is_deterministic() {
    let a = run(&["verify", "--seed", "7", "--suite", "gates"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&["verify", "--seed", "7", "--suite", "gates"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn verify_with_forced_tolerance_fails_with_exit_1() {
    let out = run(&["verify", "--seed", "7", "--suite", "oracle", "--tol", "1e-16"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn verify_gate_suite_reports_six_identities() {
    let out = run(&["verify", "--suite", "gates"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let detail = v["suites"][0]["detail"].as_str().unwrap();
    assert_eq!(detail.matches("A[").count(), 6);
}

#[test]
fn trajectory_from_single_pulse() {
    let dir = tempfile::tempdir().unwrap();
    let params = write_params(dir.path(), "p.json", FIG5_J);
    let out = run(&[
        "trajectory",
        "--params", &params,
        "--t", "2.0",
        "--steps", "32",
        "--projection", "real",
        "--initial", "comp:00",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 33);
}
