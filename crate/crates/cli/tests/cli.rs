use std::path::PathBuf;

use assert_cmd::Command;
use predicates::prelude::PredicateBooleanExt;
use predicates::str::contains;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn cli() -> Command {
    let mut c = Command::cargo_bin("polycurrents").unwrap();
    c.env_remove("POLYCURRENTS_TOL");
    c
}

fn json_output(args: &[&str]) -> Value {
    let out = cli()
        .args(args)
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    serde_json::from_slice(&out).unwrap()
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

#[test]
fn decompose_chain() {
    let v = json_output(&["decompose", "--input", &path("chain.json")]);
    let atoms = v["transport"]["atoms"].as_array().unwrap();
    let got: Vec<(f64, Vec<u64>)> = atoms
        .iter()
        .map(|a| {
            (
                a[0].as_f64().unwrap(),
                a[1].as_array()
                    .unwrap()
                    .iter()
                    .map(|x| x.as_u64().unwrap())
                    .collect(),
            )
        })
        .collect();
    assert_eq!(
        got,
        vec![
            (1.0, vec![0, 1, 2, 3]),
            (1.0, vec![0, 1]),
            (1.0, vec![2, 3])
        ]
    );
    assert_eq!(v["passed"], Value::Bool(true));
    assert!(v["cycles"].as_array().unwrap().is_empty());
}

#[test]
fn decompose_triangle_is_all_cycle() {
    let v = json_output(&["decompose", "--input", &path("triangle.json")]);
    assert!(v["transport"]["atoms"].as_array().unwrap().is_empty());
    assert_eq!(v["cycles"].as_array().unwrap().len(), 3);
    assert!(v["acyclic"].as_array().unwrap().is_empty());
    assert_eq!(v["passed"], Value::Bool(true));
}

#[test]
fn decompose_empty_current() {
    let v = json_output(&["decompose", "--input", &path("empty_current.json")]);
    assert!(v["transport"]["atoms"].as_array().unwrap().is_empty());
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == Value::Bool(true)));
}

#[test]
fn transport_square_and_diracs() {
    let v = json_output(&[
        "transport",
        "--plus",
        &path("square_plus.json"),
        "--minus",
        &path("square_minus.json"),
        "--space",
        &path("square_space.json"),
    ]);
    assert!((v["w1"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(v["certificate"]["passed"], Value::Bool(true));

    let v = json_output(&[
        "transport",
        "--plus",
        &path("dirac_x.json"),
        "--minus",
        &path("dirac_y.json"),
        "--space",
        &path("square_space.json"),
    ]);
    assert!((v["w1"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);

    let v = json_output(&[
        "transport",
        "--plus",
        &path("square_plus.json"),
        "--minus",
        &path("square_plus.json"),
        "--space",
        &path("square_space.json"),
    ]);
    assert_eq!(v["w1"].as_f64().unwrap(), 0.0);
}

#[test]
fn unequal_masses_name_the_totals() {
    cli()
        .args([
            "transport",
            "--plus",
            &path("dirac_x.json"),
            "--minus",
            &path("square_minus.json"),
            "--space",
            &path("square_space.json"),
        ])
        .assert()
        .code(1)
        .stderr(contains("positive part 1").and(contains("negative part 2")));
}

#[test]
fn flatnorm_dipole() {
    let v = json_output(&[
        "flatnorm",
        "--input",
        &path("dipole.json"),
        "--space",
        &path("dipole_space.json"),
    ]);
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn spiral_level_four() {
    cli()
        .args(["spiral", "--levels", "4"])
        .assert()
        .success()
        .stdout(contains(
            "nu,eta_mass,boundary_tv,max_form_err\n4,0.25,0.5,",
        ));
}

#[test]
fn approx_zero_field_gives_zero_table() {
    let out = cli()
        .args([
            "approx",
            "--grid",
            &path("zero_grid.json"),
            "--levels",
            "1..3",
        ])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(
        text,
        "nu,mass_err,boundary_flat_gap,correction_mass\n1,0,0,0\n2,0,0,0\n3,0,0,0\n"
    );
}

#[test]
fn frechet_translated_segments() {
    let v = json_output(&["frechet", "--input", &path("segments.json")]);
    assert!((v["distance"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn malformed_json_reports_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"space":{"kind":"embedded","points":[[0,0],[1,0]]},"edges":[[0,1,"heavy"]]}"#,
    )
    .unwrap();
    cli()
        .args(["decompose", "--input", bad.to_str().unwrap()])
        .assert()
        .code(1)
        .stderr(contains("edges[0]"));
}

#[test]
fn non_finite_weights_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("huge.json");
    std::fs::write(
        &bad,
        r#"{"space":{"kind":"embedded","points":[[0,0],[1,0]]},"edges":[[0,1,1e400]]}"#,
    )
    .unwrap();
    cli()
        .args(["decompose", "--input", bad.to_str().unwrap()])
        .assert()
        .code(1);
}

#[test]
fn failed_runs_leave_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("solution.json");
    cli()
        .args([
            "transport",
            "--plus",
            &path("dirac_x.json"),
            "--minus",
            &path("square_minus.json"),
            "--space",
            &path("square_space.json"),
            "--out",
            out.to_str().unwrap(),
        ])
        .assert()
        .code(1);
    assert!(!out.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        cli()
            .args([
                "--seed",
                "7",
                "decompose",
                "--input",
                &path("chain.json"),
                "--out",
                out.to_str().unwrap(),
            ])
            .assert()
            .success();
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn tolerance_from_environment() {
    cli()
        .env("POLYCURRENTS_TOL", "-1")
        .args(["spiral", "--levels", "1"])
        .assert()
        .code(1)
        .stderr(contains("tolerance"));
}

#[test]
fn certificate_failure_exits_with_two() {
    let args = |tol: &'static str| {
        [
            "--tol".to_string(),
            tol.to_string(),
            "transport".into(),
            "--plus".into(),
            path("scattered_plus.json"),
            "--minus".into(),
            path("scattered_minus.json"),
            "--space".into(),
            path("scattered_space.json"),
        ]
    };
    cli().args(args("1e-9")).assert().success();
    // no residual of an irrational instance survives a tolerance below rounding
    cli()
        .args(args("1e-300"))
        .assert()
        .code(2)
        .stderr(contains("certificate failed"));
}
