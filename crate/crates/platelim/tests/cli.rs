//! Black-box tests of the installed binary: exit codes, artifact schemas,
//! and byte-level determinism of seeded runs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn platelim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_platelim"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn platelim")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const BILAYER: &str = r#"
[domain]
lx = 1.0
ly = 1.0
nx = 9
ny = 9

[[layer]]
fraction = 0.5
lambda = 1.0
mu = 1.0
misfit_const = [[-0.05, 0.0, 0.0], [0.0, -0.05, 0.0], [0.0, 0.0, 0.0]]

[[layer]]
fraction = 0.5
lambda = 1.0
mu = 1.0
misfit_slope = [[0.4, 0.0, 0.0], [0.0, 0.4, 0.0], [0.0, 0.0, 0.0]]
"#;

#[test]
fn exit_code_zero_on_success() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", BILAYER);
    let out = platelim(&["homogenize", "-c", &cfg, "-o", "art"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn exit_code_one_on_bad_configuration() {
    let dir = tempfile::tempdir().unwrap();
    // fractions not summing to one is a validation error, not a crash
    let cfg = write(dir.path(), "bad.toml", "[[layer]]\nfraction = 0.3\nlambda = 1.0\nmu = 1.0\n");
    let out = platelim(&["homogenize", "-c", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty(), "expected a diagnostic on stderr");

    // unknown flags and missing -c are usage errors too
    let out = platelim(&["homogenize"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = platelim(&["frobnicate", "-c", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_code_two_on_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    // unreadable configuration path is an I/O failure
    let out = platelim(&["homogenize", "-c", "no/such/file.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // config parses but the input fields file is missing at run time
    let cfg_body = format!("{BILAYER}\n[input]\nfields_csv = \"missing.csv\"\n");
    let cfg = write(dir.path(), "run.toml", &cfg_body);
    let out = platelim(&["energy", "-c", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn homogenize_reports_the_moment_structure() {
    let dir = tempfile::tempdir().unwrap();
    // one homogeneous layer: the zeroth and second moments of a constant
    // form satisfy q11 = q00/12 exactly, and the cross moment vanishes
    let cfg = write(
        dir.path(),
        "homog.toml",
        "[[layer]]\nfraction = 1.0\nlambda = 1.3\nmu = 0.7\n",
    );
    let out = platelim(&["homogenize", "-c", &cfg, "-o", "art"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("art/report.json")).unwrap())
            .unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let q00 = json["q00"][i][j].as_f64().unwrap();
            let q01 = json["q01"][i][j].as_f64().unwrap();
            let q11 = json["q11"][i][j].as_f64().unwrap();
            assert!(q01.abs() < 1e-14, "q01[{i}][{j}] = {q01}");
            assert!((q11 - q00 / 12.0).abs() < 1e-14 * (1.0 + q00.abs()));
        }
    }
    assert_eq!(json["c_const"].as_f64().unwrap(), 0.0);
}

#[test]
fn minimize_energy_round_trip_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let min_cfg = write(
        dir.path(),
        "min.toml",
        &format!(
            "{BILAYER}\n[regime]\nkind = \"lvk\"\nalpha = 4.0\n\n[output]\nfields_csv = \"fields.csv\"\n"
        ),
    );
    let out = platelim(&["minimize", "-c", &min_cfg, "-o", "run"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let eval_cfg = write(
        dir.path(),
        "eval.toml",
        &format!(
            "{BILAYER}\n[regime]\nkind = \"lvk\"\nalpha = 4.0\n\n\
             [input]\nfields_csv = \"run/fields.csv\"\n\n\
             [output]\nreport_json = \"eval.json\"\n"
        ),
    );
    let out = platelim(&["energy", "-c", &eval_cfg, "-o", "run"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let min: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run/report.json")).unwrap())
            .unwrap();
    let eval: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run/eval.json")).unwrap())
            .unwrap();
    let (a, b) = (min["energy"].as_f64().unwrap(), eval["energy"].as_f64().unwrap());
    // the CSV carries full precision, so the evaluator sees the same number
    assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{a} vs {b}");
    assert_eq!(min["regime"], "lvk");
    assert!(min["curvature"]["det_residual"].is_number());
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.toml",
        &format!(
            "{BILAYER}\n[solver]\nmax_iterations = 300\nreproducible = true\ninit_jitter = 1e-3\n\n\
             [sweep]\nthetas = [0.5, 2.0]\nmultistart = true\n\n\
             [output]\nfields_csv = \"fields.csv\"\ntable_csv = \"table.csv\"\n"
        ),
    );
    let run = |out_dir: &str| {
        let out = platelim(&["sweep-theta", "--seed", "42", "-c", &cfg, "-o", out_dir], dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let mut blobs = Vec::new();
        for name in ["table.csv", "report.json", "fields_theta0.csv", "fields_theta1.csv"] {
            blobs.push(fs::read(dir.path().join(out_dir).join(name)).unwrap());
        }
        blobs
    };
    assert_eq!(run("a"), run("b"), "same seed must reproduce every artifact byte for byte");
}

#[test]
fn gamma_check_writes_a_decreasing_error_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "gamma.toml",
        &format!(
            "{BILAYER}\n[regime]\nkind = \"lvk\"\nalpha = 5.0\n\n\
             [gamma]\nh = [0.25, 0.125, 0.0625, 0.03125]\npreset = \"poly2\"\ncells = 6\n\n\
             [output]\ntable_csv = \"gamma.csv\"\n"
        ),
    );
    let out = platelim(&["gamma-check", "-c", &cfg, "-o", "g"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(dir.path().join("g/gamma.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("h,energy,error,ph_error"));
    let errs: Vec<f64> = lines
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(errs.len(), 4);
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "3D gap must shrink with h: {errs:?}");
}
