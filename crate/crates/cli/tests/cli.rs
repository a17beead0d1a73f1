use std::path::Path;
use std::process::{Command, Output};

use tfmeta::field::{field_from_csv, field_to_csv, gaussian, l2_norm};
use tfmeta::matrix::scalar;
use tfmeta::Grid;

fn tfmeta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfmeta"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn value(line: &str) -> f64 {
    line.trim().rsplit(',').next().unwrap().parse().unwrap()
}

fn write_gaussian(path: &Path) {
    let g = Grid::new(1, 512, 16.0).unwrap();
    std::fs::write(path, field_to_csv(&gaussian(&g, &scalar(1, 1.0)).unwrap())).unwrap();
}

#[test]
fn bounds_lines() {
    let out = tfmeta(&["bounds", "mu", "--p", "inf", "--q", "1"]);
    assert!(out.status.success());
    assert_eq!(value(&stdout(&out)), 1.0);
    assert!(stdout(&out).starts_with("mu1(inf,1),"));
    assert_eq!(stdout(&out).lines().count(), 1);

    let out = tfmeta(&["bounds", "mu", "--p", "1", "--q", "inf", "--direction", "small"]);
    assert_eq!(value(&stdout(&out)), -2.0);

    let out = tfmeta(&["bounds", "dispersive", "--kind", "harmonic", "--t", "0.5", "--r", "inf"]);
    assert!((value(&stdout(&out)) - 0.5f64.sin().powi(-1)).abs() < 1e-10);

    let out = tfmeta(&["bounds", "dispersive", "--kind", "harmonic", "--t", "1", "--r", "3/2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn alpha_from_a_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let j = dir.path().join("j.csv");
    std::fs::write(&j, "dim,1\n0,1\n-1,0\n").unwrap();
    let out = tfmeta(&["bounds", "alpha", "--matrix", j.to_str().unwrap(), "--p", "1", "--q", "inf"]);
    assert!(out.status.success());
    assert!((value(&stdout(&out)) - 2f64.sqrt()).abs() < 1e-10);
    // p > q is outside the estimate.
    let out = tfmeta(&["bounds", "alpha", "--matrix", j.to_str().unwrap(), "--p", "inf", "--q", "1"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&j, "dim,1\n1,1\n1,1\n").unwrap();
    assert_eq!(tfmeta(&["bounds", "beta", "--matrix", j.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn tfnorm_of_a_gaussian() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.csv");
    write_gaussian(&f);
    let path = f.to_str().unwrap();
    let out = tfmeta(&["tfnorm", "--space", "mod", "--p", "2", "--q", "2", "--input", path]);
    assert!(out.status.success());
    assert!((value(&stdout(&out)) - 0.5f64.sqrt()).abs() < 1e-6);
    let out = tfmeta(&["tfnorm", "--space", "wiener", "--p", "1", "--q", "inf", "--input", path, "--grid", "1,512,16"]);
    assert!((value(&stdout(&out)) - 1.0).abs() < 1e-4);
    let out = tfmeta(&["tfnorm", "--space", "mod", "--p", "2", "--q", "2", "--input", path, "--grid", "1,256,16"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn propagate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("u0.csv");
    let u = dir.path().join("u.csv");
    write_gaussian(&f);
    let out = tfmeta(&[
        "propagate", "--kind", "harmonic", "--t", "0.7", "--in", f.to_str().unwrap(), "--out", u.to_str().unwrap(),
        "--route", "dense",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let u0 = field_from_csv(&std::fs::read_to_string(&f).unwrap()).unwrap();
    let ut = field_from_csv(&std::fs::read_to_string(&u).unwrap()).unwrap();
    assert!((l2_norm(&ut) / l2_norm(&u0) - 1.0).abs() < 1e-8);
    // The ground state only picks up a phase.
    let dev = tfmeta::field::aligned_max_deviation(&u0, &ut).unwrap();
    assert!(dev < 1e-8, "{dev}");

    let out = tfmeta(&["propagate", "--kind", "harmonic", "--t", "3.1415", "--in", f.to_str().unwrap(), "--out", u.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = tfmeta(&["propagate", "--kind", "sideways", "--t", "1", "--in", f.to_str().unwrap(), "--out", u.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exponent_fit_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fit.cfg");
    std::fs::write(&cfg, "# exact scaling\np=2\nq=2\nsweep=2,4,8\n").unwrap();
    let out = tfmeta(&["exponent-fit", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 4);

    // The Gaussian's (2, inf) rate sits on the bound; a negative slack fails it.
    let out = tfmeta(&["exponent-fit", "--config", cfg.to_str().unwrap(), "--q", "inf", "--slack=-0.6"]);
    assert_eq!(out.status.code(), Some(1));
    let out = tfmeta(&["exponent-fit", "--config", cfg.to_str().unwrap(), "--set", "colour=blue"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dispersive_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("disp.csv");
    let args = [
        "dispersive", "--L", "8", "--set", "width=12", "--set", "extent=1", "--ensemble", "0", "--set",
        "sweep=0.15,0.25,0.35,0.45,0.55", "--out", report.to_str().unwrap(),
    ];
    let out = tfmeta(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).is_empty());
    let first = std::fs::read(&report).unwrap();
    assert!(dir.path().join("disp.plot.csv").exists());
    assert!(tfmeta(&args).status.success());
    assert_eq!(first, std::fs::read(&report).unwrap());
}

#[test]
fn strichartz_gates_and_exploratory_runs() {
    let base = ["strichartz", "--N", "128", "--steps", "16", "--ensemble", "2", "--no-refine"];
    let run = |extra: &[&str]| tfmeta(&[&base[..], extra].concat());
    assert!(run(&["--q", "8", "--r", "4"]).status.success());
    assert_eq!(run(&["--q", "6", "--r", "4"]).status.code(), Some(2));
    let out = run(&["--q", "4", "--r", "inf", "--set", "exploratory=true"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("exploratory"));
}
