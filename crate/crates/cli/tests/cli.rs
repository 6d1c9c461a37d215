use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn h1(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_h1")).current_dir(dir).args(args).output().expect("spawn h1")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json_field(text: &str, key: &str) -> f64 {
    let v: serde_json::Value = serde_json::from_str(text).expect("json");
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {text}"))
}

fn write_helix_csv(path: &Path) {
    let mut s = String::from("eps,x,y\n");
    for i in 0..=400 {
        let e = -1.5 + 3.0 * i as f64 / 400.0;
        s.push_str(&format!("{e},{},{}\n", 0.8 * (e / 0.8).sin(), 0.8 - 0.8 * (e / 0.8).cos()));
    }
    fs::write(path, s).unwrap();
}

#[test]
fn mesh_sphere_writes_obj_and_vertex_csv() {
    let dir = TempDir::new().unwrap();
    let o = h1(dir.path(), &["mesh", "--surface", "sphere", "--lambda", "1", "--res", "128x128", "--out", "s1.obj"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let obj = fs::read_to_string(dir.path().join("s1.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 16384);
    assert!(obj.lines().any(|l| l.starts_with("f ")));
    let csv = fs::read_to_string(dir.path().join("s1.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("eps,s,x,y,t,nh_norm,h_est"));
    assert_eq!(csv.lines().count(), 16385);
}

#[test]
fn mesh_goes_to_stdout_without_out() {
    let dir = TempDir::new().unwrap();
    let o = h1(dir.path(), &["mesh", "--surface", "sphere", "--res", "8x8"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("v ")).count(), 64);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn sigma_lambda_from_curve_has_two_singular_rows() {
    let dir = TempDir::new().unwrap();
    write_helix_csv(&dir.path().join("helix.csv"));
    let o = h1(dir.path(), &["mesh", "--surface", "sigma-lambda", "--curve", "helix.csv", "--lambda", "1", "--res", "33x33", "--out", "h.obj"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("66 singular in 2 component(s) [33, 33]"), "{}", stderr(&o));
}

#[test]
fn unknown_surface_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let o = h1(dir.path(), &["mesh", "--surface", "nosuch", "--out", "x.obj"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown surface"));
    assert!(!dir.path().join("x.obj").exists());
}

#[test]
fn config_file_is_strict() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("bad.toml"), "surface = \"sphere\"\ncolour = 1\n").unwrap();
    let o = h1(dir.path(), &["report", "--config", "bad.toml"]);
    assert_eq!(o.status.code(), Some(2));

    fs::write(dir.path().join("neg.toml"), "[tolerances]\narea = -1e-4\n").unwrap();
    let o = h1(dir.path(), &["verify", "--suite", "geodesics", "--config", "neg.toml"]);
    assert_eq!(o.status.code(), Some(2));

    let o = h1(dir.path(), &["verify", "--suite", "geodesics", "--tol-geodesic", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("c.toml"), "surface = \"sphere\"\nlambda = 2.0\nres = \"64x64\"\n").unwrap();
    let o = h1(dir.path(), &["report", "--config", "c.toml"]);
    assert!(o.status.success());
    assert!((json_field(&stdout(&o), "lambda") - 2.0).abs() < 1e-15);
    let o = h1(dir.path(), &["report", "--config", "c.toml", "--lambda", "0.5"]);
    assert!((json_field(&stdout(&o), "A") - 8.0 * std::f64::consts::PI.powi(2)).abs() < 1e-6);
}

#[test]
fn minkowski_suite_passes() {
    let dir = TempDir::new().unwrap();
    let o = h1(dir.path(), &["verify", "--suite", "minkowski", "--lambda", "1", "--out", "m.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = fs::read_to_string(dir.path().join("m.csv")).unwrap();
    assert!(report.starts_with("suite,check,measured,expected,tolerance,relation,basis,status\n"));
    assert!(report.lines().skip(1).all(|l| l.ends_with(",PASS")), "{report}");
}

#[test]
fn bernstein_suite_reports_non_stationary_profile() {
    let dir = TempDir::new().unwrap();
    let o = h1(dir.path(), &["verify", "--suite", "bernstein", "--g", "y^2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = stdout(&o);
    assert!(report.contains("NOT-stationary"));
    let mut rdr = csv::Reader::from_reader(report.as_bytes());
    let defects: Vec<f64> = rdr
        .records()
        .map(Result::unwrap)
        .filter(|r| r[1].starts_with("orthogonality defect"))
        .map(|r| r[2].parse().unwrap())
        .collect();
    assert_eq!(defects.len(), 3);
    assert!(defects.iter().all(|d| (d + 1.0).abs() < 1e-6), "{defects:?}");

    let o = h1(dir.path(), &["verify", "--suite", "bernstein", "--g", "3*y+7"]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains("NOT-stationary"));
}

#[test]
fn all_suites_pass() {
    let dir = TempDir::new().unwrap();
    let o = h1(dir.path(), &["verify", "--suite", "all", "--res", "64x64", "--out", "all.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = fs::read_to_string(dir.path().join("all.csv")).unwrap();
    for suite in ["geodesics", "jacobi", "curvature", "minkowski", "bernstein", "iso"] {
        assert!(report.lines().any(|l| l.starts_with(&format!("{suite},"))), "{suite} missing");
    }
}

#[test]
fn tightened_tolerance_fails_with_exit_one() {
    let dir = TempDir::new().unwrap();
    let o = h1(dir.path(), &["verify", "--suite", "jacobi", "--tol-jacobi", "1e-14"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains(",FAIL"));
}

#[test]
fn sphere_report_values() {
    let dir = TempDir::new().unwrap();
    let o = h1(dir.path(), &["report", "--surface", "sphere", "--lambda", "1", "--out", "r.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("r.json")).unwrap();
    let pi2 = std::f64::consts::PI.powi(2);
    assert!((json_field(&text, "A") - pi2).abs() < 1e-6);
    assert!((json_field(&text, "V") - 3.0 * pi2 / 8.0).abs() < 1e-6);
    assert!((json_field(&text, "iso_ratio") - 512.0 * pi2 / 27.0).abs() < 1e-4);
    assert!((json_field(&text, "H") - 1.0).abs() < 1e-6);
}

#[test]
fn cylinder_report_has_unit_curvature_and_no_volume() {
    let dir = TempDir::new().unwrap();
    let o = h1(dir.path(), &["report", "--surface", "cylinder_S", "--lambda", "1", "--res", "64x64"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!((json_field(&text, "H") - 1.0).abs() < 1e-4);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["V"].is_null());
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    for k in 0..2 {
        let out = format!("g{k}.csv");
        let o = h1(dir.path(), &["verify", "--suite", "geodesics", "--out", &out]);
        assert!(o.status.success());
        let out = format!("j{k}.csv");
        assert!(h1(dir.path(), &["verify", "--suite", "jacobi", "--out", &out]).status.success());
        let out = format!("m{k}.obj");
        assert!(h1(dir.path(), &["mesh", "--surface", "helicoid_L", "--res", "16x16", "--out", &out]).status.success());
    }
    for stem in ["g0.csv", "j0.csv", "m0.obj", "m0.csv"] {
        let other = stem.replace('0', "1");
        assert_eq!(fs::read(dir.path().join(stem)).unwrap(), fs::read(dir.path().join(&other)).unwrap(), "{stem}");
    }
}
