use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cvsteer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvsteer"))
        .args(args)
        .env_remove("CVSTEER_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Rows of a CSV as string fields, header first.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let r = rows(csv);
    let j = r[0].iter().position(|c| c == name).unwrap();
    r[1..].iter().map(|row| row[j].parse().unwrap()).collect()
}

fn ok(args: &[&str]) -> String {
    let o = cvsteer(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

#[test]
fn fock_elements() {
    let out = ok(&["fock", "--s", "0.5", "--eta", "1", "--r", "0", "--idx", "2,2,1,1", "--idx", "0,1,0,0"]);
    let values = column(&out, "value");
    let t = 0.5f64.tanh();
    assert!((values[0] - (1.0 - t * t) * t.powi(3)).abs() < 1e-15);
    assert_eq!(values[1], 0.0);
    assert!(out.ends_with('\n') && !out.contains('\r'));
}

#[test]
fn fock_cutoff_dump() {
    let out = ok(&["fock", "--s", "0.3", "--eta", "0.7", "--r", "0.2", "--cutoff", "6", "--format", "json"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let trace: f64 = v
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["m1"] == e["n1"] && e["m2"] == e["n2"])
        .map(|e| e["value"].as_f64().unwrap())
        .sum();
    let bound = v[0]["tail_bound"].as_f64().unwrap();
    assert!((1.0 - trace).abs() <= bound + 1e-14);
}

#[test]
fn steer_examples() {
    let out = ok(&["steer", "--epr-s", "0.5", "--criterion", "type-i"]);
    let m = column(&out, "value")[0];
    assert!((m - (1.0 + 2.0 * 1f64.tanh().powi(2))).abs() < 1e-10);
    assert!(out.contains(",true,"));

    let out = ok(&["steer", "--tmst", "0.5,0.4,0", "--criterion", "gaussian"]);
    assert!(out.contains(",false,"));

    let werner = ok(&["werner", "--s", "1", "--u", "1"]);
    let p_i: f64 = rows(&werner)[1][1].parse().unwrap();
    let out = ok(&["steer", "--werner", "0.9,1,1", "--criterion", "type-i"]);
    assert_eq!(out.contains(",true,"), 0.9 > p_i);
}

#[test]
fn negative_correlation_is_normalized() {
    let o = cvsteer(&["steer", "--sf", "2,2,-1,1", "--criterion", "type-ii"]);
    assert!(o.status.success());
    let flipped = column(&stdout(&o), "value")[0];
    let plain = column(&ok(&["steer", "--sf", "2,2,1,-1", "--criterion", "type-ii"]), "value")[0];
    assert_eq!(flipped, plain);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["steer", "--epr-s", "0.5", "--tmst", "0.5,1,0", "--criterion", "type-i"],
        vec!["steer", "--criterion", "type-i"],
        vec!["fock", "--s", "0.5", "--idx", "1,2"],
        vec!["figure", "fig7"],
        vec!["steer", "--tmst", "0.5,1.5,0", "--criterion", "gaussian"],
        vec!["correlators", "--epr-s", "0.5", "--criterion", "gaussian"],
        vec!["verify", "hermite", "--max-degree", "20"],
        vec!["steer", "--epr-s", "0.5", "--criterion", "type-i", "--tol", "-1"],
    ] {
        let o = cvsteer(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn tolerance_from_environment() {
    let args = ["threshold", "--criterion", "type-ii", "--s", "0.5"];
    let o = Command::new(env!("CARGO_BIN_EXE_cvsteer"))
        .args(args)
        .env("CVSTEER_TOL", "1e-3")
        .output()
        .unwrap();
    let coarse = column(&stdout(&o), "error_bound")[0];
    let fine = column(&ok(&args), "error_bound")[0];
    assert!(coarse > 1e-4 && fine < 1e-6);
}

#[test]
fn threshold_sweep_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let p = path.to_str().unwrap();
    let args = [
        "threshold", "--criterion", "type-i", "--axis", "s", "--min", "0.2", "--max", "1.0",
        "--points", "5", "--r", "0.1", "--out", p,
    ];
    ok(&args);
    let first = std::fs::read(&path).unwrap();
    ok(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(first, std::fs::read(&path).unwrap());
    let header = String::from_utf8(first).unwrap();
    assert!(header.starts_with("abscissa,threshold,converged,error_bound\n"));
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["tolerances"]["bisection"], 1e-6);
}

fn figure(id: &str, extra: &[&str], dir: &Path) -> String {
    let path = dir.join(format!("{id}.csv"));
    ok(&[&["figure", id, "--out", path.to_str().unwrap()], extra].concat());
    assert!(dir.join(format!("{id}.meta.json")).exists());
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn figure_epr_moments() {
    let dir = tempfile::tempdir().unwrap();
    let csv = figure("fig2", &[], dir.path());
    for name in ["moment_type_i", "moment_type_ii"] {
        let m = column(&csv, name);
        assert!(m.iter().all(|&x| x >= 1.0));
        assert!(m.windows(2).all(|w| w[1] > w[0]));
        assert!(3.0 - m.last().unwrap() < 0.02);
    }
    let i = column(&csv, "moment_type_i");
    let ii = column(&csv, "moment_type_ii");
    assert!(i.iter().zip(&ii).all(|(a, b)| a >= b));
}

#[test]
fn figure_lossy_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let csv = figure("fig3", &["--points", "8"], dir.path());
    assert!(column(&csv, "gaussian").iter().all(|g| (g - 0.5).abs() <= 1e-6));
    let g = column(&csv, "gaussian");
    assert!(column(&csv, "type_ii").iter().zip(&g).all(|(ii, g)| ii >= g));
}

#[test]
fn figure_werner_ordering() {
    let dir = tempfile::tempdir().unwrap();
    let csv = figure("fig6", &[], dir.path());
    let s = column(&csv, "s");
    let (pi, pii, pg) = (column(&csv, "p_type_i"), column(&csv, "p_type_ii"), column(&csv, "p_gaussian"));
    for k in 0..pi.len() {
        assert!(pii[k] >= pi[k] && pg[k] > pi[k], "row {k}");
        // below s ≈ 0.32 the type-ii threshold exceeds the Gaussian one
        if s[k] >= 0.35 {
            assert!(pg[k] >= pii[k], "row {k}");
        }
    }
    assert!(pii[0] > pg[0]);
}

#[test]
fn figure_json_and_default_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_cvsteer"))
        .args(["figure", "fig5", "--points", "4", "--format", "json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig5.json")).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 16);
    // s = u = 0 has no threshold
    assert_eq!(v[0]["p_type_i"], Value::Null);
    assert!(dir.path().join("fig5.meta.json").exists());
}

#[test]
fn hermite_matches_taylor() {
    let out = ok(&["hermite", "--tmst", "0.4,0.6,0.3", "--idx", "2,1,3,0", "--idx", "1,1,1,1"]);
    for row in &rows(&out)[1..] {
        let v: Vec<f64> = row[4..].iter().map(|x| x.parse().unwrap()).collect();
        assert!((v[0] - v[1]).abs() <= 1e-10 * v[0].abs().max(1e-300));
        assert!((v[2] - v[3]).abs() <= 1e-12);
    }
}

#[test]
fn verify_passes() {
    let o = cvsteer(&["verify", "--cases", "3", "--max-degree", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 6);
    assert!(!out.contains("false"));
}
