use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use quiver_dt::duality::{integrality_report, FuncEqForm};
use quiver_dt::hilbert::hilb_series;
use quiver_dt::moduli::{s_series, SlopeStratumData, StratumFile};
use quiver_dt::wall_crossing::{kronecker_factorize, stable_chi_all};
use quiver_dt::{LatticePoint, Quiver, Stability};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quiver-dt")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &TempDir, name: &str, contents: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

const K3: &str = r#"{"vertices":["i","j"],"arrow_counts":[[0,0],[3,0]]}"#;

#[test]
fn help() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"));
}

#[test]
fn dt_table_for_m3() {
    let out = run(&["dt", "--m", "3", "--max-degree", "8", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["m"], 3);
    assert_eq!(v["max_total_degree"], 8);
    let d11 = v["invariants"].as_array().unwrap().iter().find(|e| e["a"] == 1 && e["b"] == 1).unwrap();
    assert_eq!(d11["d"], "3");
}

#[test]
fn dt_matches_library() {
    let out = run(&["dt", "--m", "2", "--max-degree", "7", "--stable-chi"]);
    assert_eq!(out.status.code(), Some(0));
    let table = kronecker_factorize(2, 7).unwrap();
    let expected = serde_json::to_value(table.to_json(&stable_chi_all(&table).unwrap())).unwrap();
    assert_eq!(json(&out), expected);
}

#[test]
fn dt_diagonal_check() {
    let out = run(&["dt", "--m", "4", "--max-degree", "6", "--diagonal-check"]);
    assert_eq!(out.status.code(), Some(0));
    let diag = json(&out)["diagonal"].as_array().unwrap().clone();
    assert_eq!(diag.len(), 3);
    assert!(diag.iter().all(|e| e["d"] == e["closed_form"]));
    assert_eq!(diag[0]["d"], "-4");
    // out of the formula's range
    assert_eq!(run(&["dt", "--m", "2", "--diagonal-check"]).status.code(), Some(2));
}

#[test]
fn dt_tsv() {
    let out = run(&["dt", "--m", "1", "--max-degree", "2", "--format", "tsv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "record\ta\tb\tvalue\nd\t1\t0\t1\nd\t0\t1\t1\nd\t2\t0\t0\nd\t1\t1\t1\nd\t0\t2\t0\n");
}

#[test]
fn missing_file_is_an_input_error() {
    let out = run(&["hilb", "--quiver", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));
}

#[test]
fn malformed_inputs() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"vertices":["i"],"arrow_counts":[[0,1]]}"#);
    assert_eq!(run(&["hilb", "--quiver", &bad]).status.code(), Some(2));
    let garbage = write(&dir, "garbage.json", "not json");
    assert_eq!(run(&["hilb", "--quiver", &garbage]).status.code(), Some(2));
    let k3 = write(&dir, "k3.json", K3);
    assert_eq!(run(&["hilb", "--quiver", &k3, "--framing", "1,0,1"]).status.code(), Some(2));
    assert_eq!(run(&["hilb", "--quiver", &k3, "--oracle", "--max-degree", "9"]).status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["dt"]).status.code(), Some(1));
    assert_eq!(run(&["dt", "--m", "2", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(run(&["duality", "--N", "1", "--a", "1:1"]).status.code(), Some(1));
    assert_eq!(run(&["duality", "--N", "1", "--b", "1:1,1:2"]).status.code(), Some(1));
    assert_eq!(run(&["duality", "--N", "1", "--b", "0:1"]).status.code(), Some(1));
}

#[test]
fn hilb_matches_library_and_oracle() {
    let dir = TempDir::new().unwrap();
    let k3 = write(&dir, "k3.json", K3);
    let out_path = dir.path().join("out.json");
    let out = run(&[
        "hilb", "--quiver", &k3, "--framing", "0,1", "--oracle", "--max-degree", "5", "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["oracle_agrees"], true);
    let q: Quiver = serde_json::from_str(K3).unwrap();
    let series = hilb_series(&q, &LatticePoint::new(vec![0, 1]), 5).unwrap();
    assert_eq!(v["series"], serde_json::to_value(series.to_records()).unwrap());
}

#[test]
fn fuss_catalan_tsv() {
    let dir = TempDir::new().unwrap();
    let loops = write(&dir, "loops.json", r#"{"vertices":["v"],"arrow_counts":[[2]]}"#);
    let out = run(&["hilb", "--quiver", &loops, "--max-degree", "4", "--format", "tsv", "--oracle"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "exponents\tcoefficient\tforests\n0\t1\t1\n1\t1\t1\n2\t2\t2\n3\t5\t5\n4\t14\t14\n");
}

#[test]
fn moduli_s_series() {
    let dir = TempDir::new().unwrap();
    let k3 = write(&dir, "k3.json", K3);
    let theta = write(&dir, "theta.json", r#"{"theta":[0,1]}"#);
    let stratum = write(&dir, "stratum.json", r#"{"mu":"1/2","elements":[[1,1]],"chi":[3]}"#);
    let out = run(&[
        "moduli", "--quiver", &k3, "--stability", &theta, "--stratum", &stratum, "--series", "s", "--vector",
        "1,1", "--max-degree", "6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let file: StratumFile = serde_json::from_str(r#"{"mu":"1/2","elements":[[1,1]],"chi":[3]}"#).unwrap();
    let q: Quiver = serde_json::from_str(K3).unwrap();
    let data = SlopeStratumData::from_file(q, Stability::new(vec![0, 1]), 6, &file).unwrap();
    let s = s_series(&data, &LatticePoint::new(vec![1, 1]), 6).unwrap();
    let v = json(&out);
    assert_eq!(v["series"], serde_json::to_value(s.to_records()).unwrap());
    assert_eq!(v["series"][1]["coefficient"], "-3");

    let wrong_slope = run(&[
        "moduli", "--quiver", &k3, "--stability", &theta, "--stratum", &stratum, "--series", "r", "--vector",
        "1,0",
    ]);
    assert_eq!(wrong_slope.status.code(), Some(2));
}

#[test]
fn duality_reports() {
    let out = run(&["duality", "--N", "2", "--b", "1:1,3:-2", "--max-degree", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let form = FuncEqForm::from_integers(2, &[(1, 1), (3, -2)]);
    assert_eq!(json(&out), serde_json::to_value(integrality_report(&form, 7).unwrap()).unwrap());
    let moebius = run(&["duality", "--N", "2", "--b", "1:1,3:-2", "--max-degree", "7", "--op", "moebius"]);
    assert_eq!(moebius.stdout, out.stdout);

    let solve = run(&["duality", "--N", "1", "--b", "1:-1", "--op", "solve", "--max-degree", "4", "--format", "tsv"]);
    let text = String::from_utf8(solve.stdout).unwrap();
    assert_eq!(text, "exponents\tcoefficient\n0\t1\n1\t1\n2\t2\n3\t5\n4\t14\n");

    // the Möbius formula needs N ≠ 0
    assert_eq!(run(&["duality", "--N", "0", "--b", "1:1", "--op", "moebius"]).status.code(), Some(2));
    let negative = run(&["duality", "--N", "-1", "--b", "2:3/2", "--max-degree", "4"]);
    assert_eq!(negative.status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let args = ["dt", "--m", "3", "--max-degree", "6", "--stable-chi", "--diagonal-check"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let tsv = ["verify", "--max-degree", "3", "--format", "tsv"];
    assert_eq!(run(&tsv).stdout, run(&tsv).stdout);
}

#[test]
fn verify_passes() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("verify.json");
    let out = run(&["verify", "--max-degree", "4", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(Path::new(&path)).unwrap()).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn unwritable_output() {
    let out = run(&["dt", "--m", "1", "--output", "/nonexistent/dir/out.json"]);
    assert_eq!(out.status.code(), Some(2));
}
