use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use harmclass::series::{CoefficientJson, SeriesJson};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harmclass")).args(args).output().expect("spawn harmclass")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const IDENTITY: &str = r#"{"degree":1,"a_re":[1],"a_im":[0],"b_re":[0],"b_im":[0]}"#;

#[test]
fn check_identity() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", IDENTITY);
    let out = run(&["check", "--preset", "SH_alpha", "--alpha", "0.5", &f]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["budget"], 1.0);
    assert_eq!(v["member"], true);
}

#[test]
fn check_sharp_and_inflated() {
    let dir = tempfile::tempdir().unwrap();
    let sharp = dir.path().join("sharp.json");
    let out = run(&[
        "extremal", "--preset", "GH_alpha", "--alpha", "0.25", "--x", "3:1.0", "--out",
        sharp.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["check", "--preset", "GH_alpha", "--alpha", "0.25", sharp.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let budget = stdout_json(&out)["budget"].as_f64().unwrap();
    assert!((budget - 2.0).abs() <= 1e-12);

    // ξ(3) = (2·3 - 1 - 0.25)/0.75 at GH_alpha; 1.1/ξ(3) overshoots the budget.
    let xi3 = (6.0 - 1.0 - 0.25) / 0.75;
    let inflated = format!(
        r#"{{"degree":3,"amag":[1,0,{}],"bmag":[0,0,0],"u":1}}"#,
        1.1 / xi3
    );
    let f = write(dir.path(), "inflated.json", &inflated);
    let out = run(&["check", "--preset", "GH_alpha", "--alpha", "0.25", &f]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["member"], false);
    assert!(v["budget"].as_f64().unwrap() > 2.0);
}

#[test]
fn usage_and_input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{not json");
    assert_eq!(run(&["check", "--preset", "SH_alpha", &bad]).status.code(), Some(2));
    let f = write(dir.path(), "f.json", IDENTITY);
    assert_eq!(run(&["check", "--preset", "SH_alpha", "--alpha", "1.0", &f]).status.code(), Some(2));
    assert_eq!(run(&["check", "--preset", "nope", &f]).status.code(), Some(2));
    assert_eq!(run(&["check", "--u", "1", "--v", "1", &f]).status.code(), Some(2));
    assert_eq!(run(&["check", "--preset", "SH_alpha", "--k", "1", &f]).status.code(), Some(2));
    assert_eq!(run(&["check", &f]).status.code(), Some(2));
    let short = write(dir.path(), "s.json", r#"{"degree":2,"a_re":[1],"a_im":[0],"b_re":[0],"b_im":[0]}"#);
    assert_eq!(run(&["check", "--preset", "SH_alpha", &short]).status.code(), Some(2));
}

#[test]
fn verify_identity_and_violator() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", IDENTITY);
    let out = run(&["verify", "--preset", "kUSH", "--k", "1", "--alpha", "0.3", &f]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["min_condition_value"].as_f64().unwrap() - 0.7).abs() < 1e-14);
    assert_eq!(v["pass"], true);

    // Budget 1 + 2·0.45 + 3·0.2 = 2.5 at SH_alpha, α = 0.
    let g = write(
        dir.path(),
        "g.json",
        r#"{"degree":3,"amag":[1,0.45,0.2],"bmag":[0,0,0],"u":1}"#,
    );
    let csv = dir.path().join("cond.csv");
    let out = run(&[
        "verify", "--preset", "SH_alpha", "--radii", "0.5,0.9,0.99", "--csv",
        csv.to_str().unwrap(), &g,
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["pass"], false);
    assert!(v["min_condition_value"].as_f64().unwrap() < 0.0);
    assert_eq!(v["argmin_z"].as_array().unwrap().len(), 2);
    let body = fs::read_to_string(csv).unwrap();
    assert!(body.starts_with("r,theta,condition_value\n"));
    assert_eq!(body.lines().count(), 1 + 3 * 128);
}

#[test]
fn verify_batch_is_reproducible() {
    let args = ["verify", "--preset", "KH_alpha", "--alpha", "0.2", "--count", "25", "--seed", "17", "--angles", "32"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout_json(&a)["passed"], 25);
}

#[test]
fn distort_envelope() {
    let out = run(&["distort", "--preset", "GH_alpha", "--alpha", "0", "--b1", "0", "--r", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((row[1] - 0.41667).abs() < 1e-5 && (row[2] - 0.58333).abs() < 1e-5);

    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "t.json", r#"{"degree":2,"amag":[1,0.2],"bmag":[0.1,0],"u":1}"#);
    let out = run(&["distort", "--preset", "GH_alpha", "--r", "0.2,0.6", "--angles", "16", &f]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("r,theta,abs_f,lower,upper\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 16);
}

#[test]
fn convolve_and_combine_stay_members() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // Both files sit on the boundary at kHCV with k = 1, α = 0.
    let p2 = d.join("p2.json");
    let q3 = d.join("q3.json");
    let common = ["--preset", "kHCV", "--k", "1", "--degree", "4"];
    let mut a = vec!["extreme-points"];
    a.extend(common);
    a.extend(["--only", "P2", "--out", p2.to_str().unwrap()]);
    assert_eq!(run(&a).status.code(), Some(0));
    let mut a = vec!["extreme-points"];
    a.extend(common);
    a.extend(["--only", "Q3", "--out", q3.to_str().unwrap()]);
    assert_eq!(run(&a).status.code(), Some(0));

    let f = write(d, "f.json", r#"{"degree":3,"amag":[1,0.05,0.01],"bmag":[0.1,0.02,0],"u":2}"#);
    let conv = d.join("conv.json");
    let out = run(&["convolve", &f, &f, "--out", conv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: SeriesJson = serde_json::from_str(&fs::read_to_string(&conv).unwrap()).unwrap();
    assert!(matches!(parsed, SeriesJson::Magnitudes(_)));
    let out = run(&["check", "--preset", "kHCV", "--k", "1", conv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let combo = d.join("combo.json");
    let out = run(&[
        "combine", p2.to_str().unwrap(), q3.to_str().unwrap(), &f, "--t", "0.3,0.3,0.4", "--out",
        combo.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["check", "--preset", "kHCV", "--k", "1", combo.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["combine", &f, &f, "--t", "0.3,0.3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn extreme_point_listing_flags_q1() {
    let out = run(&["extreme-points", "--preset", "SH_alpha", "--alpha", "0", "--degree", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let list = stdout_json(&out);
    let list = list.as_array().unwrap();
    assert_eq!(list.len(), 6);
    let q1 = list.iter().find(|e| e["kind"] == "Q" && e["n"] == 1).unwrap();
    assert_eq!(q1["eligible"], false);
    for e in list.iter().filter(|e| !(e["kind"] == "P" && e["n"] == 1)) {
        assert!((e["budget"].as_f64().unwrap() - 2.0).abs() <= 1e-12);
    }
}

#[test]
fn apply_operator() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", r#"{"degree":2,"a_re":[1,1],"a_im":[0,0],"b_re":[0.3,0],"b_im":[0,0]}"#);
    let out = run(&["apply", "--u", "1", "--lambda", "1", &f]);
    assert_eq!(out.status.code(), Some(0));
    let j: CoefficientJson = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(j.a_re, vec![1.0, 2.0]);
    assert_eq!(j.b_re, vec![-0.3, 0.0]);
}

#[test]
fn generated_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let out = run(&[
        "extremal", "--u", "3", "--v", "1", "--k", "0.7", "--alpha", "0.35", "--lambda", "1.3",
        "--x", "2:0.1", "--x", "5:0.2", "--y", "1:0.3", "--y", "4:0.4", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let j: SeriesJson = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let f = j.to_poly().unwrap();

    let p = harmclass::ParamSet::new(3, 1, 0.7, 0.35, 1.3).unwrap();
    let direct = harmclass::classkernel::sharp_function(&p, &[0.1, 0.0, 0.0, 0.2], &[0.3, 0.0, 0.0, 0.4]).unwrap();
    for n in 1..=5 {
        assert!((f.a(n) - direct.a(n)).norm() <= 1e-15);
        assert!((f.b(n) - direct.b(n)).norm() <= 1e-15);
    }
    let out = run(&[
        "check", "--u", "3", "--v", "1", "--k", "0.7", "--alpha", "0.35", "--lambda", "1.3",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
}
