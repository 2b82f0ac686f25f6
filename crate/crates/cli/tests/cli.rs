use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

use wickgit_cli::{emit_document, parse_input, run_command, Output, EXIT_DEFINITE, EXIT_ERROR, EXIT_INDETERMINATE};
use wickgit_core::catalog_metric;
use wickgit_core::lie::{random_element, GroupKind};

fn run(args: &[&str]) -> Output {
    run_command(std::iter::once("wickgit").chain(args.iter().copied()))
}

fn emit(dir: &TempDir, name: &str) -> PathBuf {
    let path = dir.path().join(format!("{name}.json"));
    let out = run(&["catalog", "--name", name, "--emit", path.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_DEFINITE, "{}", out.stderr);
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_riemannian_reports_rpe() {
    let dir = TempDir::new().unwrap();
    let p = emit(&dir, "s2xs2");
    let out = run(&["classify", "--input", s(&p), "--tensor", "riemann"]);
    assert_eq!(out.code, EXIT_DEFINITE);
    let r = json(&out);
    assert_eq!(r["verdict"], serde_json::json!(["RPE"]));
    assert_eq!(r["config"]["seed"], 42);
    assert_eq!(r["split_tol"], 1e-8);
}

#[test]
fn wick_check_reports_relation() {
    let dir = TempDir::new().unwrap();
    let (a, b, f) = (emit(&dir, "s2xs2"), emit(&dir, "lorentz_L"), emit(&dir, "flat"));
    let out = run(&["wick-check", "--a", s(&a), "--b", s(&b)]);
    assert_eq!(out.code, EXIT_DEFINITE);
    assert_eq!(json(&out)["relation"], "wick-rotated");

    let out = run(&["wick-check", "--a", s(&a), "--b", s(&f), "--seed", "7"]);
    let r = json(&out);
    assert_eq!(r["relation"], "not-wick-rotated");
    assert_eq!(r["invariant_distance"], 4.0);
    assert_eq!(r["config"]["seed"], 7);
}

#[test]
fn non_closed_wick_check_is_indeterminate() {
    let dir = TempDir::new().unwrap();
    let p = emit(&dir, "ppwave_vsi");
    let out = run(&["wick-check", "--a", s(&p), "--b", s(&p)]);
    assert_eq!(out.code, EXIT_INDETERMINATE);
    let r = json(&out);
    assert_eq!(r["relation"], "indeterminate");
    assert_eq!(r["limits_wick_rotated"], true);
}

#[test]
fn ppwave_invariants_vanish() {
    let dir = TempDir::new().unwrap();
    let p = emit(&dir, "ppwave_vsi");
    let out = run(&["invariants", "--input", s(&p), "--max-degree", "3"]);
    assert_eq!(out.code, EXIT_DEFINITE);
    let r = json(&out);
    let values = r["invariants"].as_array().unwrap();
    assert_eq!(values.len(), 18);
    assert!(values.iter().all(|v| v["value"].as_f64().unwrap().abs() < 1e-10));

    let out = run(&["invariants", "--input", s(&p), "--max-degree", "2", "--format", "csv"]);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "label,degree,word,value");
    assert_eq!(lines.len(), 1 + 5);

    let out = run(&["vsi", "--input", s(&p), "--max-degree", "4"]);
    assert_eq!(json(&out)["vsi"], true);
}

#[test]
fn flow_exit_codes() {
    let dir = TempDir::new().unwrap();
    let base = catalog_metric("lorentz_L").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = random_element(GroupKind::Real(base.signature()), &mut rng, 1.0);
    let boosted = dir.path().join("boosted.json");
    std::fs::write(&boosted, emit_document(&base.transformed(&g).unwrap())).unwrap();

    let out = run(&["flow", "--input", s(&boosted)]);
    assert_eq!(out.code, EXIT_DEFINITE, "{}", out.stderr);
    let r = json(&out);
    assert_eq!(r["flow"]["verdict"], "converged-in-orbit");
    assert_eq!(r["flow"]["monotone"], true);
    assert_eq!(r["minimizer"]["frame"], "pseudo-orthonormal");

    let out = run(&["flow", "--input", s(&boosted), "--max-iter", "1"]);
    assert_eq!(out.code, EXIT_INDETERMINATE);
    let out = run(&["classify", "--input", s(&boosted), "--max-iter", "1"]);
    assert_eq!(out.code, EXIT_INDETERMINATE);
    assert_eq!(json(&out)["determinate"], false);

    let out = run(&["flow", "--input", s(&boosted), "--group", "complex"]);
    assert_eq!(out.code, EXIT_DEFINITE);
}

#[test]
fn usage_and_errors() {
    let out = run(&["--help"]);
    assert_eq!(out.code, EXIT_DEFINITE);
    assert!(out.stdout.contains("wick-check"));
    assert_eq!(run(&["classify", "--bogus"]).code, EXIT_ERROR);
    assert_eq!(run(&[]).code, EXIT_ERROR);

    let out = run(&["classify", "--input", "/nonexistent/doc.json"]);
    assert_eq!(out.code, EXIT_ERROR);
    assert!(out.stderr.contains("nonexistent"));

    let dir = TempDir::new().unwrap();
    let out = run(&["catalog", "--name", "klein_bottle", "--emit", s(&dir.path().join("x.json"))]);
    assert_eq!(out.code, EXIT_ERROR);
    assert!(out.stderr.contains("s2xs2"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dimension":2,"signature":[2,0],"riemann":[{"idx":[0,1,0,1],"re":1},{"idx":[1,0,0,1],"re":1}]}"#).unwrap();
    let out = run(&["invariants", "--input", s(&bad)]);
    assert_eq!(out.code, EXIT_ERROR);
    assert!(out.stderr.contains("conflicts"));

    let small = dir.path().join("small.json");
    std::fs::write(&small, r#"{"dimension":2,"signature":[1,1],"riemann":[]}"#).unwrap();
    assert_eq!(run(&["classify", "--input", s(&small), "--tensor", "weyl"]).code, EXIT_ERROR);
    let p = emit(&dir, "s2xs2");
    assert_eq!(run(&["wick-check", "--a", s(&p), "--b", s(&small)]).code, EXIT_ERROR);
    assert_eq!(run(&["invariants", "--input", s(&p), "--max-degree", "5"]).code, EXIT_ERROR);
}

#[test]
fn catalog_round_trip_through_files() {
    let dir = TempDir::new().unwrap();
    for name in ["s2xs2", "lorentz_L", "neutral_N", "ppwave_vsi", "flat", "flat(1,3)"] {
        let p = emit(&dir, name);
        assert_eq!(parse_input(&p).unwrap(), catalog_metric(name).unwrap(), "{name}");
    }
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (emit(&dir, "s2xs2"), emit(&dir, "neutral_N"));
    let first = run(&["wick-check", "--a", s(&a), "--b", s(&b)]);
    let second = run(&["wick-check", "--a", s(&a), "--b", s(&b)]);
    assert_eq!(first, second);
}
