use std::process::{Command, Output};

fn opspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opspace"))
        .args(args)
        .env_remove("OPSPACE_SEED")
        .output()
        .expect("binary runs")
}

const SMALL: [&str; 6] = ["--max-n", "3", "--restarts", "2", "--iters", "20"];

fn run_small(suite: &str, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--suite", suite];
    args.extend(SMALL);
    args.extend(extra);
    opspace(&args)
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn growth_csv_has_documented_header() {
    let out = run_small("growth", &["--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,estimate,expected"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[2].starts_with("3,1.732050807568877"));
}

#[test]
fn invalid_suite_prints_usage() {
    let out = opspace(&["run", "--suite", "everything"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("invalid value") && err.contains("possible values: growth"), "{err}");
}

#[test]
fn budget_and_level_must_be_positive() {
    for flag in ["--max-n", "--restarts", "--iters", "--samples"] {
        let out = opspace(&["run", "--suite", "growth", flag, "0"]);
        assert!(!out.status.success(), "{flag} 0 accepted");
    }
}

#[test]
fn environment_seed_overrides_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_opspace"))
        .args(["run", "--suite", "factorization", "--seed", "1", "--samples", "2"])
        .env("OPSPACE_SEED", "77")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(json(&out)["seed"], 77);
    let bad = Command::new(env!("CARGO_BIN_EXE_opspace"))
        .args(["run", "--suite", "factorization"])
        .env("OPSPACE_SEED", "not-a-number")
        .output()
        .unwrap();
    assert!(!bad.status.success());
}

#[test]
fn reports_are_deterministic_apart_from_timestamp() {
    let strip = |out: Output| {
        assert!(out.status.success());
        let mut v = json(&out);
        v.as_object_mut().unwrap().remove("timestamp");
        v
    };
    let a = strip(run_small("counterexamples", &["--seed", "9"]));
    let b = strip(run_small("counterexamples", &["--seed", "9", "--parallel"]));
    assert_eq!(a, b);
    let c = strip(run_small("counterexamples", &["--seed", "10"]));
    assert_ne!(a, c);
}

#[test]
fn out_path_receives_text_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested").join("report.txt");
    let out = run_small("axioms", &["--samples", "3", "--format", "text", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("[ruan] PASS") && text.contains("[identities] PASS"));
    assert!(text.trim_end().ends_with("all checks passed"));
}

#[test]
fn json_report_carries_witnesses_for_extremal_values() {
    let out = run_small("counterexamples", &[]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert!(v["first_failure"].is_null());
    let rows = v["sections"][0]["rows"].as_array().unwrap();
    assert!(rows.iter().all(|r| r["witness"]["u"]["coeffs"].is_array()));
}
