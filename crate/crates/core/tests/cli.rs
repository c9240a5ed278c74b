use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn lamcert(args: &[&str], seed: Option<&str>) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lamcert"));
    cmd.args(args).env_remove("LAMCERT_SEED");
    if let Some(s) = seed {
        cmd.env("LAMCERT_SEED", s);
    }
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf-8"),
        String::from_utf8(out.stderr).expect("utf-8"),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let full: Vec<&str> = ["--format", "json"].iter().chain(args).copied().collect();
    let (code, stdout, _) = lamcert(&full, None);
    (code, serde_json::from_str(&stdout).expect("machine report"))
}

fn certificate<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"].as_str().is_some_and(|n| n.starts_with(name)))
        .unwrap_or_else(|| panic!("no certificate {name}"))
}

fn decimal(v: &Value) -> f64 {
    let s = v.as_str().unwrap();
    match s.split_once('/') {
        Some((p, q)) => p.parse::<f64>().unwrap() / q.parse::<f64>().unwrap(),
        None => s.parse().unwrap(),
    }
}

#[test]
fn perron_brackets_the_golden_ratio() {
    let (code, report) = json(&["perron", &data("fib.json")]);
    assert_eq!(code, 0);
    assert_eq!(report["verdict"], "verified");
    let interval = certificate(&report, "");
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!(decimal(&interval["lower"]) <= golden + 1e-12);
    assert!(decimal(&interval["upper"]) >= golden - 1e-12);

    let (code, text, _) = lamcert(&["perron", &data("fib.json")], None);
    assert_eq!(code, 0);
    assert!(text.contains("~1.618033988"));
    assert!(text.contains("approximate, non-normative"));
}

#[test]
fn tighten_reports_the_worked_schedule() {
    let (code, report) = json(&["tighten", &data("worked_enlargement.json")]);
    assert_eq!(code, 0);
    let schedule: Vec<(u64, u64)> = certificate(&report, "strict schedule")["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["index"].as_u64().unwrap(), e["power"].as_u64().unwrap()))
        .collect();
    assert_eq!(schedule, vec![(1, 1), (2, 2), (3, 1)]);
    let before = certificate(&report, "before");
    let after = certificate(&report, "after");
    assert!(decimal(&after["upper"]) < decimal(&before["lower"]));
}

#[test]
fn example_documents_verify() {
    for (args, code) in [
        (vec!["pushaway", "concentric_pair.json", "--enumerate-all"], 0),
        (vec!["pushaway", "concentric_pair.json", "--order", "1,0"], 0),
        (vec!["layers", "worked_family.json"], 0),
        (vec!["certify", "subinvariance.json"], 0),
        (vec!["certify", "trace.json"], 0),
        (vec!["certify", "worked_enlargement.json"], 0),
        (vec!["perron", "fib.json", "--width", "1/10", "--max-iterations", "1"], 3),
    ] {
        let args: Vec<String> = args
            .iter()
            .map(|a| if a.ends_with(".json") { data(a) } else { a.to_string() })
            .collect();
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (got, stdout, _) = lamcert(&refs, None);
        assert_eq!(got, code, "{args:?}\n{stdout}");
    }
}

#[test]
fn enumeration_cap_is_inconclusive() {
    let (code, report) = json(&["pushaway", &data("concentric_pair.json"), "--enumerate-all", "--cap", "1"]);
    assert_eq!(code, 3);
    assert_eq!(report["verdict"], "inconclusive");
}

#[test]
fn schema_errors_name_their_path() {
    let (code, report) = json(&["perron", &data("bad_matrix.json")]);
    assert_eq!(code, 2);
    assert_eq!(report["verdict"], "invalid-input");
    assert!(report["diagnostics"]
        .as_array()
        .unwrap()
        .iter()
        .any(|d| d["location"] == "payload.entries[0][0]"));
}

#[test]
fn bad_invocations_exit_two() {
    let missing = data("does_not_exist.json");
    for args in [
        vec!["perron", missing.as_str()],
        vec!["frobnicate"],
        vec!["fuzz", "nonsense"],
        vec!["perron", &data("fib.json"), "--width", "-1/2"],
        vec!["tighten", &data("fib.json")],
        vec!["fuzz", "pf", "--seed", "not-a-number"],
    ] {
        let (code, _, _) = lamcert(&args, None);
        assert_eq!(code, 2, "{args:?}");
    }
    let (code, stdout, _) = lamcert(&["--help"], None);
    assert_eq!(code, 0);
    assert!(stdout.contains("pushaway"));
}

#[test]
fn violated_subinvariance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("case.json");
    std::fs::write(
        &path,
        r#"{"format_version": "1", "kind": "subinvariance-case",
            "payload": {"matrix": [[2, 1], [1, 1]], "weights": ["1", "1"], "lambda": "2"}}"#,
    )
    .unwrap();
    let (code, report) = json(&["certify", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(report["diagnostics"][0]["location"], "index 1");
}

#[test]
fn unsupported_version_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    std::fs::write(&path, r#"{"format_version": "9", "kind": "matrix", "payload": {"entries": [[1]]}}"#).unwrap();
    let (code, _) = json(&["perron", path.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn seed_comes_from_the_environment() {
    let args = ["--format", "json", "fuzz", "pf", "--trials", "5"];
    let (code, from_env, _) = lamcert(&args, Some("42"));
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&from_env).unwrap();
    assert_eq!(report["reproduction"]["seed"], 42);

    let explicit: Vec<&str> = args.iter().copied().chain(["--seed", "42"]).collect();
    let (_, from_flag, _) = lamcert(&explicit, None);
    assert_eq!(from_env, from_flag);

    let (_, default, _) = lamcert(&args, None);
    let report: Value = serde_json::from_str(&default).unwrap();
    assert_eq!(report["reproduction"]["seed"], 0);
}

#[test]
fn fuzz_runs_are_byte_identical() {
    for suite in ["pf", "propagation", "pipeline", "confluence"] {
        let args = ["--format", "json", "fuzz", suite, "--trials", "20", "--seed", "9"];
        let first = lamcert(&args, None);
        let second = lamcert(&args, None);
        assert_eq!(first, second, "{suite}");
        assert_eq!(first.0, 0, "{suite}: {}", first.1);
    }
}
