mod common;

use std::path::PathBuf;
use std::process::{Command, Output};

use common::*;
use rand::Rng;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_infconvex"))
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../docs/scenarios")
        .join(format!("{name}.json"))
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let Output {
        status,
        stdout,
        stderr,
    } = bin().args(args).output().unwrap();
    let text = String::from_utf8(stdout).unwrap();
    let report = serde_json::from_str(&text).unwrap_or(Value::Null);
    (
        status.code().unwrap(),
        report,
        String::from_utf8(stderr).unwrap(),
    )
}

fn assert_envelope(report: &Value, code: i32) {
    assert!(report["command"].is_string(), "{report}");
    assert!(report["status"].is_string(), "{report}");
    assert!(report.get("result").is_some(), "{report}");
    assert_eq!(report["exit_code"], code, "{report}");
    let expected = match report["status"].as_str().unwrap() {
        "holds-on-samples" | "holds" | "absent" | "ok" => 0,
        "violated" | "witness" => 1,
        "inconclusive" => 2,
        "input-error" => 3,
        other => panic!("unknown status {other}"),
    };
    assert_eq!(expected, code, "{report}");
}

#[test]
fn remark_scenario_is_violated() {
    let path = scenario("remark");
    let (code, report, _) = run(&["check-inf", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_envelope(&report, code);
    let gap = report["result"]["report"]["verdict"]["gap"]
        .as_f64()
        .unwrap();
    assert!((gap - 0.0759606612).abs() < 1e-8);
    assert_eq!(
        report["result"]["report"]["verdict"]["witness"]["kind"],
        "sequence"
    );
}

#[test]
fn flags_override_scenario_fields() {
    let path = scenario("remark");
    let (code, report, _) = run(&[
        "check-inf",
        "--scenario",
        path.to_str().unwrap(),
        "--mu",
        "geometric:0.5",
    ]);
    assert_eq!(code, 0);
    assert_envelope(&report, code);
}

#[test]
fn every_shipped_scenario_runs() {
    for (cmd, name, code) in [
        ("check-inf", "remark", 1),
        ("bracket", "bracket", 0),
        ("jensen", "jensen", 0),
        ("hunt", "hunt", 1),
        ("expand", "expand", 0),
    ] {
        let path = scenario(name);
        let (c, report, _) = run(&[cmd, "--scenario", path.to_str().unwrap(), "--json"]);
        assert_eq!(c, code, "{cmd} {name}: {report}");
        assert_envelope(&report, c);
    }
}

#[test]
fn symmetric_jensen_holds() {
    let (code, report, _) = run(&[
        "jensen",
        "--function",
        "builtin:square",
        "--domain",
        "-1,1",
        "--distribution",
        "-1:0.5,1:0.5",
    ]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["verdict"]["gap"], -1.0);
}

#[test]
fn input_errors_exit_3() {
    let (code, report, err) = run(&["expand", "--lambda", "geometric:0.5", "--t", "1.5"]);
    assert_eq!(code, 3);
    assert_envelope(&report, code);
    assert!(err.contains("t = 1.5 outside [0, 1]"), "{err}");

    let dir = std::env::temp_dir().join(format!("infconvex-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"function": "x", "colour": "red"}"#).unwrap();
    let (code, report, err) = run(&["check-t", "--scenario", bad.to_str().unwrap(), "--t", "0.5"]);
    assert_eq!(code, 3);
    assert_envelope(&report, code);
    assert!(err.contains("malformed scenario"), "{err}");

    for args in [
        vec![
            "check-t",
            "--function",
            "x ** 2",
            "--domain",
            "0,1",
            "--t",
            "0.5",
        ],
        vec!["check-t", "--function", "x", "--t", "0.5"],
        vec![
            "check-t",
            "--function",
            "x",
            "--domain",
            "2,1",
            "--t",
            "0.5",
        ],
        vec![
            "check-ts",
            "--function",
            "x",
            "--domain",
            "0,1",
            "--t",
            "0.5",
        ],
        vec![
            "bracket",
            "--function",
            "x1",
            "--domain",
            "R^2",
            "--lambda",
            "geometric:0.5",
            "--sequence",
            "0;1",
        ],
        vec![
            "check-inf",
            "--function",
            "x",
            "--domain",
            "0,1",
            "--lambda",
            "geometric:1.5",
            "--sequence",
            "0;1",
        ],
    ] {
        let (code, report, _) = run(&args);
        assert_eq!(code, 3, "{args:?}");
        assert_envelope(&report, code);
    }
    let (code, _, err) = run(&["frobnicate"]);
    assert_eq!(code, 3);
    assert!(!err.is_empty());
}

#[test]
fn hunt_streams_progress_to_stderr() {
    let (code, report, err) = run(&[
        "hunt",
        "--function",
        "builtin:square",
        "--domain",
        "0,1",
        "--lambda",
        "geometric:0.5",
        "--budget",
        "500",
    ]);
    assert_eq!(code, 0);
    assert_eq!(report["status"], "absent");
    assert!(err.lines().count() >= 2);
    assert!(err.lines().all(|l| l.starts_with("restart ")));
}

#[test]
fn remark_demo_narrative_and_json() {
    let out = bin().arg("remark").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1.6487212707"));
    assert!(text.contains("1.5727606095"));
    assert!(text.contains("VIOLATED"));

    let (code, report, _) = run(&["remark", "--json"]);
    assert_eq!(code, 1);
    assert_envelope(&report, code);
    assert!((report["result"]["lhs"].as_f64().unwrap() - 1.6487213).abs() < 1e-7);

    let (code, report, _) = run(&["remark", "--mu-ratio", "0.5", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["condition_holds"], false);
}

#[test]
fn exit_codes_match_status_on_random_scenarios() {
    let mut rng = rng(100);
    let functions = [
        "builtin:exp",
        "builtin:square",
        "builtin:neg-square",
        "x^3",
        "sqrt(x)",
        "abs(x - 0.3)",
    ];
    let commands = [
        "check-t",
        "check-ts",
        "jensen",
        "check-inf",
        "bracket",
        "expand",
    ];
    for _ in 0..100 {
        let cmd = *pick(&mut rng, &commands);
        let function = *pick(&mut rng, &functions);
        let a: f64 = rng.gen_range(-1.0..0.5);
        let b: f64 = a + rng.gen_range(0.1..2.0);
        let domain = format!("{a},{b}");
        let t = format!("{}", rng.gen_range(0.0..1.0f64));
        let s = format!("{}", rng.gen_range(0.0..1.0f64));
        let ratio = format!("geometric:{}", rng.gen_range(0.1..0.9f64));
        let mu = format!("geometric:{}", rng.gen_range(0.1..0.9f64));
        let x1 = rng.gen_range(a..b);
        let x2 = rng.gen_range(a..b);
        let seq = format!("{x1};{x2}");
        let dist = format!("{x1}:0.3,{x2}:0.7");
        let mut args: Vec<&str> = vec![cmd, "--function", function, "--domain", &domain];
        match cmd {
            "check-t" => args.extend(["--t", &t, "--samples", "200"]),
            "check-ts" => args.extend(["--t", &t, "--s", &s, "--samples", "200"]),
            "jensen" => args.extend(["--distribution", &dist]),
            "check-inf" => args.extend(["--lambda", &ratio, "--mu", &mu, "--sequence", &seq]),
            "bracket" => args.extend(["--lambda", &ratio, "--sequence", &seq]),
            _ => args = vec![cmd, "--lambda", &ratio, "--t", &t],
        }
        let (code, report, _) = run(&args);
        assert!((0..=3).contains(&code));
        assert_envelope(&report, code);
    }
}
