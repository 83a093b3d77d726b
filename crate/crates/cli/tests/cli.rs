use std::process::Command;

use serde_json::Value;

use ie_cli::{run, Execution};
use ie_core::expr::{eval_series, parse};
use ie_core::EvalContext;

fn ie(args: &[&str]) -> Execution {
    run(std::iter::once("ie").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    serde_json::from_str(&ie(&full).stdout).expect("valid JSON")
}

#[test]
fn golden_plain_outputs() {
    let cases: &[(&[&str], &str, i32)] = &[
        (&["eval", "x^2", "--at", "x=H+eps"], "H^2 + 2 + eps^2\n", 0),
        (&["eval", "(x+1)/x", "--at", "x=H"], "1 + eps\n", 0),
        (&["st", "3 + 2*eps - eps^2"], "3\n", 0),
        (&["classify", "eps^2"], "infinitesimal\n", 0),
        (&["classify", "0"], "zero\n", 0),
        (&["deriv", "x^2", "--at", "3"], "6\nd/dx: 2 * x\n", 0),
        (&["cont", "x^2", "--at", "1/2"], "Decided(continuous)\n", 0),
        (&["ucont", "x^2", "--domain", "[0,1]"], "UC\ncertificate: |f'| <= 2 on the battery\n", 0),
        (&["ivt", "x", "--bracket", "-1,1", "-m", "2", "--iters", "1"], "0 (exact)\n  0: [-1, 1]\n", 0),
    ];
    for (args, want, code) in cases {
        let out = ie(args);
        assert_eq!(out.stdout, *want, "{args:?}");
        assert_eq!(out.code, *code, "{args:?}");
    }
}

#[test]
fn stevin_outputs() {
    let out = ie(&["stevin", "x^3 - 300*x - 33915024", "--bracket", "0,1000", "--digits", "6"]);
    assert_eq!(out.stdout.lines().next(), Some("324 (exact)"));
    assert_eq!(out.code, 0);
    let out = ie(&["stevin", "x^2 - 2", "--bracket", "1,2", "--digits", "8"]);
    assert_eq!(out.stdout.lines().next(), Some("1.41421356"));
    assert!(out.stdout.contains("8: [1.41421356, 1.41421357]"));
}

#[test]
fn exit_codes_follow_verdicts() {
    assert_eq!(ie(&["limit", "(-1)^n"]).code, 2);
    assert_eq!(ie(&["limit", "(n+1)/n"]).code, 0);
    assert_eq!(ie(&["compare", "(-1)^n/n", "const:0"]).code, 2);
    assert_eq!(ie(&["compare", "1/n", "const:0"]).stdout.lines().next(), Some("Decided(greater)"));
    assert_eq!(ie(&["ucont", "sin(x)", "--domain", "R"]).code, 2);
    let err = ie(&["st", "H"]);
    assert_eq!(err.code, 1);
    assert!(err.stderr.starts_with("UnlimitedHasNoStandardPart"));
    let err = ie(&["eval", "sin(x", "--at", "x=1"]);
    assert_eq!(err.code, 1);
    assert!(err.stderr.starts_with("SyntaxError"), "{}", err.stderr);
    let usage = ie(&["frobnicate"]);
    assert_eq!(usage.code, 1);
    assert!(usage.stdout.is_empty() && !usage.stderr.is_empty());
    assert_eq!(ie(&["--help"]).code, 0);
}

/// Exit 2 exactly when the JSON payload carries an undecided outcome.
#[test]
fn undecided_payloads_match_exit_code() {
    let runs: &[&[&str]] = &[
        &["limit", "(-1)^n"],
        &["limit", "1/n"],
        &["compare", "(-1)^n/n", "const:0"],
        &["compare", "n", "const:3"],
        &["ucont", "x^2", "--domain", "R"],
        &["ucont", "sqrt(x)", "--domain", "[0,1]"],
        &["cont", "x^2", "--at", "2"],
        &["uconv", "--sum", "x + x/n", "--limit", "x"],
        &["delta", "1", "--at", "0", "--ns", "10"],
        &["delta", "1", "--at", "0", "--ns", "10,100"],
    ];
    for args in runs {
        let v = json(args);
        let text = v["result"].to_string();
        let undecided = text.contains("\"Undecided") || text.contains("\"verdict\":\"Undecided\"");
        assert_eq!(v["exit_code"] == 2, undecided, "{args:?}: {text}");
    }
}

#[test]
fn json_is_deterministic_apart_from_timing() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timing_ms");
        v.to_string()
    };
    for args in [&["eval", "exp(x)", "--at", "x=eps"][..], &["limit", "(n+1)/n"], &["delta", "cos(x)", "--at", "0"]] {
        assert_eq!(strip(json(args)), strip(json(args)));
    }
}

#[test]
fn json_envelope_has_the_schema_fields() {
    let schema: Value = serde_json::from_str(include_str!("../../../docs/report.schema.json")).unwrap();
    let required: Vec<&str> = schema["required"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let commands: Vec<&str> =
        schema["properties"]["command"]["enum"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    for args in [
        &["eval", "x", "--at", "x=1"][..],
        &["st", "H"],
        &["classify", "eps"],
        &["stevin", "x - 1/2", "--bracket", "0,1", "--digits", "2"],
    ] {
        let v = json(args);
        for key in &required {
            assert!(v.get(*key).is_some(), "{args:?} lacks {key}");
        }
        assert_eq!(v["schema"], 1);
        assert!(commands.contains(&v["command"].as_str().unwrap()));
        assert!(v.get("result").is_some() != v.get("error").is_some());
    }
    let err = json(&["st", "H"]);
    assert_eq!(err["error"]["name"], "UnlimitedHasNoStandardPart");
    assert_eq!(err["exit_code"], 1);
}

/// Every exact series printed by `eval` reparses to an equal value.
#[test]
fn eval_output_reparses() {
    for (e, at) in [("x^2", "x=H+eps"), ("x^2 - 1/x", "x=eps"), ("(x - 1/3)^3", "x=2*eps - H"), ("x*y", "x=H")] {
        let mut args = vec!["eval", e, "--at", at];
        if e == "x*y" {
            args.extend(["--at", "y=eps^2 - 3/7"]);
        }
        let out = ie(&args);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let printed = out.stdout.trim();
        let v = json(&args);
        let back = eval_series(&parse(printed).unwrap(), &EvalContext::default()).unwrap();
        assert_eq!(back.to_string(), printed);
        assert_eq!(v["result"]["value"]["text"], printed);
    }
}

#[test]
fn stream_constructors() {
    let first = |args: &[&str]| ie(args).stdout.lines().next().unwrap_or_default().to_string();
    assert_eq!(first(&["limit", "partial_sum:0:9*10^(-k)"]), "Decided(10 ± 0.00000001)");
    assert_eq!(first(&["limit", "const:3/4"]), "Decided(0.75 ± 0.00000001)");
    assert_eq!(first(&["limit", "embed:2 + eps"]), "Decided(2 ± 0.00000001)");
    assert_eq!(first(&["limit", "1 - x", "--with", "x=partial_sum:1:9*10^(-k)"]), "Decided(0 ± 0.00000001)");
    assert_eq!(first(&["compare", "decimal_sqrt:2", "const:1.4142"]), "Decided(greater)");
    assert_eq!(first(&["compare", "1 - x", "const:0", "--with", "x=partial_sum:9*10^(-k)"]), "Decided(greater)");
    assert_eq!(ie(&["limit", "n + y"]).stderr.trim(), "UnboundVariable: y");
}

#[test]
fn environment_fallbacks() {
    let bin = env!("CARGO_BIN_EXE_ie");
    let out = Command::new(bin).args(["eval", "exp(x)", "--at", "x=eps"]).env("IE_WINDOW", "3").output().unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1 + eps + 1/2*eps^2 + O(eps^3)");
    let out = Command::new(bin)
        .args(["eval", "exp(x)", "--at", "x=eps", "--window", "2"])
        .env("IE_WINDOW", "3")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1 + eps + O(eps^2)");
    let out = Command::new(bin)
        .args(["--json", "st", "1"])
        .env("IE_TOL", "1/1000")
        .env("IE_HORIZON", "64")
        .env("IE_PRECISION", "20")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["tol"], "0.001");
    assert_eq!(v["config"]["horizon"], 64);
    assert_eq!(v["config"]["precision"], 20);
    let out = Command::new(bin).args(["st", "1"]).env("IE_HORIZON", "8").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn delta_report() {
    let out = ie(&["delta", "1", "--at", "0"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("Decided(converges)"));
    let v = json(&["delta", "1", "--at", "0"]);
    let rows = v["result"]["probe_table"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let n = row["n"].as_f64().unwrap();
        assert!((row["value"].as_f64().unwrap() - n.atan()).abs() < 1e-10);
    }
    let bad = ie(&["delta", "exp(x)", "--at", "0", "--alpha", "1/n", "--eps", "1/n"]);
    assert_eq!(bad.code, 1);
    assert!(bad.stderr.starts_with("HypothesisViolation"));
    let odd = ie(&["delta", "sin(x)", "--at", "0"]);
    assert!(odd.stdout.contains("st(symbolic): 0"), "{}", odd.stdout);
}
