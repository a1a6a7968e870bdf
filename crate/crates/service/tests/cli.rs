use std::path::PathBuf;

use serde_json::Value;

use factor_forge::kb::{trade_secrets, trade_secrets_source};
use factor_forge::serialize_kb;
use factor_forge_service::run;

/// Runs the CLI in-process against the bundled corpus.
fn cli(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["factor-forge"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("factor-forge-{}-{name}.json", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn analyze_prints_a_report() {
    let (code, out, _) = cli(&["analyze", "leaky"]);
    assert_eq!(code, 0);
    assert!(out.contains("SecrecyMaintained: defendant"), "{out}");
    assert!(out.contains("outcome: defendant"), "{out}");
    assert!(out.contains("SCQ1"), "{out}");
}

#[test]
fn analyze_json_is_the_core_report() {
    let (code, out, _) = cli(&["analyze", "restricted", "--json"]);
    assert_eq!(code, 0);
    let got: Value = serde_json::from_str(&out).unwrap();
    let want = serde_json::to_value(factor_forge::analysis::analyze(&trade_secrets(), "restricted").unwrap()).unwrap();
    assert_eq!(got, want);
}

#[test]
fn explain_shows_the_chain() {
    let (code, out, _) = cli(&["explain", "restricted", "issue(SecrecyMaintained,plaintiff)"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].contains("[IN] cite:bryce:SecrecyMaintained"), "{out}");
    assert!(out.contains("[OUT] dist:bryce:SecrecyMaintained:F10d"), "{out}");
    assert!(out.contains("[IN] down:bryce:SecrecyMaintained:F10d:F12p"), "{out}");
}

#[test]
fn explain_with_contrast() {
    let (code, out, _) = cli(&[
        "explain",
        "restricted",
        "issue(SecrecyMaintained,plaintiff)",
        "--contrast",
        "issue(SecrecyMaintained,defendant)",
        "--json",
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["fact"]["instance"], "cite:bryce:SecrecyMaintained");
    assert_eq!(v["foil"]["label"], "OUT");
    assert_eq!(v["divergent_issue"], "SecrecyMaintained");
}

#[test]
fn whatif_accepts_single_dash_set() {
    let (code, out, _) = cli(&["whatif", "leaky", "-set", "disclosures=90"]);
    assert_eq!(code, 0);
    assert!(out.contains("factor F10d: present -> absent"), "{out}");
    assert!(out.contains("issue SecrecyMaintained: defendant -> open"), "{out}");

    let (code, out, _) = cli(&["whatif", "waived", "--set", "F23d=force-absent", "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["changed_ascriptions"][0]["factor"], "F23d");

    let (code, out, _) = cli(&["whatif", "useful", "-set", "time-saved=27/2", "-set", "money-saved=3"]);
    assert_eq!(code, 0);
    assert!(out.contains("factor F8p: present -> absent"), "{out}");

    let (code, out, _) = cli(&["whatif", "leaky", "-set", "disclosures=150"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "no change for leaky");
}

#[test]
fn domain_errors_exit_with_one() {
    for args in [
        &["analyze", "nowhere"][..],
        &["whatif", "leaky", "-set", "disclosures=true"],
        &["whatif", "leaky", "-set", "colour=3"],
        &["explain", "restricted", "present(F99x)"],
        &["--kb", "/definitely/not/here.json", "analyze", "leaky"],
    ] {
        let (code, _, err) = cli(args);
        assert_eq!(code, 1, "{args:?}: {err}");
        assert!(err.starts_with("error: "), "{err}");
    }
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &[][..],
        &["frobnicate"],
        &["analyze"],
        &["whatif", "leaky"],
        &["whatif", "leaky", "-set", "no-equals-sign"],
        &["explain", "restricted", "not a literal"],
        &["kb", "fmt", "--check", "--write"],
        &["serve", "--port", "http"],
    ] {
        let (code, _, err) = cli(args);
        assert_eq!(code, 2, "{args:?}: {err}");
    }
}

#[test]
fn help_exits_cleanly() {
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, 0);
    for verb in ["analyze", "explain", "whatif", "serve", "kb"] {
        assert!(out.contains(verb), "{out}");
    }
}

#[test]
fn kb_validate_and_fmt() {
    let (code, out, _) = cli(&["kb", "validate"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "ok: 6 issues, 23 factors, 6 dimensions, 12 cases");

    let (code, out, _) = cli(&["kb", "fmt"]);
    assert_eq!(code, 0);
    assert_eq!(out, trade_secrets_source());
    assert_eq!(cli(&["kb", "fmt", "--check"]).0, 0);

    let squashed: Value = serde_json::from_str(trade_secrets_source()).unwrap();
    let path = scratch("fmt", &squashed.to_string());
    let file = path.to_str().unwrap();
    assert_eq!(cli(&["kb", "fmt", file, "--check"]).0, 1);
    assert_eq!(cli(&["kb", "fmt", file, "--write"]).0, 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), trade_secrets_source());
    assert_eq!(cli(&["kb", "fmt", "--check", file]).0, 0);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn kb_validate_reports_violations() {
    let mut kb = trade_secrets();
    kb.model.issues.get_mut("SecrecyMaintained").unwrap().defendant_factors.insert("F6p".into());
    kb.model.issues.get_mut("SecrecyMaintained").unwrap().plaintiff_factors.remove("F6p");
    let path = scratch("invalid", &serialize_kb(&kb));
    let (code, _, err) = cli(&["kb", "validate", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("F6p"), "{err}");

    let broken = scratch("syntax", "{\n  \"version\": }");
    let (code, _, err) = cli(&["kb", "validate", broken.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("line 2"), "{err}");
    std::fs::remove_file(path).unwrap();
    std::fs::remove_file(broken).unwrap();
}

#[test]
fn global_kb_flag_selects_the_file() {
    let mut kb = trade_secrets();
    kb.cases.get_mut("leaky").unwrap().title = "Renamed".into();
    let path = scratch("flag", &serialize_kb(&kb));
    let (code, out, _) = cli(&["analyze", "leaky", "--kb", path.to_str().unwrap(), "--json"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"case\": \"leaky\""));
    let (code, out, _) = cli(&["--kb", path.to_str().unwrap(), "kb", "fmt"]);
    assert_eq!(code, 0);
    assert!(out.contains("Renamed"));
    std::fs::remove_file(path).unwrap();
}
