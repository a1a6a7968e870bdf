mod common;

use factor_forge::domain::{validate_domain, ViolationKind};
use factor_forge::kb::{trade_secrets, trade_secrets_source, KnowledgeBase};
use factor_forge::{parse_kb, serialize_kb, CaseRecord, KbError, Party};

fn doc(kb: &KnowledgeBase) -> serde_json::Value {
    serde_json::from_str(&serialize_kb(kb)).unwrap()
}

#[test]
fn shipped_corpus() {
    let kb = trade_secrets();
    assert!(kb.validate().is_empty(), "{:?}", kb.validate());
    assert_eq!(kb.model.rule_model.leaves().len(), 5);
    let precedents: Vec<&str> = kb.precedents(&"none".into()).map(|c| c.id.as_str()).collect();
    assert_eq!(precedents, ["bryce", "national-rejectors", "space-aero", "slow", "fast", "useless"]);
    let knockouts: Vec<&str> = kb.model.factors.values().filter(|f| f.knockout).map(|f| f.id.as_str()).collect();
    assert_eq!(knockouts, ["F23d"]);
}

#[test]
fn issue_factor_memberships() {
    let kb = trade_secrets();
    let mut listed = std::collections::BTreeSet::new();
    for (issue, p, d) in common::ISSUE_FACTORS {
        for f in p.iter().chain(d.iter()) {
            listed.insert(*f);
            let fac = &kb.model.factors[*f];
            let side = if p.contains(f) { Party::Plaintiff } else { Party::Defendant };
            assert_eq!(fac.polarity, side, "{f}");
            let issues: Vec<&str> = kb.model.issues_of(&fac.id).map(|i| i.id.as_str()).collect();
            assert!(issues.contains(&issue), "{f} not under {issue}");
        }
    }
    let every: std::collections::BTreeSet<&str> = kb.model.factors.keys().map(|f| f.as_str()).collect();
    assert_eq!(every, listed);
    for shared in ["F4p", "F7p", "F8p", "F14p", "F17d", "F25d"] {
        assert!(kb.model.issues_of(&shared.into()).count() > 1, "{shared}");
    }
}

#[test]
fn validation_is_idempotent() {
    let kb = trade_secrets();
    assert_eq!(validate_domain(&kb.model), validate_domain(&kb.model));
}

#[test]
fn polarity_mismatch_is_reported() {
    let mut kb = trade_secrets();
    kb.model.issues.get_mut("SecrecyMaintained").unwrap().defendant_factors.insert("F6p".into());
    kb.model.issues.get_mut("SecrecyMaintained").unwrap().plaintiff_factors.remove("F6p");
    let v = validate_domain(&kb.model);
    assert_eq!(v.len(), 1, "{v:?}");
    assert_eq!(v[0].kind, ViolationKind::PolarityMismatch);
}

#[test]
fn dangling_issue_is_reported() {
    let mut kb = trade_secrets();
    kb.model.factors.get_mut("F23d").unwrap().issue = "NoSuchIssue".into();
    let v = validate_domain(&kb.model);
    assert_eq!(v.len(), 1, "{v:?}");
    assert_eq!(v[0].kind, ViolationKind::DanglingReference);
    assert!(v[0].to_string().contains("NoSuchIssue"));
}

#[test]
fn unknown_factor_in_a_case_is_named() {
    let mut kb = trade_secrets();
    kb.cases.insert("bad".into(), CaseRecord::new("bad").with_factors(["F99x"]));
    match parse_kb(&serialize_kb(&kb)) {
        Err(KbError::DanglingReference { missing, .. }) => assert!(missing.contains("F99x"), "{missing}"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn syntax_errors_carry_positions() {
    assert!(matches!(parse_kb(""), Err(KbError::Syntax { offset: 0, .. })));
    let text = "{\n  \"version\": }";
    match parse_kb(text) {
        Err(KbError::Syntax { line, offset, .. }) => {
            assert_eq!(line, 2);
            assert_eq!(&text[offset..offset + 1], "}");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let mut d = doc(&trade_secrets());
    d["extra"] = serde_json::json!(1);
    assert!(matches!(parse_kb(&d.to_string()), Err(KbError::Shape { .. })));
}

#[test]
fn duplicate_factor_is_rejected() {
    let mut d = doc(&trade_secrets());
    let first = d["factors"][0].clone();
    d["factors"].as_array_mut().unwrap().push(first);
    assert!(matches!(parse_kb(&d.to_string()), Err(KbError::DuplicateId { kind: "factor", .. })));
}

#[test]
fn corpus_is_in_canonical_form() {
    let text = trade_secrets_source();
    let kb = parse_kb(text).unwrap();
    assert_eq!(serialize_kb(&kb), text);
}

#[test]
fn single_bare_case_round_trips() {
    let mut kb = trade_secrets();
    kb.cases.clear();
    kb.analogy_assertions.clear();
    kb.cases.insert("only".into(), CaseRecord::new("only"));
    assert_eq!(parse_kb(&serialize_kb(&kb)).unwrap(), kb);
}

#[test]
fn unicode_titles_serialize_identically_twice() {
    let mut kb = trade_secrets();
    kb.cases.get_mut("bryce").unwrap().title = "Brÿce & Associés v. Gladstöne «Wis.» 東京".into();
    let once = serialize_kb(&kb);
    let back = parse_kb(&once).unwrap();
    assert_eq!(back, kb);
    assert_eq!(serialize_kb(&back), once);
}

#[test]
fn parsing_is_deterministic() {
    let text = trade_secrets_source();
    assert_eq!(parse_kb(text).unwrap(), parse_kb(text).unwrap());
}
