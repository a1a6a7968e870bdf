mod common;

use std::collections::BTreeMap;

use factor_forge::engine::{build_case, explain, explain_contrast, grounded, ArgumentGraph, ExplainError, Label};
use factor_forge::kb::{trade_secrets, KnowledgeBase};
use factor_forge::{AttackKind, CaseRecord, CqLabel, Literal, Party, SchemeKind};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;

fn built(kb: &KnowledgeBase, case: &str) -> ArgumentGraph {
    build_case(kb, kb.case(case).unwrap(), &BTreeMap::new()).unwrap().graph
}

/// Every stored case plus a few constructed ones.
fn all_graphs() -> Vec<ArgumentGraph> {
    let mut kb = trade_secrets();
    for (id, fs) in [("mixed", &["F8p", "F10d"][..]), ("busy", &["F4p", "F6p", "F10d", "F12p", "F21p", "F23d"][..])] {
        kb.cases.insert(id.into(), CaseRecord::new(id).with_factors(fs.iter().copied()));
    }
    kb.cases.keys().map(|c| built(&kb, c.as_str())).collect()
}

#[test]
fn empty_case_has_an_empty_graph() {
    let mut kb = trade_secrets();
    kb.cases.insert("blank".into(), CaseRecord::new("blank"));
    assert!(built(&kb, "blank").is_empty());
}

#[test]
fn small_graphs() {
    let l = grounded(["a"], Vec::<(&str, &str)>::new());
    assert_eq!(l["a"], Label::In);
    let l = grounded(["a", "b"], [("a", "b")]);
    assert_eq!((l["a"], l["b"]), (Label::In, Label::Out));
    let l = grounded(["a", "b"], [("a", "b"), ("b", "a")]);
    assert_eq!((l["a"], l["b"]), (Label::Undec, Label::Undec));
}

#[test]
fn labelling_is_grounded_in_every_corpus_graph() {
    for g in all_graphs() {
        for inst in g.instances() {
            let label = g.label(&inst.id).unwrap();
            let att: Vec<Label> = g.attackers_of(&inst.id).map(|a| g.label(&a.from).unwrap()).collect();
            match label {
                Label::In => assert!(att.iter().all(|l| *l == Label::Out), "{}", inst.id),
                Label::Out => assert!(att.contains(&Label::In), "{}", inst.id),
                Label::Undec => {
                    assert!(!att.contains(&Label::In) && !att.iter().all(|l| *l == Label::Out), "{}", inst.id)
                }
            }
        }
    }
}

#[test]
fn attacks_respect_target_schemes() {
    for g in all_graphs() {
        for a in g.attacks() {
            let target = g.instance(&a.to).unwrap();
            assert!(target.scheme.admits(a.cq), "{} on {} ({:?})", a.cq, a.to, target.scheme);
            if target.scheme.is_strict() {
                assert_ne!(a.kind, AttackKind::Rebut, "strict {} rebutted by {}", a.to, a.from);
            }
            assert_eq!(a.kind, a.cq.attack_kind());
        }
    }
}

#[test]
fn unchallenged_citation_is_in() {
    let kb = trade_secrets();
    for g in all_graphs() {
        for inst in g.instances().filter(|i| i.scheme == SchemeKind::Citation) {
            if g.attackers_of(&inst.id).next().is_none() {
                assert_eq!(g.label(&inst.id), Some(Label::In), "{}", inst.id);
            }
        }
    }
    let g = built(&kb, "subcontract");
    assert_eq!(g.label(&"cite:space-aero:ConfidentialRelationship".into()), Some(Label::In));
}

#[test]
fn labelling_ignores_insertion_order() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for g in all_graphs() {
        let mut insts: Vec<_> = g.instances().cloned().collect();
        let mut attacks = g.attacks().to_vec();
        insts.shuffle(&mut rng);
        attacks.shuffle(&mut rng);
        let mut h = ArgumentGraph::new(g.case.clone());
        insts.into_iter().for_each(|i| {
            h.add(i);
        });
        attacks.into_iter().for_each(|a| {
            h.attack(a);
        });
        h.relabel();
        assert_eq!(g.labelling(), h.labelling());
    }
}

#[test]
fn restricted_chain() {
    let kb = trade_secrets();
    let g = built(&kb, "restricted");
    let tree = explain(&g, &Literal::issue("SecrecyMaintained", Party::Plaintiff)).unwrap();
    assert_eq!(tree.instance.as_str(), "cite:bryce:SecrecyMaintained");
    assert_eq!(tree.label, Label::In);
    let dist = tree
        .attackers
        .iter()
        .find(|a| a.by.instance.as_str() == "dist:bryce:SecrecyMaintained:F10d")
        .expect("distinction shown");
    assert_eq!(dist.cq, CqLabel::CCQ2);
    assert_eq!(dist.by.label, Label::Out);
    let down = &dist.by.attackers;
    assert_eq!(down.len(), 1);
    assert_eq!(down[0].by.instance.as_str(), "down:bryce:SecrecyMaintained:F10d:F12p");
    assert_eq!(down[0].by.label, Label::In);

    // The defeated counter-citation is explained by what defeats it.
    let nr = explain(&g, &Literal::issue("SecrecyMaintained", Party::Defendant)).unwrap();
    assert_eq!(nr.label, Label::Out);
    assert!(!nr.attackers.is_empty());
    assert!(nr.attackers.iter().all(|a| a.by.label == Label::In));

    let err = explain(&g, &Literal::present("F99x")).unwrap_err();
    assert!(matches!(err, ExplainError::ClaimNotInGraph(_)));
}

#[test]
fn contrast_finds_the_divergent_issue() {
    let mut kb = trade_secrets();
    kb.cases.insert("mixed".into(), CaseRecord::new("mixed").with_factors(["F8p", "F10d"]));
    let g = built(&kb, "mixed");
    let c = explain_contrast(&g, &Literal::outcome(Party::Defendant), &Literal::outcome(Party::Plaintiff)).unwrap();
    assert_eq!(c.fact.label, Label::In);
    assert!(c.foil.is_none());
    assert!(c.why_not.is_some());
    assert_eq!(c.divergent_issue.unwrap().as_str(), "SecrecyMaintained");

    let g = built(&kb, "restricted");
    let c = explain_contrast(
        &g,
        &Literal::issue("SecrecyMaintained", Party::Plaintiff),
        &Literal::issue("SecrecyMaintained", Party::Defendant),
    )
    .unwrap();
    assert!(c.foil.is_some());
    assert_eq!(c.divergent_issue.unwrap().as_str(), "SecrecyMaintained");
}

fn mirror_kb(kb: &KnowledgeBase) -> KnowledgeBase {
    let mut m = kb.clone();
    for issue in m.model.issues.values_mut() {
        std::mem::swap(&mut issue.plaintiff_factors, &mut issue.defendant_factors);
    }
    for f in m.model.factors.values_mut() {
        f.polarity = f.polarity.opposite();
    }
    for d in m.model.dimensions.values_mut() {
        d.high_end_favors = d.high_end_favors.opposite();
    }
    let rm = &mut m.model.rule_model;
    rm.outcome = rm.outcome.opposite();
    for r in &mut rm.rules {
        if let factor_forge::domain::RuleHead::Outcome(p) = &mut r.conclusion {
            *p = p.opposite();
        }
    }
    for c in m.cases.values_mut() {
        for r in c.issue_resolutions.values_mut() {
            *r = r.mirrored();
        }
        c.outcome = c.outcome.mirrored();
    }
    m
}

#[test]
fn mirrored_casebase_gives_a_mirrored_graph() {
    let kb = trade_secrets();
    let mk = mirror_kb(&kb);
    for case in kb.cases.keys() {
        let g = built(&kb, case.as_str());
        let h = built(&mk, case.as_str());
        let nodes = |g: &ArgumentGraph, mirror: bool| -> Vec<(String, SchemeKind, Literal, Label)> {
            g.instances()
                .map(|i| {
                    let lit = if mirror { i.conclusion.mirrored() } else { i.conclusion.clone() };
                    (i.id.to_string(), i.scheme, lit, g.label(&i.id).unwrap())
                })
                .collect()
        };
        assert_eq!(nodes(&g, false), nodes(&h, true), "{case}");
        assert_eq!(g.attacks(), h.attacks(), "{case}");
    }
}

proptest! {
    #[test]
    fn grounded_matches_the_oracle(n in 1usize..=8, edges in proptest::collection::vec((0usize..8, 0usize..8), 0..32)) {
        let edges: Vec<(usize, usize)> = edges.into_iter().filter(|(a, b)| *a < n && *b < n).collect();
        let got = grounded(0..n, edges.iter().copied());
        prop_assert_eq!(got, common::grounded_oracle(n, &edges));
    }
}
