use factor_forge::ascription::{
    adjust_line, ascribe_by_analogy, ascribe_ordinary, fit_tradeoff_line, switching_point_argument, trade_off_argument,
    AnalogyAssertion, AscriptionError, LineAdjustment, LineModel,
};
use factor_forge::engine::build_case;
use factor_forge::kb::trade_secrets;
use factor_forge::{CaseRecord, CqLabel, Literal, Location, Magnitude, Resolution};
use proptest::prelude::*;
use std::collections::BTreeMap;

fn with_facts(facts: &[&str]) -> CaseRecord {
    CaseRecord::new("probe").with_facts(facts.iter().copied())
}

fn at(id: &str, x: Magnitude, y: Magnitude) -> CaseRecord {
    CaseRecord::new(id)
        .with_location("money-saved", Location::Scalar(x))
        .with_location("time-saved", Location::Scalar(y))
}

fn cases_with_f8p(points: &[(i64, i64)]) -> Vec<CaseRecord> {
    points
        .iter()
        .enumerate()
        .map(|(k, (x, y))| at(&format!("p{k}"), (*x).into(), (*y).into()).with_factors(["F8p"]))
        .collect()
}

fn fit(cases: &[CaseRecord]) -> Result<LineModel, AscriptionError> {
    let refs: Vec<&CaseRecord> = cases.iter().collect();
    fit_tradeoff_line(&refs, &"money-saved".into(), &"time-saved".into(), &"F8p".into())
}

#[test]
fn nda_is_ordinarily_an_agreement_not_to_disclose() {
    let kb = trade_secrets();
    let inst =
        ascribe_ordinary(&kb.model, &with_facts(&["signed-nda", "nda-covers-info"]), &"nda".into()).unwrap().unwrap();
    assert_eq!(inst.conclusion, Literal::present("F4p"));
    assert!(inst.has_open(CqLabel::MCQ1));
    assert!(!inst.has_raised(CqLabel::MCQ2));
    assert!(ascribe_ordinary(&kb.model, &with_facts(&["signed-nda"]), &"nda".into()).unwrap().is_none());
}

#[test]
fn false_pretences_raise_the_exception_question() {
    let kb = trade_secrets();
    let case = with_facts(&["disclosed-in-negotiations", "false-pretences"]);
    let inst = ascribe_ordinary(&kb.model, &case, &"negotiation-disclosure".into()).unwrap().unwrap();
    assert_eq!(inst.conclusion, Literal::present("F1d"));
    assert!(inst.has_raised(CqLabel::MCQ2));

    let mut kb = kb;
    kb.cases.insert("probe".into(), case.clone());
    let built = build_case(&kb, &case, &BTreeMap::new()).unwrap();
    let attack = built.graph.attacks().iter().find(|a| a.to == inst.id).expect("MCQ2 attack");
    assert_eq!(attack.cq, CqLabel::MCQ2);
    assert!(!built.case.has_factor(&"F1d".into()));
}

#[test]
fn restricted_materials_undercut_reverse_engineering() {
    let kb = trade_secrets();
    let case = with_facts(&["used-restricted-materials", "examined-public-product"]);
    let f25 = ascribe_ordinary(&kb.model, &case, &"reverse-engineering".into()).unwrap().unwrap();
    assert!(f25.has_raised(CqLabel::MCQ3));

    let built = build_case(&kb, &case, &BTreeMap::new()).unwrap();
    let a = built
        .graph
        .attacks()
        .iter()
        .find(|a| a.to == f25.id && a.cq == CqLabel::MCQ3)
        .expect("MCQ3 attack on the F25d argument");
    assert_eq!(a.from.as_str(), "om:restricted-materials");

    // Without the competing facts the question never arises.
    let alone = ascribe_ordinary(&kb.model, &with_facts(&["examined-public-product"]), &"reverse-engineering".into())
        .unwrap()
        .unwrap();
    assert!(!alone.has_raised(CqLabel::MCQ3));
}

#[test]
fn unknown_meaning_rule_is_an_error() {
    let kb = trade_secrets();
    let err = ascribe_ordinary(&kb.model, &with_facts(&[]), &"nothing".into()).unwrap_err();
    assert!(matches!(err, AscriptionError::UnknownRule(_)));
}

#[test]
fn subcontractor_employee_knew_information_was_confidential() {
    let kb = trade_secrets();
    let assertion = &kb.analogy_assertions["subcontractor-employee"];
    let case = kb.case("subcontract").unwrap();
    let inst = ascribe_by_analogy(assertion, case).unwrap();
    assert_eq!(inst.conclusion, Literal::present("F21p"));
    assert!(inst.has_open(CqLabel::ACQ1) && inst.has_open(CqLabel::ACQ2));
    assert!(!inst.has_raised(CqLabel::ACQ3));

    assert!(ascribe_by_analogy(assertion, &with_facts(&["employee-of-plaintiff"])).is_none());

    let countered = AnalogyAssertion { counter_precedent: Some("fixed-term".into()), ..assertion.clone() };
    assert!(ascribe_by_analogy(&countered, case).unwrap().has_raised(CqLabel::ACQ3));
}

#[test]
fn counter_precedent_attacks_the_analogy() {
    let mut kb = trade_secrets();
    kb.cases.insert(
        "fixed-term".into(),
        CaseRecord::new("fixed-term")
            .with_facts(["employee-of-subcontractor"])
            .with_resolution("ConfidentialRelationship", Resolution::Defendant),
    );
    kb.analogy_assertions.get_mut("subcontractor-employee").unwrap().counter_precedent = Some("fixed-term".into());
    let built = build_case(&kb, kb.case("subcontract").unwrap(), &BTreeMap::new()).unwrap();
    let target = "an:subcontractor-employee".into();
    assert!(built.graph.attackers_of(&target).any(|a| a.cq == CqLabel::ACQ3));
}

#[test]
fn disclosures_beyond_the_precedent_count_as_disclosed() {
    let kb = trade_secrets();
    let nr = kb.case("national-rejectors").unwrap();
    let leaky = kb.case("leaky").unwrap();
    let inst = switching_point_argument(&kb.model, leaky, nr, &"disclosures".into(), &"F10d".into(), &[]).unwrap();
    assert_eq!(inst.conclusion, Literal::present("F10d"));
    // F27d lies further along the same dimension.
    assert!(inst.has_open(CqLabel::SCQ1));
    assert!(!inst.has_open(CqLabel::SCQ2));

    let less = kb.case("less-leaky").unwrap();
    let inst = switching_point_argument(&kb.model, less, nr, &"disclosures".into(), &"F10d".into(), &[]).unwrap();
    assert_eq!(inst.conclusion, Literal::absent("F10d"));
    assert!(inst.has_open(CqLabel::SCQ2));
}

#[test]
fn switching_point_needs_locations_and_origin() {
    let kb = trade_secrets();
    let nr = kb.case("national-rejectors").unwrap();
    let nowhere = CaseRecord::new("nowhere");
    let err =
        switching_point_argument(&kb.model, &nowhere, nr, &"disclosures".into(), &"F10d".into(), &[]).unwrap_err();
    assert!(matches!(err, AscriptionError::MissingLocation { .. }));
    let leaky = kb.case("leaky").unwrap();
    let err = switching_point_argument(&kb.model, leaky, nr, &"disclosures".into(), &"F6p".into(), &[]).unwrap_err();
    assert!(matches!(err, AscriptionError::NotDimensionDerived { .. }));
}

#[test]
fn opposing_precedent_on_the_dimension_raises_scq3() {
    let kb = trade_secrets();
    let nr = kb.case("national-rejectors").unwrap();
    let leaky = kb.case("leaky").unwrap();
    let tolerant = CaseRecord::new("tolerant")
        .with_location("disclosures", Location::Scalar(200.into()))
        .with_resolution("SecrecyMaintained", Resolution::Plaintiff);
    let inst =
        switching_point_argument(&kb.model, leaky, nr, &"disclosures".into(), &"F10d".into(), &[&tolerant]).unwrap();
    assert!(inst.has_raised(CqLabel::SCQ3));
}

#[test]
fn example_line_and_its_adjustments() {
    let kb = trade_secrets();
    let line = fit(&cases_with_f8p(&[(5, 8), (1, 24)])).unwrap();
    assert_eq!(line.to_string(), "4*money-saved + 1*time-saved - 28 >= 0");

    let on_line = at("edge", 3.into(), 16.into());
    let inst = trade_off_argument(&kb.model, &line, &on_line, &[]).unwrap();
    assert_eq!(inst.conclusion, Literal::present("F8p"));

    let useless = kb.case("useless").unwrap();
    let blocker =
        at("blocker", 3.into(), Magnitude::ratio(29, 2)).with_resolution("InfoValuable", Resolution::Defendant);
    match adjust_line(&kb.model, &line, useless, &[&blocker]).unwrap() {
        LineAdjustment::Refused { blocking, value } => {
            assert_eq!(blocking.as_str(), "blocker");
            assert_eq!(value, Magnitude::ratio(1, 2));
        }
        other => panic!("expected refusal, got {other:?}"),
    }

    let useful = kb.case("useful").unwrap();
    assert_eq!(adjust_line(&kb.model, &line, useful, &[]).unwrap(), LineAdjustment::Adjusted { line: line.clone() });
}

#[test]
fn trade_off_questions() {
    let kb = trade_secrets();
    let prec: Vec<&CaseRecord> = kb.precedents(&"useful".into()).collect();
    let line = fit(&cases_with_f8p(&[(5, 8), (1, 24)])).unwrap();
    let useful = trade_off_argument(&kb.model, &line, kb.case("useful").unwrap(), &prec).unwrap();
    // Useless is an opposite-outcome precedent, so the line may be too loose.
    assert!(useful.has_open(CqLabel::TCQ2));
    assert!(!useful.has_raised(CqLabel::TCQ1));

    let misfit = at("misfit", 0.into(), 0.into()).with_factors(["F8p"]);
    let with_misfit = [&misfit];
    let inst = trade_off_argument(&kb.model, &line, kb.case("useful").unwrap(), &with_misfit).unwrap();
    assert!(inst.has_raised(CqLabel::TCQ1));
}

/// Every line through two of the points with all points on or above it.
fn brute_force_support_lines(points: &[(i64, i64)]) -> Vec<(Magnitude, Magnitude, Magnitude)> {
    let mut out = Vec::new();
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            if p == q {
                continue;
            }
            // (y - py)(qx - px) >= (x - px)(qy - py), oriented so b >= 0.
            let (mut a, mut b) = (p.1 - q.1, q.0 - p.0);
            if b < 0 || (b == 0 && a < 0) {
                a = -a;
                b = -b;
            }
            let c = -(a * p.0 + b * p.1);
            if points.iter().all(|r| a * r.0 + b * r.1 + c >= 0) {
                let norm = if b != 0 { b } else { a };
                out.push((Magnitude::ratio(a, norm), Magnitude::ratio(b, norm), Magnitude::ratio(c, norm)));
            }
        }
    }
    out
}

proptest! {
    #[test]
    fn fitted_line_is_a_supporting_line(points in proptest::collection::vec((0i64..30, 0i64..30), 2..=6)) {
        let distinct: std::collections::BTreeSet<_> = points.iter().collect();
        prop_assume!(distinct.len() >= 2);
        let line = fit(&cases_with_f8p(&points)).unwrap();
        let values: Vec<Magnitude> = points
            .iter()
            .map(|(x, y)| line.evaluate(&(*x).into(), &(*y).into()))
            .collect();
        prop_assert!(values.iter().all(|v| !v.is_negative()));
        prop_assert!(values.iter().filter(|v| v.is_zero()).count() >= 2);
        let candidates = brute_force_support_lines(&points);
        prop_assert!(candidates.contains(&(line.a.clone(), line.b.clone(), line.c.clone())),
            "{line} not among {candidates:?}");
    }

    #[test]
    fn two_points_give_the_line_through_both(x1 in 0i64..40, y1 in 0i64..40, x2 in 0i64..40, y2 in 0i64..40) {
        prop_assume!((x1, y1) != (x2, y2));
        let line = fit(&cases_with_f8p(&[(x1, y1), (x2, y2)])).unwrap();
        prop_assert!(line.evaluate(&x1.into(), &y1.into()).is_zero());
        prop_assert!(line.evaluate(&x2.into(), &y2.into()).is_zero());
        if x1 == x2 {
            prop_assert_eq!(line.a, Magnitude::one());
        } else {
            prop_assert_eq!(line.b, Magnitude::one());
        }
    }

    #[test]
    fn scaling_the_line_keeps_the_conclusion(k in 1i64..50, x in 0i64..10, y in 0i64..40) {
        let kb = trade_secrets();
        let line = fit(&cases_with_f8p(&[(5, 8), (1, 24)])).unwrap();
        let scaled = LineModel {
            a: &line.a * &Magnitude::from(k),
            b: &line.b * &Magnitude::from(k),
            c: &line.c * &Magnitude::from(k),
            ..line.clone()
        };
        let case = at("probe", x.into(), y.into());
        let one = trade_off_argument(&kb.model, &line, &case, &[]).unwrap();
        let two = trade_off_argument(&kb.model, &scaled, &case, &[]).unwrap();
        prop_assert_eq!(one.conclusion, two.conclusion);
    }

    #[test]
    fn switching_point_is_monotone(x in 0i64..300, dx in 0i64..300) {
        let kb = trade_secrets();
        let nr = kb.case("national-rejectors").unwrap();
        let here = CaseRecord::new("here").with_location("disclosures", Location::Scalar(x.into()));
        let further = CaseRecord::new("further").with_location("disclosures", Location::Scalar((x + dx).into()));
        let a = switching_point_argument(&kb.model, &here, nr, &"disclosures".into(), &"F10d".into(), &[]).unwrap();
        let b = switching_point_argument(&kb.model, &further, nr, &"disclosures".into(), &"F10d".into(), &[]).unwrap();
        if a.conclusion == Literal::present("F10d") {
            prop_assert_eq!(b.conclusion, Literal::present("F10d"));
        }
    }

    #[test]
    fn extra_facts_never_retract_ordinary_meaning(extra in proptest::collection::btree_set("[a-z]{1,8}", 0..5)) {
        let kb = trade_secrets();
        let base = with_facts(&["signed-nda", "nda-covers-info"]);
        let mut more = base.clone();
        more.facts.extend(extra.into_iter().map(Into::into));
        for rule in kb.model.meaning_rules.keys() {
            let before = ascribe_ordinary(&kb.model, &base, rule).unwrap();
            let after = ascribe_ordinary(&kb.model, &more, rule).unwrap();
            if let Some(b) = before {
                prop_assert_eq!(Some(b.conclusion), after.map(|a| a.conclusion));
            }
        }
    }
}
