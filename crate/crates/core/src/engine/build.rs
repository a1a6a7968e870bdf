//! Assembling every applicable scheme instance for one case.
//!
//! The graph is built stage by stage. Ascription arguments are labelled
//! first; the factors they establish feed the issue arguments, whose
//! labelling fixes the issue resolutions that the outcome argument uses.
//! Attacks only ever point within a stage or from an earlier stage into a
//! later one.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::graph::{ArgumentGraph, Label};
use crate::ascription::{
    ascribe_by_analogy, ascribe_ordinary, fit_tradeoff_line, switching_point_argument, trade_off_argument,
    AscriptionError,
};
use crate::domain::{CaseRecord, DimensionKind, FactorId, IssueId, Party, Resolution};
use crate::kb::KnowledgeBase;
use crate::outcome::{derive_outcome, objection_id, OutcomeArgument, OutcomeError};
use crate::resolution::{
    cite, counterexamples, distinguish, downplay, knockout_arguments, CitationArgument, ResolutionError,
};
use crate::scheme::{Attack, CqLabel, Grounds, InstanceId, Literal, Question, SchemeInstance, SchemeKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Ascription(#[from] AscriptionError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    Outcome(#[from] OutcomeError),
}

/// A hypothetical override of whether a factor is present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Forced {
    ForcePresent,
    ForceAbsent,
}

/// Everything derived for one case.
#[derive(Debug, Clone)]
pub struct BuiltCase {
    /// The case with the factors that survived ascription.
    pub case: CaseRecord,
    pub graph: ArgumentGraph,
    /// For each effective factor: `stipulated`, `forced`, or the ids of the
    /// ascription arguments that are not defeated.
    pub factor_sources: BTreeMap<FactorId, Vec<String>>,
    pub citations: Vec<CitationArgument>,
    pub resolutions: BTreeMap<IssueId, Resolution>,
    pub outcome: OutcomeArgument,
}

pub fn build_graph(kb: &KnowledgeBase, case: &CaseRecord) -> Result<ArgumentGraph, EngineError> {
    Ok(build_case(kb, case, &BTreeMap::new())?.graph)
}

/// An instance voicing a critical question that the knowledge base backs.
pub fn objection(target: &SchemeInstance, q: &Question) -> Option<SchemeInstance> {
    let grounds = q.grounds.as_ref()?;
    Some(
        SchemeInstance::new(
            objection_id(q.label, &target.id, grounds.key()).0,
            SchemeKind::Objection,
            Literal::Challenge { question: q.label, target: target.id.clone() },
        )
        .bind("question", q.label)
        .bind("target", &target.id)
        .bind("grounds", grounds)
        .premise(q.note.clone()),
    )
}

/// Turns the raised questions of `ids` into attacks, from an existing
/// counter-argument where the graph has one and from an objection otherwise.
fn attach_raised(g: &mut ArgumentGraph, ids: &[InstanceId]) {
    for id in ids {
        let Some(inst) = g.instance(id).cloned() else { continue };
        for q in inst.raised_questions() {
            let attackers: Vec<InstanceId> = match (q.label, q.grounds.as_ref()) {
                (CqLabel::MCQ3, Some(Grounds::Factor(other))) => {
                    let lit = Literal::FactorPresent { factor: other.clone() };
                    g.concluding(&lit)
                        .filter(|i| i.scheme == SchemeKind::OrdinaryMeaning)
                        .map(|i| i.id.clone())
                        .collect()
                }
                (CqLabel::SCQ3, Some(Grounds::Precedent(p2))) => {
                    let factor = inst.binding("factor").unwrap_or_default();
                    let cand = InstanceId::new(format!("sp:{p2}:{factor}"));
                    let contrary = inst.conclusion.contrary();
                    match g.instance(&cand) {
                        Some(c) if Some(&c.conclusion) == contrary.as_ref() => vec![cand],
                        _ => Vec::new(),
                    }
                }
                _ => Vec::new(),
            };
            if attackers.is_empty() {
                if let Some(obj) = objection(&inst, q) {
                    let from = obj.id.clone();
                    g.add(obj);
                    g.attack(Attack::new(&from, id, q.label));
                }
            } else {
                for a in attackers {
                    g.attack(Attack::new(&a, id, q.label));
                }
            }
        }
    }
}

fn ascription_instances(
    kb: &KnowledgeBase,
    case: &CaseRecord,
    precedents: &[&CaseRecord],
) -> Result<Vec<SchemeInstance>, EngineError> {
    let model = &kb.model;
    let mut out = Vec::new();
    for rule in model.meaning_rules.keys() {
        out.extend(ascribe_ordinary(model, case, rule)?);
    }
    for a in kb.analogy_assertions.values() {
        if a.precedent != case.id {
            out.extend(ascribe_by_analogy(a, case));
        }
    }
    for dim in model.dimensions.values() {
        match &dim.kind {
            DimensionKind::Scalar | DimensionKind::Boolean => {
                if !case.locations.contains_key(&dim.id) {
                    continue;
                }
                for region in &dim.factor_regions {
                    let f = model.factor(region.factor.as_str()).map_err(AscriptionError::from)?;
                    if f.origin.as_ref().is_none_or(|o| o.dimension != dim.id) {
                        continue;
                    }
                    for p in precedents {
                        if p.has_factor(&f.id) && p.locations.contains_key(&dim.id) {
                            out.push(switching_point_argument(model, case, p, &dim.id, &f.id, precedents)?);
                        }
                    }
                }
            }
            DimensionKind::Paired { axes } => {
                for region in &dim.factor_regions {
                    let Ok(line) = fit_tradeoff_line(precedents, &axes[0], &axes[1], &region.factor) else {
                        continue;
                    };
                    if line.evaluate_case(case).is_some() {
                        out.push(trade_off_argument(model, &line, case, precedents)?);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Builds the graph for `case`, with some factors forced present or absent.
/// Forcing a factor also drops the ascription arguments that contradict it.
pub fn build_case(
    kb: &KnowledgeBase,
    case: &CaseRecord,
    forced: &BTreeMap<FactorId, Forced>,
) -> Result<BuiltCase, EngineError> {
    let model = &kb.model;
    let precedents: Vec<&CaseRecord> = kb.precedents(&case.id).collect();
    let mut g = ArgumentGraph::new(case.id.clone());

    // Factor ascription.
    let mut asc = ascription_instances(kb, case, &precedents)?;
    asc.retain(|i| {
        !matches!(
            (&i.conclusion, i.conclusion.factor().and_then(|f| forced.get(f))),
            (Literal::FactorPresent { .. }, Some(Forced::ForceAbsent))
                | (Literal::FactorAbsent { .. }, Some(Forced::ForcePresent))
        )
    });
    let asc_ids: Vec<InstanceId> = asc.iter().map(|i| i.id.clone()).collect();
    for i in asc {
        g.add(i);
    }
    attach_raised(&mut g, &asc_ids);
    for x in &asc_ids {
        for y in &asc_ids {
            let (a, b) = (g.instance(x).unwrap(), g.instance(y).unwrap());
            let both_switching = a.scheme == SchemeKind::SwitchingPoint && b.scheme == SchemeKind::SwitchingPoint;
            if !both_switching && a.conclusion.contrary().as_ref() == Some(&b.conclusion) {
                g.attack(Attack::new(x, y, CqLabel::Rebuttal));
            }
        }
    }
    g.relabel();

    // Effective factors.
    let mut factors = case.factors.clone();
    let mut factor_sources: BTreeMap<FactorId, Vec<String>> =
        case.factors.iter().map(|f| (f.clone(), vec!["stipulated".to_string()])).collect();
    for (f, force) in forced {
        match force {
            Forced::ForcePresent => {
                factors.insert(f.clone());
                factor_sources.insert(f.clone(), vec!["forced".to_string()]);
            }
            Forced::ForceAbsent => {
                factors.remove(f);
                factor_sources.remove(f);
            }
        }
    }
    for id in &asc_ids {
        let inst = g.instance(id).unwrap();
        if let Literal::FactorPresent { factor } = &inst.conclusion {
            if g.label(id) != Some(Label::Out) {
                factors.insert(factor.clone());
                factor_sources.entry(factor.clone()).or_default().push(id.to_string());
            }
        }
    }
    let mut eff = case.clone();
    eff.factors = factors;

    // Issue resolution.
    let issue_ids: Vec<IssueId> = model.issues.values().filter(|i| i.has_factors()).map(|i| i.id.clone()).collect();
    let mut citations: Vec<CitationArgument> = Vec::new();
    for issue in &issue_ids {
        for p in &precedents {
            if p.resolution(issue).party().is_some() {
                citations.extend(cite(model, &eff, p, issue)?);
            }
        }
    }
    let mut extra: Vec<CitationArgument> = Vec::new();
    for c in &citations {
        for ce in counterexamples(model, c, &eff, &precedents)? {
            let id = ce.instance_id();
            if !citations.iter().chain(extra.iter()).any(|x| x.instance_id() == id) {
                extra.push(ce);
            }
        }
    }
    citations.extend(extra);
    for c in &citations {
        g.add(c.instance());
    }
    for c in &citations {
        let prec = kb.case(c.precedent.as_str()).expect("cited precedent is in the knowledge base");
        for d in distinguish(model, c, &eff, prec)? {
            g.add(d.instance());
            g.attack(Attack::new(&d.instance_id(), &c.instance_id(), CqLabel::CCQ2));
            for m in downplay(model, &d, &eff, prec)? {
                g.add(m.instance());
                g.attack(Attack::new(&m.instance_id(), &d.instance_id(), m.kind.question()));
            }
        }
    }
    for a in &citations {
        for b in &citations {
            if a.issue == b.issue && a.resolved_for != b.resolved_for {
                g.attack(Attack::new(&a.instance_id(), &b.instance_id(), CqLabel::CCQ1));
            }
        }
    }
    let mut knockouts: Vec<SchemeInstance> = Vec::new();
    for issue in &issue_ids {
        knockouts.extend(knockout_arguments(model, &eff, issue, &precedents)?);
    }
    let ko_ids: Vec<InstanceId> = knockouts.iter().map(|k| k.id.clone()).collect();
    for k in &knockouts {
        g.add(k.clone());
    }
    attach_raised(&mut g, &ko_ids);
    for k in &knockouts {
        let Literal::IssueFor { issue, party } = &k.conclusion else { continue };
        for c in &citations {
            if &c.issue == issue && c.resolved_for != *party {
                g.attack(Attack::new(&k.id, &c.instance_id(), CqLabel::CCQ4));
            }
        }
        for k2 in &knockouts {
            if k2.conclusion == (Literal::IssueFor { issue: issue.clone(), party: party.opposite() }) {
                g.attack(Attack::new(&k.id, &k2.id, CqLabel::Rebuttal));
            }
        }
    }
    for id in &asc_ids {
        let Some(Literal::FactorAbsent { factor }) = g.instance(id).map(|i| i.conclusion.clone()) else {
            continue;
        };
        for c in &citations {
            if c.shared_for(c.resolved_for).contains(&factor) {
                g.attack(Attack::new(id, &c.instance_id(), CqLabel::CCQ3));
            }
        }
        for k in &knockouts {
            if k.binding("factor") == Some(factor.as_str()) {
                g.attack(Attack::new(id, &k.id, CqLabel::KOCQ1));
            }
        }
    }
    g.relabel();

    let mut resolutions = BTreeMap::new();
    for issue in model.issues.values() {
        let r = if issue.has_factors() {
            [Party::Plaintiff, Party::Defendant]
                .into_iter()
                .find(|p| g.holds(&Literal::IssueFor { issue: issue.id.clone(), party: *p }))
                .map_or(Resolution::Open, Resolution::from)
        } else {
            case.resolution(&issue.id)
        };
        resolutions.insert(issue.id.clone(), r);
    }

    // Outcome.
    let outcome = derive_outcome(model, &resolutions)?;
    if let Some(inst) = outcome.instance() {
        let io = inst.id.clone();
        g.add(inst);
        attach_raised(&mut g, std::slice::from_ref(&io));
        for (issue, r) in &outcome.issues {
            let Some(p) = r.party() else { continue };
            let against = Literal::IssueFor { issue: issue.clone(), party: p.opposite() };
            let attackers: Vec<InstanceId> = g.concluding(&against).map(|i| i.id.clone()).collect();
            for a in attackers {
                g.attack(Attack::new(&a, &io, CqLabel::IOCQ3));
            }
        }
        g.relabel();
    }

    Ok(BuiltCase { case: eff, graph: g, factor_sources, citations, resolutions, outcome })
}
