//! Case reports and what-if probes built on the argument graph.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::domain::{
    CaseId, CaseRecord, DimensionKind, FactorId, IssueId, Location, Outcome, Party, Resolution, Violation,
};
use crate::engine::{build_case, BuiltCase, EngineError, Forced, Label};
use crate::kb::KnowledgeBase;
use crate::outcome::OutcomeArgument;
use crate::scheme::{CqLabel, InstanceId, SchemeKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("unknown case {0}")]
    UnknownCase(String),
    #[error("knowledge base has {} violation(s)", .0.len())]
    InvalidKb(Vec<Violation>),
    #[error("override key {0} names neither a dimension nor a factor")]
    UnknownOverride(String),
    #[error("override for {key}: expected {expected}, got {got}")]
    OverrideType { key: String, expected: String, got: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorReport {
    pub factor: FactorId,
    pub label: String,
    pub polarity: Party,
    /// `stipulated`, `forced`, or ids of the ascription arguments that hold.
    pub sources: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgumentSummary {
    pub instance: InstanceId,
    pub scheme: SchemeKind,
    pub conclusion: String,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssueReport {
    pub issue: IssueId,
    pub resolution: Resolution,
    pub arguments: Vec<ArgumentSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeReport {
    pub conclusion: Outcome,
    pub argument: OutcomeArgument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenQuestion {
    pub instance: InstanceId,
    pub question: CqLabel,
    pub note: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<FactorId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub issue: Option<IssueId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub case: CaseId,
    pub factors: Vec<FactorReport>,
    /// Ascription arguments, whatever their label.
    pub ascriptions: Vec<ArgumentSummary>,
    pub issues: Vec<IssueReport>,
    pub outcome: OutcomeReport,
    pub open_questions: Vec<OpenQuestion>,
}

fn summary(built: &BuiltCase, id: &InstanceId) -> ArgumentSummary {
    let inst = built.graph.instance(id).expect("summarised instance exists");
    ArgumentSummary {
        instance: id.clone(),
        scheme: inst.scheme,
        conclusion: inst.conclusion.to_string(),
        label: built.graph.label(id).unwrap_or(Label::Undec),
    }
}

pub fn report(kb: &KnowledgeBase, built: &BuiltCase) -> AnalysisReport {
    let model = &kb.model;
    let g = &built.graph;
    let factors = built
        .factor_sources
        .iter()
        .map(|(f, sources)| {
            let fac = model.factors.get(f);
            FactorReport {
                factor: f.clone(),
                label: fac.map(|x| x.label.clone()).unwrap_or_default(),
                polarity: fac.map_or(Party::Plaintiff, |x| x.polarity),
                sources: sources.clone(),
            }
        })
        .collect();
    let ascriptions = g.instances().filter(|i| i.scheme.is_ascription()).map(|i| summary(built, &i.id)).collect();
    let issues = model
        .issues
        .values()
        .map(|iss| IssueReport {
            issue: iss.id.clone(),
            resolution: built.resolutions.get(&iss.id).copied().unwrap_or_default(),
            arguments: g
                .instances()
                .filter(|i| i.binding("issue") == Some(iss.id.as_str()))
                .map(|i| summary(built, &i.id))
                .collect(),
        })
        .collect();
    let io = built.outcome.instance_id();
    let outcome =
        OutcomeReport { conclusion: built.outcome.conclusion, argument: built.outcome.clone(), label: g.label(&io) };
    let open_questions = g
        .instances()
        .flat_map(|i| {
            i.open_questions().map(move |q| OpenQuestion {
                instance: i.id.clone(),
                question: q.label,
                note: q.note.clone(),
                factor: q.factor.clone(),
                issue: q.issue.clone(),
            })
        })
        .collect();
    AnalysisReport { case: built.case.id.clone(), factors, ascriptions, issues, outcome, open_questions }
}

fn lookup<'a>(kb: &'a KnowledgeBase, case: &str) -> Result<&'a CaseRecord, AnalysisError> {
    let violations = kb.validate();
    if !violations.is_empty() {
        return Err(AnalysisError::InvalidKb(violations));
    }
    kb.case(case).ok_or_else(|| AnalysisError::UnknownCase(case.to_string()))
}

pub fn analyze(kb: &KnowledgeBase, case: &str) -> Result<AnalysisReport, AnalysisError> {
    let record = lookup(kb, case)?;
    let built = build_case(kb, record, &BTreeMap::new())?;
    Ok(report(kb, &built))
}

/// A value substituted for a dimension location, or a forced factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Override {
    Factor(Forced),
    Location(Location),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhatIfRequest {
    pub case: CaseId,
    #[serde(default)]
    pub overrides: BTreeMap<String, Override>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorChange {
    pub factor: FactorId,
    pub before: bool,
    pub after: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssueChange {
    pub issue: IssueId,
    pub before: Resolution,
    pub after: Resolution,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeChange {
    pub before: Outcome,
    pub after: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhatIfDiff {
    pub case: CaseId,
    pub changed_ascriptions: Vec<FactorChange>,
    pub changed_issues: Vec<IssueChange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub changed_outcome: Option<OutcomeChange>,
}

impl WhatIfDiff {
    pub fn is_empty(&self) -> bool {
        self.changed_ascriptions.is_empty() && self.changed_issues.is_empty() && self.changed_outcome.is_none()
    }
}

/// Applies the overrides to a copy of the case. Returns the modified case
/// and the forced factors.
pub fn apply_overrides(
    kb: &KnowledgeBase,
    case: &CaseRecord,
    overrides: &BTreeMap<String, Override>,
) -> Result<(CaseRecord, BTreeMap<FactorId, Forced>), AnalysisError> {
    let mut copy = case.clone();
    let mut forced = BTreeMap::new();
    for (key, value) in overrides {
        if let Some(dim) = kb.model.dimensions.get(key.as_str()) {
            let expected = match dim.kind {
                DimensionKind::Boolean => "boolean",
                DimensionKind::Scalar => "scalar",
                DimensionKind::Paired { .. } => "pair",
            };
            match value {
                Override::Location(loc) if loc.fits(&dim.kind) => {
                    copy.locations.insert(dim.id.clone(), loc.clone());
                }
                Override::Location(loc) => {
                    return Err(AnalysisError::OverrideType {
                        key: key.clone(),
                        expected: expected.into(),
                        got: loc.kind_name().into(),
                    })
                }
                Override::Factor(_) => {
                    return Err(AnalysisError::OverrideType {
                        key: key.clone(),
                        expected: expected.into(),
                        got: "factor override".into(),
                    })
                }
            }
        } else if let Some(f) = kb.model.factors.get(key.as_str()) {
            match value {
                Override::Factor(force) => {
                    forced.insert(f.id.clone(), *force);
                }
                Override::Location(loc) => {
                    return Err(AnalysisError::OverrideType {
                        key: key.clone(),
                        expected: "force-present or force-absent".into(),
                        got: loc.kind_name().into(),
                    })
                }
            }
        } else {
            return Err(AnalysisError::UnknownOverride(key.clone()));
        }
    }
    Ok((copy, forced))
}

pub fn what_if(kb: &KnowledgeBase, req: &WhatIfRequest) -> Result<WhatIfDiff, AnalysisError> {
    let record = lookup(kb, req.case.as_str())?;
    let (copy, forced) = apply_overrides(kb, record, &req.overrides)?;
    let before = build_case(kb, record, &BTreeMap::new())?;
    let after = build_case(kb, &copy, &forced)?;
    Ok(diff(&before, &after))
}

pub fn diff(before: &BuiltCase, after: &BuiltCase) -> WhatIfDiff {
    let b: BTreeSet<&FactorId> = before.case.factors.iter().collect();
    let a: BTreeSet<&FactorId> = after.case.factors.iter().collect();
    let changed_ascriptions = b
        .symmetric_difference(&a)
        .map(|f| FactorChange { factor: (*f).clone(), before: b.contains(f), after: a.contains(f) })
        .collect();
    let changed_issues = before
        .resolutions
        .iter()
        .filter_map(|(i, r)| {
            let r2 = after.resolutions.get(i).copied().unwrap_or_default();
            (r2 != *r).then(|| IssueChange { issue: i.clone(), before: *r, after: r2 })
        })
        .collect();
    let (o1, o2) = (before.outcome.conclusion, after.outcome.conclusion);
    WhatIfDiff {
        case: before.case.id.clone(),
        changed_ascriptions,
        changed_issues,
        changed_outcome: (o1 != o2).then_some(OutcomeChange { before: o1, after: o2 }),
    }
}
