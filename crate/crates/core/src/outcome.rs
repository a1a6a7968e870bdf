//! Outcome derivation from issue resolutions through the strict rule tree,
//! and checks on rules that parties claim the law provides.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::domain::{
    CaseRecord, DomainModel, IssueId, Outcome, Party, Resolution, RuleHead, RuleId, RuleModel, RuleNode, StrictRule,
};
use crate::scheme::{Attack, CqLabel, Grounds, InstanceId, Literal, Question, SchemeInstance, SchemeKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OutcomeError {
    #[error("unknown issue {0}")]
    UnknownIssue(IssueId),
    #[error("the rule model has no rule concluding the outcome")]
    NoOutcomeRule,
    #[error("issue {issue} is not an exception of rule {rule}")]
    ExceptionNotRegistered { rule: RuleId, issue: IssueId },
}

/// Three-valued truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    fn or(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::True, _) | (_, Truth::True) => Truth::True,
            (Truth::False, Truth::False) => Truth::False,
            _ => Truth::Unknown,
        }
    }
}

fn leaf_truth(assignments: &BTreeMap<IssueId, Resolution>, issue: &IssueId, outcome: Party) -> Truth {
    match assignments.get(issue).and_then(|r| r.party()) {
        Some(p) if p == outcome => Truth::True,
        Some(_) => Truth::False,
        None => Truth::Unknown,
    }
}

/// Kleene evaluation of a node; a leaf holds when its issue was resolved
/// for the party the rule model's outcome favours.
pub fn evaluate(node: &RuleNode, assignments: &BTreeMap<IssueId, Resolution>, outcome: Party) -> Truth {
    match node {
        RuleNode::Issue(id) => leaf_truth(assignments, id, outcome),
        RuleNode::All { of, .. } => of.iter().fold(Truth::True, |acc, c| acc.and(evaluate(c, assignments, outcome))),
        RuleNode::Any { of, .. } => of.iter().fold(Truth::False, |acc, c| acc.or(evaluate(c, assignments, outcome))),
    }
}

/// Leaves that settle the value of `node`.
fn support(node: &RuleNode, assignments: &BTreeMap<IssueId, Resolution>, outcome: Party, out: &mut Vec<IssueId>) {
    let value = evaluate(node, assignments, outcome);
    match node {
        RuleNode::Issue(id) => {
            if !out.contains(id) {
                out.push(id.clone());
            }
        }
        RuleNode::All { of, .. } | RuleNode::Any { of, .. } => {
            let conjunctive = matches!(node, RuleNode::All { .. });
            // The value an individual child can force on its own.
            let decisive = if conjunctive { Truth::False } else { Truth::True };
            if value == decisive {
                if let Some(c) = of.iter().find(|c| evaluate(c, assignments, outcome) == decisive) {
                    support(c, assignments, outcome, out);
                }
            } else {
                of.iter().for_each(|c| support(c, assignments, outcome, out));
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeArgument {
    pub rule: RuleId,
    /// Issue resolutions the conclusion rests on, in rule-tree order.
    pub issues: Vec<(IssueId, Resolution)>,
    pub conclusion: Outcome,
    pub open_cqs: Vec<CqLabel>,
    /// Exception issues of the rule that were resolved against its conclusion.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exceptions_met: Vec<IssueId>,
}

impl OutcomeArgument {
    pub fn instance_id(&self) -> InstanceId {
        InstanceId::new(format!("io:{}", self.rule))
    }

    /// The argument as a scheme instance; `None` while undecided.
    pub fn instance(&self) -> Option<SchemeInstance> {
        let party = self.conclusion.party()?;
        let used: Vec<String> = self.issues.iter().map(|(i, r)| format!("{i}={r}")).collect();
        let mut inst =
            SchemeInstance::new(self.instance_id().0, SchemeKind::IssueToOutcome, Literal::Outcome { party })
                .bind("rule", &self.rule)
                .bind("issues", used.join(", "))
                .premise(format!("rule {} links the issues to the outcome", self.rule))
                .premise(format!("the issues stand as {}", used.join(", ")));
        for e in &self.exceptions_met {
            inst = inst.question(
                Question::raised(
                    CqLabel::IOCQ1,
                    Grounds::Issue(e.clone()),
                    format!("{e} is an exception to {}", self.rule),
                )
                .about_issue(e),
            );
        }
        if self.open_cqs.contains(&CqLabel::IOCQ2) {
            inst = inst.question(Question::open(CqLabel::IOCQ2, "is every premise of the rule really required?"));
        }
        for (i, _) in &self.issues {
            inst = inst
                .question(Question::open(CqLabel::IOCQ3, format!("is {i} really resolved this way?")).about_issue(i));
        }
        Some(inst)
    }
}

/// Evaluates the rule tree on the given resolutions. Missing leaves count
/// as open. A false root means the other party wins: the tree is taken to
/// list every way the outcome can be reached.
pub fn derive_outcome(
    model: &DomainModel,
    assignments: &BTreeMap<IssueId, Resolution>,
) -> Result<OutcomeArgument, OutcomeError> {
    if let Some(unknown) = assignments.keys().find(|i| !model.issues.contains_key(*i)) {
        return Err(OutcomeError::UnknownIssue(unknown.clone()));
    }
    let rm = &model.rule_model;
    let rule = rm.outcome_rule().ok_or(OutcomeError::NoOutcomeRule)?;
    let o = rm.outcome;
    let conclusion = match evaluate(&rm.root, assignments, o) {
        Truth::True => Outcome::from(o),
        Truth::False => Outcome::from(o.opposite()),
        Truth::Unknown => Outcome::Undecided,
    };
    let mut leaves = Vec::new();
    if conclusion != Outcome::Undecided {
        support(&rm.root, assignments, o, &mut leaves);
    }
    let order = rm.leaves();
    leaves.sort_by_key(|l| order.iter().position(|x| x == l));
    let issues: Vec<(IssueId, Resolution)> = leaves
        .into_iter()
        .map(|l| {
            let r = assignments.get(&l).copied().unwrap_or_default();
            (l, r)
        })
        .collect();
    let exceptions_met: Vec<IssueId> = if conclusion == Outcome::from(o) {
        rule.exceptions
            .iter()
            .filter(|e| assignments.get(*e).and_then(|r| r.party()) == Some(o.opposite()))
            .cloned()
            .collect()
    } else {
        Vec::new()
    };
    let mut open_cqs = Vec::new();
    if !exceptions_met.is_empty() {
        open_cqs.push(CqLabel::IOCQ1);
    }
    if conclusion == Outcome::from(o.opposite()) {
        open_cqs.push(CqLabel::IOCQ2);
    }
    if !issues.is_empty() {
        open_cqs.push(CqLabel::IOCQ3);
    }
    Ok(OutcomeArgument { rule: rule.id.clone(), issues, conclusion, open_cqs, exceptions_met })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleCheck {
    pub ok: bool,
    /// Premises that add nothing: dropping one leaves the rule saying the same thing.
    pub unneeded: Vec<String>,
    /// Parts of the model's condition the claimed rule leaves out.
    pub missing: Vec<String>,
}

fn truth_of(model: &RuleModel, name: &str, assignments: &BTreeMap<IssueId, Resolution>) -> bool {
    match model.root.find(name) {
        Some(node) => evaluate(node, assignments, model.outcome) == Truth::True,
        None => false,
    }
}

/// Compares a claimed rule with the model by enumerating every complete
/// assignment of the model's leaf issues.
pub fn check_rule(claimed: &StrictRule, model: &RuleModel) -> RuleCheck {
    let Some(head) = model.head_node(&claimed.conclusion) else {
        return RuleCheck { ok: false, unneeded: Vec::new(), missing: vec![claimed.conclusion.to_string()] };
    };
    let leaves = model.leaves();
    let o = model.outcome;
    let rows: Vec<BTreeMap<IssueId, Resolution>> = (0..1u64 << leaves.len())
        .map(|bits| {
            leaves
                .iter()
                .enumerate()
                .map(|(k, l)| {
                    let side = if bits >> k & 1 == 1 { o } else { o.opposite() };
                    (l.clone(), Resolution::from(side))
                })
                .collect()
        })
        .collect();

    let mut unneeded = Vec::new();
    for p in &claimed.premises {
        let rest: Vec<&String> = claimed.premises.iter().filter(|q| *q != p).collect();
        let redundant = rows.iter().all(|row| {
            let rest_holds = rest.iter().all(|q| truth_of(model, q, row));
            let head_holds = evaluate(head, row, o) == Truth::True;
            !(rest_holds && !head_holds) || truth_of(model, p, row)
        });
        if redundant && !unneeded.contains(p) {
            unneeded.push(p.clone());
        }
    }

    let premises: BTreeSet<&str> = claimed.premises.iter().map(String::as_str).collect();
    let mut missing = Vec::new();
    collect_missing(head, &premises, &mut missing);
    RuleCheck { ok: unneeded.is_empty() && missing.is_empty(), unneeded, missing }
}

fn overlap(node: &RuleNode, premises: &BTreeSet<&str>) -> usize {
    node.names().iter().filter(|n| premises.contains(n.as_str())).count()
}

fn collect_missing(node: &RuleNode, premises: &BTreeSet<&str>, out: &mut Vec<String>) {
    if node.name().is_some_and(|n| premises.contains(n)) {
        return;
    }
    if overlap(node, premises) == 0 {
        if let Some(n) = node.name() {
            out.push(n.to_string());
            return;
        }
    }
    match node {
        RuleNode::Issue(_) => {}
        RuleNode::All { of, .. } => of.iter().for_each(|c| collect_missing(c, premises, out)),
        RuleNode::Any { of, .. } => {
            let mut best: Option<&RuleNode> = None;
            for c in of {
                if best.is_none_or(|b| overlap(c, premises) > overlap(b, premises)) {
                    best = Some(c);
                }
            }
            if let Some(c) = best {
                collect_missing(c, premises, out);
            }
        }
    }
}

/// IOCQ1: an attack on an outcome argument when one of its rule's exception
/// issues was resolved against the argument's conclusion.
pub fn exception_attack(
    model: &DomainModel,
    argument: &OutcomeArgument,
    exception: &IssueId,
    case: &CaseRecord,
) -> Result<Option<Attack>, OutcomeError> {
    let rule = model.rule_model.rule(&argument.rule).ok_or(OutcomeError::NoOutcomeRule)?;
    if !rule.exceptions.contains(exception) {
        return Err(OutcomeError::ExceptionNotRegistered { rule: rule.id.clone(), issue: exception.clone() });
    }
    let RuleHead::Outcome(o) = rule.conclusion else {
        return Ok(None);
    };
    if argument.conclusion != Outcome::from(o) || case.resolution(exception).party() != Some(o.opposite()) {
        return Ok(None);
    }
    let target = argument.instance_id();
    let from = objection_id(CqLabel::IOCQ1, &target, exception.as_str());
    Ok(Some(Attack::new(&from, &target, CqLabel::IOCQ1)))
}

/// Id of the objection instance that carries a grounded critical question.
pub fn objection_id(label: CqLabel, target: &InstanceId, ground: &str) -> InstanceId {
    InstanceId::new(format!("obj:{label}:{target}:{ground}"))
}
