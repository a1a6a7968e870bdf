//! Explanation trees over a labelled graph.
//!
//! An accepted argument is shown with its premises and with each of its
//! attackers, which are in turn shown defeated by an accepted counter. A
//! rejected argument is shown with the accepted attacker that defeats it.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::graph::{ArgumentGraph, Label};
use crate::domain::IssueId;
use crate::scheme::{CqLabel, InstanceId, Literal, SchemeKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExplainError {
    #[error("no argument in the graph concludes {0}")]
    ClaimNotInGraph(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Explanation {
    pub instance: InstanceId,
    pub scheme: SchemeKind,
    pub conclusion: String,
    pub label: Label,
    pub premises: Vec<String>,
    /// Arguments for the premises of an outcome argument.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub supports: Vec<Explanation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attackers: Vec<AttackExplanation>,
    /// Set when the node was already shown higher up the tree.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub repeated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackExplanation {
    pub cq: CqLabel,
    pub by: Explanation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContrastiveExplanation {
    pub fact: Explanation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub foil: Option<Explanation>,
    /// Present when nothing at all argues for the foil.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub why_not: Option<String>,
    /// First issue, in the order the fact's tree visits them, that is
    /// established for the fact's side and not for the foil's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergent_issue: Option<IssueId>,
}

pub fn explain(graph: &ArgumentGraph, claim: &Literal) -> Result<Explanation, ExplainError> {
    let best = graph.best_for(claim).ok_or_else(|| ExplainError::ClaimNotInGraph(claim.clone()))?;
    Ok(node(graph, &best.id, &mut BTreeSet::new()))
}

fn node(graph: &ArgumentGraph, id: &InstanceId, visited: &mut BTreeSet<InstanceId>) -> Explanation {
    let inst = graph.instance(id).expect("explained node is in the graph");
    let label = graph.label(id).unwrap_or(Label::Undec);
    let mut out = Explanation {
        instance: id.clone(),
        scheme: inst.scheme,
        conclusion: inst.conclusion.to_string(),
        label,
        premises: inst.premises.clone(),
        supports: Vec::new(),
        attackers: Vec::new(),
        repeated: false,
    };
    if !visited.insert(id.clone()) {
        out.repeated = true;
        return out;
    }
    if inst.scheme == SchemeKind::IssueToOutcome {
        if let Some(issues) = inst.binding("issues") {
            for pair in issues.split(", ") {
                let Some((issue, side)) = pair.split_once('=') else { continue };
                let Ok(party) = side.parse() else { continue };
                let lit = Literal::IssueFor { issue: IssueId::new(issue), party };
                if let Some(best) = graph.best_for(&lit) {
                    out.supports.push(node(graph, &best.id, visited));
                }
            }
        }
    }
    let shown: Vec<(CqLabel, InstanceId)> = graph
        .attackers_of(id)
        .filter(|a| {
            let l = graph.label(&a.from);
            match label {
                Label::In => true,
                Label::Out => l == Some(Label::In),
                Label::Undec => l != Some(Label::Out),
            }
        })
        .map(|a| (a.cq, a.from.clone()))
        .collect();
    for (cq, from) in shown {
        out.attackers.push(AttackExplanation { cq, by: node(graph, &from, visited) });
    }
    out
}

/// Explains `fact` and `foil` side by side.
pub fn explain_contrast(
    graph: &ArgumentGraph,
    fact: &Literal,
    foil: &Literal,
) -> Result<ContrastiveExplanation, ExplainError> {
    let fact_tree = explain(graph, fact)?;
    let (foil_tree, why_not) = match explain(graph, foil) {
        Ok(t) => (Some(t), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut issues = Vec::new();
    collect_issue_literals(graph, &fact_tree, &mut issues);
    let divergent_issue = issues.into_iter().find_map(|(issue, party)| {
        let ours = Literal::IssueFor { issue: issue.clone(), party };
        let theirs = Literal::IssueFor { issue: issue.clone(), party: party.opposite() };
        (graph.holds(&ours) && !graph.holds(&theirs)).then_some(issue)
    });
    Ok(ContrastiveExplanation { fact: fact_tree, foil: foil_tree, why_not, divergent_issue })
}

fn collect_issue_literals(graph: &ArgumentGraph, e: &Explanation, out: &mut Vec<(IssueId, crate::domain::Party)>) {
    if let Some(Literal::IssueFor { issue, party }) = graph.instance(&e.instance).map(|i| &i.conclusion) {
        if !out.iter().any(|(i, _)| i == issue) {
            out.push((issue.clone(), *party));
        }
    }
    for s in &e.supports {
        collect_issue_literals(graph, s, out);
    }
    for a in &e.attackers {
        collect_issue_literals(graph, &a.by, out);
    }
}
