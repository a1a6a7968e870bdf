//! Issue resolution: citing precedents that share issue-relevant factors,
//! distinguishing them, downplaying distinctions, and knockout factors.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::domain::{split_for_issue, CaseId, CaseRecord, DomainError, DomainModel, FactorId, IssueId, Party};
use crate::scheme::{CqLabel, Grounds, InstanceId, Literal, Question, SchemeInstance, SchemeKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolutionError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("precedent {precedent} did not resolve issue {issue}")]
    Unresolved { precedent: CaseId, issue: IssueId },
}

fn join(set: &BTreeSet<FactorId>) -> String {
    set.iter().map(|f| f.as_str()).collect::<Vec<_>>().join(", ")
}

/// An argument that the case should resolve an issue as a precedent did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationArgument {
    pub case: CaseId,
    pub precedent: CaseId,
    pub issue: IssueId,
    pub shared_plaintiff: BTreeSet<FactorId>,
    pub shared_defendant: BTreeSet<FactorId>,
    pub resolved_for: Party,
}

impl CitationArgument {
    pub fn instance_id(&self) -> InstanceId {
        InstanceId::new(format!("cite:{}:{}", self.precedent, self.issue))
    }

    pub fn conclusion(&self) -> Literal {
        Literal::IssueFor { issue: self.issue.clone(), party: self.resolved_for }
    }

    pub fn shared_for(&self, party: Party) -> &BTreeSet<FactorId> {
        match party {
            Party::Plaintiff => &self.shared_plaintiff,
            Party::Defendant => &self.shared_defendant,
        }
    }

    pub fn instance(&self) -> SchemeInstance {
        let p = self.resolved_for;
        let mut shared = self.shared_plaintiff.clone();
        shared.extend(self.shared_defendant.iter().cloned());
        let mut inst = SchemeInstance::new(self.instance_id().0, SchemeKind::Citation, self.conclusion())
            .bind("case", &self.case)
            .bind("precedent", &self.precedent)
            .bind("issue", &self.issue)
            .bind("party", p)
            .bind("shared", join(&shared))
            .premise(format!(
                "{} and {} share {{{}}} relevant to {}",
                self.case,
                self.precedent,
                join(&shared),
                self.issue
            ))
            .premise(format!("{} resolved {} for the {p}", self.precedent, self.issue));
        for f in self.shared_for(p) {
            inst = inst.question(
                Question::open(CqLabel::CCQ3, format!("is {f} really present in {}?", self.case))
                    .about_factor(f)
                    .about_issue(&self.issue),
            );
        }
        inst
    }
}

/// Cites `precedent` on `issue`. `None` when the two cases share no factor
/// relevant to the issue that favours the party the precedent found for.
pub fn cite(
    model: &DomainModel,
    case: &CaseRecord,
    precedent: &CaseRecord,
    issue: &IssueId,
) -> Result<Option<CitationArgument>, ResolutionError> {
    let iss = model.issue(issue.as_str())?;
    let party = precedent
        .resolution(issue)
        .party()
        .ok_or_else(|| ResolutionError::Unresolved { precedent: precedent.id.clone(), issue: issue.clone() })?;
    let common: BTreeSet<FactorId> = case.factors.intersection(&precedent.factors).cloned().collect();
    let (shared_plaintiff, shared_defendant) = split_for_issue(iss, &common);
    let arg = CitationArgument {
        case: case.id.clone(),
        precedent: precedent.id.clone(),
        issue: issue.clone(),
        shared_plaintiff,
        shared_defendant,
        resolved_for: party,
    };
    Ok((!arg.shared_for(party).is_empty()).then_some(arg))
}

/// Precedents other than the cited one that share an issue-relevant factor
/// with the case and resolved the issue the other way.
pub fn counterexamples(
    model: &DomainModel,
    citation: &CitationArgument,
    case: &CaseRecord,
    casebase: &[&CaseRecord],
) -> Result<Vec<CitationArgument>, ResolutionError> {
    let iss = model.issue(citation.issue.as_str())?;
    let want = citation.resolved_for.opposite();
    let mut out = Vec::new();
    for p in casebase {
        if p.id == citation.precedent || p.id == case.id || p.resolution(&citation.issue).party() != Some(want) {
            continue;
        }
        let common: BTreeSet<FactorId> = case.factors.intersection(&p.factors).cloned().collect();
        let (sp, sd) = split_for_issue(iss, &common);
        if sp.is_empty() && sd.is_empty() {
            continue;
        }
        out.push(CitationArgument {
            case: case.id.clone(),
            precedent: p.id.clone(),
            issue: citation.issue.clone(),
            shared_plaintiff: sp,
            shared_defendant: sd,
            resolved_for: want,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Presence {
    CaseOnly,
    PrecedentOnly,
}

/// A factor present in only one of the two cases that weakens a citation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistinctionArgument {
    pub citation: InstanceId,
    pub case: CaseId,
    pub precedent: CaseId,
    pub issue: IssueId,
    pub factor: FactorId,
    pub present_in: Presence,
    /// The party the citation was for.
    pub weakens: Party,
    /// CCQ4 for an additional opposing factor in the case, CCQ2 for a
    /// strength of the precedent missing from the case.
    pub question: CqLabel,
}

impl DistinctionArgument {
    pub fn instance_id(&self) -> InstanceId {
        InstanceId::new(format!("dist:{}:{}:{}", self.precedent, self.issue, self.factor))
    }

    pub fn instance(&self) -> SchemeInstance {
        let (here, there) = match self.present_in {
            Presence::CaseOnly => (&self.case, &self.precedent),
            Presence::PrecedentOnly => (&self.precedent, &self.case),
        };
        SchemeInstance::new(
            self.instance_id().0,
            SchemeKind::Distinction,
            Literal::DoNotResolve { issue: self.issue.clone(), party: self.weakens },
        )
        .bind("citation", &self.citation)
        .bind("case", &self.case)
        .bind("precedent", &self.precedent)
        .bind("issue", &self.issue)
        .bind("factor", &self.factor)
        .bind("present_in", if self.present_in == Presence::CaseOnly { "case-only" } else { "precedent-only" })
        .bind("question", self.question)
        .premise(format!("{} is present in {here} but not in {there}", self.factor))
        .premise(format!("this weakens the case for the {} on {}", self.weakens, self.issue))
    }
}

/// Distinctions of a citation: for a citation for party p, every
/// issue-relevant factor against p found only in the case, and every
/// issue-relevant factor for p found only in the precedent.
pub fn distinguish(
    model: &DomainModel,
    citation: &CitationArgument,
    case: &CaseRecord,
    precedent: &CaseRecord,
) -> Result<Vec<DistinctionArgument>, ResolutionError> {
    let iss = model.issue(citation.issue.as_str())?;
    let p = citation.resolved_for;
    let case_only: BTreeSet<FactorId> = case.factors.difference(&precedent.factors).cloned().collect();
    let prec_only: BTreeSet<FactorId> = precedent.factors.difference(&case.factors).cloned().collect();
    let make = |factor: &FactorId, present_in, question| DistinctionArgument {
        citation: citation.instance_id(),
        case: case.id.clone(),
        precedent: precedent.id.clone(),
        issue: citation.issue.clone(),
        factor: factor.clone(),
        present_in,
        weakens: p,
        question,
    };
    let mut out = Vec::new();
    for f in iss.factors_for(p.opposite()).intersection(&case_only) {
        out.push(make(f, Presence::CaseOnly, CqLabel::CCQ4));
    }
    for f in iss.factors_for(p).intersection(&prec_only) {
        out.push(make(f, Presence::PrecedentOnly, CqLabel::CCQ2));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DownplayKind {
    /// A case-only factor stands in for a strength the precedent had.
    Substitution,
    /// A case-only factor offsets an additional opposing factor.
    Cancellation,
}

impl DownplayKind {
    pub fn question(self) -> CqLabel {
        match self {
            DownplayKind::Substitution => CqLabel::DCQ1,
            DownplayKind::Cancellation => CqLabel::DCQ2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DownplayMove {
    pub distinction: InstanceId,
    pub issue: IssueId,
    pub case: CaseId,
    pub precedent: CaseId,
    pub kind: DownplayKind,
    /// The distinguishing factor being answered.
    pub against: FactorId,
    /// The factor used to answer it.
    pub factor: FactorId,
}

impl DownplayMove {
    pub fn instance_id(&self) -> InstanceId {
        InstanceId::new(format!("down:{}:{}:{}:{}", self.precedent, self.issue, self.against, self.factor))
    }

    pub fn instance(&self) -> SchemeInstance {
        let verb = match self.kind {
            DownplayKind::Substitution => "substitutes for",
            DownplayKind::Cancellation => "cancels",
        };
        SchemeInstance::new(
            self.instance_id().0,
            SchemeKind::Downplay,
            Literal::Challenge { question: self.kind.question(), target: self.distinction.clone() },
        )
        .bind("distinction", &self.distinction)
        .bind("kind", if self.kind == DownplayKind::Substitution { "substitution" } else { "cancellation" })
        .bind("factor", &self.factor)
        .bind("against", &self.against)
        .bind("issue", &self.issue)
        .premise(format!("{} is present in {} but not in {}", self.factor, self.case, self.precedent))
        .premise(format!("{} {verb} {} on {}", self.factor, self.against, self.issue))
    }
}

/// Ways to answer a distinction with a factor present only in the case that
/// favours the party the citation was for.
pub fn downplay(
    model: &DomainModel,
    distinction: &DistinctionArgument,
    case: &CaseRecord,
    precedent: &CaseRecord,
) -> Result<Vec<DownplayMove>, ResolutionError> {
    let iss = model.issue(distinction.issue.as_str())?;
    let kind = match distinction.present_in {
        Presence::CaseOnly => DownplayKind::Cancellation,
        Presence::PrecedentOnly => DownplayKind::Substitution,
    };
    let case_only: BTreeSet<FactorId> = case.factors.difference(&precedent.factors).cloned().collect();
    Ok(iss
        .factors_for(distinction.weakens)
        .intersection(&case_only)
        .filter(|f| **f != distinction.factor)
        .map(|f| DownplayMove {
            distinction: distinction.instance_id(),
            issue: distinction.issue.clone(),
            case: case.id.clone(),
            precedent: precedent.id.clone(),
            kind,
            against: distinction.factor.clone(),
            factor: f.clone(),
        })
        .collect())
}

/// Knockout Factor: a knockout factor present in the case settles the issue
/// for its party whatever else is present.
pub fn knockout_arguments(
    model: &DomainModel,
    case: &CaseRecord,
    issue: &IssueId,
    precedents: &[&CaseRecord],
) -> Result<Vec<SchemeInstance>, ResolutionError> {
    let iss = model.issue(issue.as_str())?;
    let mut out = Vec::new();
    for fid in &case.factors {
        let f = model.factor(fid.as_str())?;
        if !f.knockout || !iss.contains(fid) {
            continue;
        }
        let p = f.polarity;
        let mut inst = SchemeInstance::new(
            format!("ko:{issue}:{fid}"),
            SchemeKind::Knockout,
            Literal::IssueFor { issue: issue.clone(), party: p },
        )
        .bind("case", &case.id)
        .bind("issue", issue)
        .bind("factor", fid)
        .bind("party", p)
        .premise(format!("{fid} is present in {}", case.id))
        .premise(format!("{fid} by its nature settles {issue} for the {p}"))
        .question(
            Question::open(CqLabel::KOCQ1, format!("is {fid} really present in {}?", case.id))
                .about_factor(fid)
                .about_issue(issue),
        );
        for prec in precedents {
            if prec.id != case.id && prec.has_factor(fid) && prec.resolution(issue).party() == Some(p.opposite()) {
                inst = inst.question(
                    Question::raised(
                        CqLabel::KOCQ2,
                        Grounds::Precedent(prec.id.clone()),
                        format!("{} had {fid} yet resolved {issue} for the {}", prec.id, p.opposite()),
                    )
                    .about_factor(fid)
                    .about_issue(issue),
                );
            }
        }
        out.push(inst);
    }
    Ok(out)
}
