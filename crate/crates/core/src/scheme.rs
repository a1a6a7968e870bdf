//! Argumentation schemes, their critical questions, and instantiated schemes.

use std::borrow::Borrow;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{string_id, CaseId, FactAtom, FactorId, IssueId, Party};

string_id!(
    /// Stable, content-derived identifier of a scheme instance.
    InstanceId
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    IssueToOutcome,
    Citation,
    Distinction,
    Downplay,
    Knockout,
    OrdinaryMeaning,
    Analogy,
    SwitchingPoint,
    TradeOff,
    /// A critical question put as an argument of its own, either with grounds
    /// found in the knowledge base or posed by a participant.
    Objection,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 10] = [
        SchemeKind::IssueToOutcome,
        SchemeKind::Citation,
        SchemeKind::Distinction,
        SchemeKind::Downplay,
        SchemeKind::Knockout,
        SchemeKind::OrdinaryMeaning,
        SchemeKind::Analogy,
        SchemeKind::SwitchingPoint,
        SchemeKind::TradeOff,
        SchemeKind::Objection,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::IssueToOutcome => "issue-to-outcome",
            SchemeKind::Citation => "citation",
            SchemeKind::Distinction => "distinction",
            SchemeKind::Downplay => "downplay",
            SchemeKind::Knockout => "knockout",
            SchemeKind::OrdinaryMeaning => "ordinary-meaning",
            SchemeKind::Analogy => "analogy",
            SchemeKind::SwitchingPoint => "switching-point",
            SchemeKind::TradeOff => "trade-off",
            SchemeKind::Objection => "objection",
        }
    }

    /// Schemes that ascribe factors from facts and dimensions.
    pub fn is_ascription(self) -> bool {
        matches!(
            self,
            SchemeKind::OrdinaryMeaning | SchemeKind::Analogy | SchemeKind::SwitchingPoint | SchemeKind::TradeOff
        )
    }

    /// Strict schemes can only be attacked on their premises or undercut.
    pub fn is_strict(self) -> bool {
        self == SchemeKind::IssueToOutcome
    }

    /// Critical questions that may be put against an instance of this scheme.
    pub fn questions(self) -> &'static [CqLabel] {
        use CqLabel::*;
        match self {
            SchemeKind::IssueToOutcome => &[IOCQ1, IOCQ2, IOCQ3],
            SchemeKind::Citation => &[CCQ1, CCQ2, CCQ3, CCQ4],
            SchemeKind::Distinction => &[DCQ1, DCQ2],
            SchemeKind::Knockout => &[KOCQ1, KOCQ2],
            SchemeKind::OrdinaryMeaning => &[MCQ1, MCQ2, MCQ3],
            SchemeKind::Analogy => &[ACQ1, ACQ2, ACQ3],
            SchemeKind::SwitchingPoint => &[SCQ1, SCQ2, SCQ3],
            SchemeKind::TradeOff => &[TCQ1, TCQ2],
            SchemeKind::Downplay | SchemeKind::Objection => &[],
        }
    }

    /// Whether an attack labelled `label` may target an instance of this scheme.
    pub fn admits(self, label: CqLabel) -> bool {
        if label == CqLabel::Rebuttal {
            return !self.is_strict();
        }
        self.questions().contains(&label)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Critical-question labels. `Rebuttal` marks a plain clash between
/// contradictory conclusions that no scheme-specific question covers.
#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CqLabel {
    IOCQ1,
    IOCQ2,
    IOCQ3,
    CCQ1,
    CCQ2,
    CCQ3,
    CCQ4,
    DCQ1,
    DCQ2,
    KOCQ1,
    KOCQ2,
    MCQ1,
    MCQ2,
    MCQ3,
    ACQ1,
    ACQ2,
    ACQ3,
    SCQ1,
    SCQ2,
    SCQ3,
    TCQ1,
    TCQ2,
    #[serde(rename = "REBUT")]
    Rebuttal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackKind {
    PremiseUndermine,
    Rebut,
    Undercut,
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackKind::PremiseUndermine => "premise-undermine",
            AttackKind::Rebut => "rebut",
            AttackKind::Undercut => "undercut",
        })
    }
}

impl CqLabel {
    pub fn as_str(self) -> &'static str {
        use CqLabel::*;
        match self {
            IOCQ1 => "IOCQ1",
            IOCQ2 => "IOCQ2",
            IOCQ3 => "IOCQ3",
            CCQ1 => "CCQ1",
            CCQ2 => "CCQ2",
            CCQ3 => "CCQ3",
            CCQ4 => "CCQ4",
            DCQ1 => "DCQ1",
            DCQ2 => "DCQ2",
            KOCQ1 => "KOCQ1",
            KOCQ2 => "KOCQ2",
            MCQ1 => "MCQ1",
            MCQ2 => "MCQ2",
            MCQ3 => "MCQ3",
            ACQ1 => "ACQ1",
            ACQ2 => "ACQ2",
            ACQ3 => "ACQ3",
            SCQ1 => "SCQ1",
            SCQ2 => "SCQ2",
            SCQ3 => "SCQ3",
            TCQ1 => "TCQ1",
            TCQ2 => "TCQ2",
            Rebuttal => "REBUT",
        }
    }

    pub fn attack_kind(self) -> AttackKind {
        use CqLabel::*;
        match self {
            MCQ2 | IOCQ1 | IOCQ2 | DCQ1 | DCQ2 | SCQ1 | TCQ2 => AttackKind::Undercut,
            MCQ1 | CCQ3 | IOCQ3 | KOCQ1 | ACQ1 | ACQ2 => AttackKind::PremiseUndermine,
            CCQ1 | CCQ2 | CCQ4 | KOCQ2 | SCQ2 | SCQ3 | TCQ1 | ACQ3 | MCQ3 | Rebuttal => AttackKind::Rebut,
        }
    }

    /// Questions that challenge whether a factor is present.
    pub fn disputes_factor(self) -> bool {
        matches!(self, CqLabel::CCQ3 | CqLabel::KOCQ1)
    }
}

impl fmt::Display for CqLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CqLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| format!("unknown critical question {s:?}"))
    }
}

/// The conclusion of a scheme instance. The case is implicit in the graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Literal {
    FactorPresent {
        factor: FactorId,
    },
    FactorAbsent {
        factor: FactorId,
    },
    IssueFor {
        issue: IssueId,
        party: Party,
    },
    DoNotResolve {
        issue: IssueId,
        party: Party,
    },
    Outcome {
        party: Party,
    },
    /// The critical question `question` succeeds against `target`.
    Challenge {
        question: CqLabel,
        target: InstanceId,
    },
}

impl Literal {
    pub fn present(factor: &str) -> Literal {
        Literal::FactorPresent { factor: FactorId::new(factor) }
    }

    pub fn absent(factor: &str) -> Literal {
        Literal::FactorAbsent { factor: FactorId::new(factor) }
    }

    pub fn issue(issue: &str, party: Party) -> Literal {
        Literal::IssueFor { issue: IssueId::new(issue), party }
    }

    pub fn outcome(party: Party) -> Literal {
        Literal::Outcome { party }
    }

    /// The contradictory literal, for conclusions that have one.
    pub fn contrary(&self) -> Option<Literal> {
        match self {
            Literal::FactorPresent { factor } => Some(Literal::FactorAbsent { factor: factor.clone() }),
            Literal::FactorAbsent { factor } => Some(Literal::FactorPresent { factor: factor.clone() }),
            Literal::IssueFor { issue, party } => {
                Some(Literal::IssueFor { issue: issue.clone(), party: party.opposite() })
            }
            Literal::Outcome { party } => Some(Literal::Outcome { party: party.opposite() }),
            Literal::DoNotResolve { .. } | Literal::Challenge { .. } => None,
        }
    }

    pub fn factor(&self) -> Option<&FactorId> {
        match self {
            Literal::FactorPresent { factor } | Literal::FactorAbsent { factor } => Some(factor),
            _ => None,
        }
    }

    /// The same literal with plaintiff and defendant exchanged.
    pub fn mirrored(&self) -> Literal {
        match self {
            Literal::IssueFor { issue, party } => Literal::IssueFor { issue: issue.clone(), party: party.opposite() },
            Literal::DoNotResolve { issue, party } => {
                Literal::DoNotResolve { issue: issue.clone(), party: party.opposite() }
            }
            Literal::Outcome { party } => Literal::Outcome { party: party.opposite() },
            other => other.clone(),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::FactorPresent { factor } => write!(f, "present({factor})"),
            Literal::FactorAbsent { factor } => write!(f, "absent({factor})"),
            Literal::IssueFor { issue, party } => write!(f, "issue({issue},{party})"),
            Literal::DoNotResolve { issue, party } => write!(f, "not-resolve({issue},{party})"),
            Literal::Outcome { party } => write!(f, "outcome({party})"),
            Literal::Challenge { question, target } => write!(f, "challenge({question},{target})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse literal {text:?}: {reason}")]
pub struct ParseLiteralError {
    pub text: String,
    pub reason: String,
}

impl FromStr for Literal {
    type Err = ParseLiteralError;

    /// Accepts the forms produced by `Display`, e.g. `issue(SecrecyMaintained,plaintiff)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| ParseLiteralError { text: s.to_string(), reason: reason.to_string() };
        let t = s.trim();
        let open = t.find('(').ok_or_else(|| err("expected `name(args)`"))?;
        let body = t[open + 1..].strip_suffix(')').ok_or_else(|| err("missing closing parenthesis"))?;
        let args: Vec<&str> = body.split(',').map(str::trim).collect();
        let party = |a: &str| a.parse::<Party>().map_err(|e| err(&e));
        let arity = |n: usize| {
            if args.len() == n && args.iter().all(|a| !a.is_empty()) {
                Ok(())
            } else {
                Err(err(&format!("expected {n} argument(s)")))
            }
        };
        match &t[..open] {
            "present" => {
                arity(1)?;
                Ok(Literal::present(args[0]))
            }
            "absent" => {
                arity(1)?;
                Ok(Literal::absent(args[0]))
            }
            "issue" => {
                arity(2)?;
                Ok(Literal::IssueFor { issue: IssueId::new(args[0]), party: party(args[1])? })
            }
            "not-resolve" => {
                arity(2)?;
                Ok(Literal::DoNotResolve { issue: IssueId::new(args[0]), party: party(args[1])? })
            }
            "outcome" => {
                arity(1)?;
                Ok(Literal::Outcome { party: party(args[0])? })
            }
            "challenge" => {
                arity(2)?;
                Ok(Literal::Challenge {
                    question: args[0].parse().map_err(|e: String| err(&e))?,
                    target: InstanceId::new(args[1]),
                })
            }
            other => Err(err(&format!("unknown literal kind {other:?}"))),
        }
    }
}

/// What a critical question found in the knowledge base to back it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grounds {
    Fact(FactAtom),
    Factor(FactorId),
    Precedent(CaseId),
    Issue(IssueId),
}

impl Grounds {
    /// The bare id of whatever the grounds point at.
    pub fn key(&self) -> &str {
        match self {
            Grounds::Fact(x) => x.as_str(),
            Grounds::Factor(x) => x.as_str(),
            Grounds::Precedent(x) => x.as_str(),
            Grounds::Issue(x) => x.as_str(),
        }
    }
}

impl fmt::Display for Grounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grounds::Fact(x) => write!(f, "fact {x}"),
            Grounds::Factor(x) => write!(f, "factor {x}"),
            Grounds::Precedent(x) => write!(f, "precedent {x}"),
            Grounds::Issue(x) => write!(f, "issue {x}"),
        }
    }
}

/// A critical question attached to an instance. Without grounds it is open:
/// a participant may pose it, but the engine does not act on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub label: CqLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<FactorId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub issue: Option<IssueId>,
    pub note: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grounds: Option<Grounds>,
}

impl Question {
    pub fn open(label: CqLabel, note: impl Into<String>) -> Self {
        Question { label, factor: None, issue: None, note: note.into(), grounds: None }
    }

    pub fn raised(label: CqLabel, grounds: Grounds, note: impl Into<String>) -> Self {
        Question { label, factor: None, issue: None, note: note.into(), grounds: Some(grounds) }
    }

    pub fn about_factor(mut self, factor: &FactorId) -> Self {
        self.factor = Some(factor.clone());
        self
    }

    pub fn about_issue(mut self, issue: &IssueId) -> Self {
        self.issue = Some(issue.clone());
        self
    }

    pub fn is_open(&self) -> bool {
        self.grounds.is_none()
    }
}

/// One node of reasoning: a scheme with its bindings and conclusion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeInstance {
    pub id: InstanceId,
    pub scheme: SchemeKind,
    pub bindings: BTreeMap<String, String>,
    pub premises: Vec<String>,
    pub conclusion: Literal,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub questions: Vec<Question>,
}

impl SchemeInstance {
    pub fn new(id: impl Into<String>, scheme: SchemeKind, conclusion: Literal) -> Self {
        SchemeInstance {
            id: InstanceId::new(id),
            scheme,
            bindings: BTreeMap::new(),
            premises: Vec::new(),
            conclusion,
            questions: Vec::new(),
        }
    }

    pub fn bind(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.bindings.insert(key.to_string(), value.to_string());
        self
    }

    pub fn premise(mut self, text: impl Into<String>) -> Self {
        self.premises.push(text.into());
        self
    }

    pub fn question(mut self, q: Question) -> Self {
        self.questions.push(q);
        self
    }

    pub fn binding(&self, key: &str) -> Option<&str> {
        self.bindings.get(key).map(String::as_str)
    }

    pub fn open_questions(&self) -> impl Iterator<Item = &Question> {
        self.questions.iter().filter(|q| q.is_open())
    }

    pub fn raised_questions(&self) -> impl Iterator<Item = &Question> {
        self.questions.iter().filter(|q| !q.is_open())
    }

    pub fn has_raised(&self, label: CqLabel) -> bool {
        self.raised_questions().any(|q| q.label == label)
    }

    pub fn has_open(&self, label: CqLabel) -> bool {
        self.open_questions().any(|q| q.label == label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Attack {
    pub from: InstanceId,
    pub to: InstanceId,
    pub cq: CqLabel,
    pub kind: AttackKind,
}

impl Attack {
    pub fn new(from: &InstanceId, to: &InstanceId, cq: CqLabel) -> Self {
        Attack { from: from.clone(), to: to.clone(), cq, kind: cq.attack_kind() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn every_question_belongs_to_exactly_one_scheme() {
        for label in [
            CqLabel::IOCQ1,
            CqLabel::CCQ4,
            CqLabel::DCQ2,
            CqLabel::KOCQ2,
            CqLabel::MCQ3,
            CqLabel::ACQ3,
            CqLabel::SCQ1,
            CqLabel::TCQ2,
        ] {
            let owners = SchemeKind::ALL.iter().filter(|s| s.questions().contains(&label)).count();
            assert_eq!(owners, 1, "{label}");
        }
    }

    #[test]
    fn strict_scheme_rejects_rebuttal() {
        assert!(!SchemeKind::IssueToOutcome.admits(CqLabel::Rebuttal));
        assert!(SchemeKind::Citation.admits(CqLabel::Rebuttal));
        assert!(!SchemeKind::TradeOff.admits(CqLabel::IOCQ1));
    }

    #[test]
    fn io_questions_never_rebut() {
        for q in SchemeKind::IssueToOutcome.questions() {
            assert_ne!(q.attack_kind(), AttackKind::Rebut);
        }
    }

    #[test]
    fn literal_parse_errors() {
        assert!("present".parse::<Literal>().is_err());
        assert!("issue(A)".parse::<Literal>().is_err());
        assert!("issue(A,judge)".parse::<Literal>().is_err());
        assert!("winner(plaintiff)".parse::<Literal>().is_err());
        assert_eq!("CCQ2".parse::<CqLabel>().unwrap(), CqLabel::CCQ2);
        assert_eq!("REBUT".parse::<CqLabel>().unwrap(), CqLabel::Rebuttal);
    }

    fn arb_literal() -> impl Strategy<Value = Literal> {
        let id = "[A-Za-z][A-Za-z0-9_-]{0,8}";
        let party = prop_oneof![Just(Party::Plaintiff), Just(Party::Defendant)];
        prop_oneof![
            id.prop_map(|f| Literal::present(&f)),
            id.prop_map(|f| Literal::absent(&f)),
            (id, party.clone()).prop_map(|(i, p)| Literal::issue(&i, p)),
            (id, party.clone()).prop_map(|(i, p)| Literal::DoNotResolve { issue: IssueId::new(i), party: p }),
            party.prop_map(Literal::outcome),
            id.prop_map(|t| Literal::Challenge { question: CqLabel::MCQ2, target: InstanceId::new(t) }),
        ]
    }

    proptest! {
        #[test]
        fn literal_text_round_trip(lit in arb_literal()) {
            let back: Literal = lit.to_string().parse().unwrap();
            prop_assert_eq!(back, lit);
        }

        #[test]
        fn contrary_is_an_involution(lit in arb_literal()) {
            if let Some(c) = lit.contrary() {
                prop_assert_eq!(c.contrary(), Some(lit));
            }
        }
    }
}
