//! A turn-based dialogue over one case's argument graph.
//!
//! The proponent defends a target literal, the opponent attacks. Live moves
//! form a line in which every entry replies to the one before it. Each
//! argument and each posed question can enter the dialogue once, so the
//! supply of moves only shrinks and every game ends. When the player to move
//! has nothing left but to concede or retract, the other player wins.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::{CaseId, FactorId};
use crate::engine::{build_case, ArgumentGraph, EngineError, GraphExport, Label};
use crate::kb::KnowledgeBase;
use crate::scheme::{Attack, CqLabel, InstanceId, Literal, SchemeInstance, SchemeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Proponent,
    Opponent,
}

impl Role {
    pub fn other(self) -> Role {
        match self {
            Role::Proponent => Role::Opponent,
            Role::Opponent => Role::Proponent,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Proponent => "proponent",
            Role::Opponent => "opponent",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    Claim,
    Cite,
    PoseCq,
    Counterexample,
    Distinguish,
    DisputeFactor,
    AddFactor,
    Downplay,
    AnswerCq,
    Concede,
    Retract,
}

impl MoveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MoveKind::Claim => "claim",
            MoveKind::Cite => "cite",
            MoveKind::PoseCq => "pose-cq",
            MoveKind::Counterexample => "counterexample",
            MoveKind::Distinguish => "distinguish",
            MoveKind::DisputeFactor => "dispute-factor",
            MoveKind::AddFactor => "add-factor",
            MoveKind::Downplay => "downplay",
            MoveKind::AnswerCq => "answer-cq",
            MoveKind::Concede => "concede",
            MoveKind::Retract => "retract",
        }
    }
}

/// A move. Submitted moves may leave fields out; they are matched against
/// the fully specified legal moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub question: Option<CqLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<FactorId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<InstanceId>,
}

impl Move {
    pub fn new(kind: MoveKind) -> Self {
        Move { kind, instance: None, question: None, factor: None, target: None }
    }

    pub fn concede() -> Self {
        Move::new(MoveKind::Concede)
    }

    pub fn retract() -> Self {
        Move::new(MoveKind::Retract)
    }

    pub fn with_instance(mut self, id: impl Into<String>) -> Self {
        self.instance = Some(InstanceId::new(id));
        self
    }

    pub fn with_factor(mut self, f: impl Into<String>) -> Self {
        self.factor = Some(FactorId::new(f));
        self
    }

    pub fn with_question(mut self, q: CqLabel) -> Self {
        self.question = Some(q);
        self
    }

    /// Whether every field set in `self` agrees with `legal`.
    pub fn matches(&self, legal: &Move) -> bool {
        fn ok<T: PartialEq>(want: &Option<T>, have: &Option<T>) -> bool {
            want.is_none() || want == have
        }
        self.kind == legal.kind
            && ok(&self.instance, &legal.instance)
            && ok(&self.question, &legal.question)
            && ok(&self.factor, &legal.factor)
            && ok(&self.target, &legal.target)
    }

    pub fn describe(&self) -> String {
        let mut s = self.kind.as_str().to_string();
        if let Some(f) = &self.factor {
            s.push_str(&format!(" {f}"));
        }
        if let Some(i) = &self.instance {
            s.push_str(&format!(" [{i}]"));
        }
        if let Some(q) = self.question {
            s.push_str(&format!(" ({q})"));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Open,
    ProponentWins,
    OpponentWins,
}

impl Status {
    fn win_for(role: Role) -> Status {
        match role {
            Role::Proponent => Status::ProponentWins,
            Role::Opponent => Status::OpponentWins,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogueConfig {
    #[serde(default = "default_first")]
    pub first_mover: Role,
    /// Stop the exchange once the line is this deep (3 gives strict
    /// claim-challenge-answer). `None` lets the players continue.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
}

fn default_first() -> Role {
    Role::Proponent
}

impl Default for DialogueConfig {
    fn default() -> Self {
        DialogueConfig { first_mover: Role::Proponent, max_depth: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineEntry {
    pub role: Role,
    pub instance: InstanceId,
    #[serde(rename = "move")]
    pub mv: Move,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryItem {
    pub ply: usize,
    pub role: Role,
    #[serde(rename = "move")]
    pub mv: Move,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DialogueError {
    #[error("the dialogue is over")]
    Terminal,
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("unknown case {0}")]
    UnknownCase(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dialogue {
    pub session: String,
    pub case: CaseId,
    pub target: Literal,
    pub config: DialogueConfig,
    pub turn: Role,
    pub status: Status,
    pub history: Vec<HistoryItem>,
    pub commitments: BTreeMap<Role, BTreeSet<Literal>>,
    pub retracted: BTreeMap<Role, Vec<Literal>>,
    pub line: Vec<LineEntry>,
    used: BTreeSet<InstanceId>,
    graph: ArgumentGraph,
    case_factors: BTreeSet<FactorId>,
    precedent_factors: BTreeMap<CaseId, BTreeSet<FactorId>>,
}

const ASK: &str = "ask:";

impl Dialogue {
    pub fn new(
        kb: &KnowledgeBase,
        session: impl Into<String>,
        case: &str,
        target: Literal,
        config: DialogueConfig,
    ) -> Result<Self, DialogueError> {
        let record = kb.case(case).ok_or_else(|| DialogueError::UnknownCase(case.to_string()))?;
        let built = build_case(kb, record, &BTreeMap::new())?;
        let precedent_factors = kb.precedents(&record.id).map(|p| (p.id.clone(), p.factors.clone())).collect();
        Ok(Dialogue {
            session: session.into(),
            case: record.id.clone(),
            target,
            turn: config.first_mover,
            config,
            status: Status::Open,
            history: Vec::new(),
            commitments: [(Role::Proponent, BTreeSet::new()), (Role::Opponent, BTreeSet::new())].into(),
            retracted: [(Role::Proponent, Vec::new()), (Role::Opponent, Vec::new())].into(),
            line: Vec::new(),
            used: BTreeSet::new(),
            graph: built.graph,
            case_factors: built.case.factors,
            precedent_factors,
        })
    }

    /// Rebuilds a dialogue by playing `moves` from the start.
    pub fn replay(
        kb: &KnowledgeBase,
        session: impl Into<String>,
        case: &str,
        target: Literal,
        config: DialogueConfig,
        moves: &[Move],
    ) -> Result<Self, DialogueError> {
        let mut d = Dialogue::new(kb, session, case, target, config)?;
        for m in moves {
            d.apply_mut(m)?;
        }
        Ok(d)
    }

    /// The session graph: the case's graph plus what the players added.
    pub fn graph(&self) -> &ArgumentGraph {
        &self.graph
    }

    fn substantive_moves(&self, role: Role) -> Vec<Move> {
        let mut out = Vec::new();
        let Some(last) = self.line.last() else {
            if role == Role::Proponent {
                for inst in self.graph.concluding(&self.target) {
                    if self.used.contains(&inst.id) {
                        continue;
                    }
                    let kind = if inst.scheme == SchemeKind::Citation { MoveKind::Cite } else { MoveKind::Claim };
                    out.push(Move::new(kind).with_instance(inst.id.as_str()));
                }
            }
            return out;
        };
        if last.role == role || self.config.max_depth.is_some_and(|n| self.line.len() >= n) {
            return out;
        }
        let target = last.instance.clone();

        for a in self.graph.attackers_of(&target) {
            if self.used.contains(&a.from) || self.line.iter().any(|e| e.instance == a.from) {
                continue;
            }
            let Some(inst) = self.graph.instance(&a.from) else { continue };
            let factor = inst.binding("factor").map(FactorId::new);
            let kind = match (inst.scheme, &inst.conclusion) {
                (SchemeKind::Citation | SchemeKind::Knockout, _) => MoveKind::Counterexample,
                (SchemeKind::Distinction, _) => MoveKind::Distinguish,
                (SchemeKind::Downplay, _) => MoveKind::Downplay,
                (SchemeKind::Objection, _) => MoveKind::PoseCq,
                (_, Literal::FactorAbsent { .. }) => MoveKind::DisputeFactor,
                (_, Literal::FactorPresent { .. }) => MoveKind::AddFactor,
                _ => continue,
            };
            out.push(Move {
                kind,
                instance: Some(a.from.clone()),
                question: Some(a.cq),
                factor: inst.conclusion.factor().cloned().or(factor),
                target: Some(target.clone()),
            });
        }

        if target.as_str().starts_with(ASK) {
            let inst = self.graph.instance(&target).expect("asked question is in the graph");
            let label = match &inst.conclusion {
                Literal::Challenge { question, .. } => *question,
                _ => unreachable!("questions conclude challenges"),
            };
            if label.disputes_factor() {
                if let Some(f) = inst.binding("factor") {
                    let lit = Literal::FactorPresent { factor: FactorId::new(f) };
                    for support in self.graph.concluding(&lit) {
                        if support.scheme.is_ascription() && !self.used.contains(&support.id) {
                            out.push(Move {
                                kind: MoveKind::AddFactor,
                                instance: Some(support.id.clone()),
                                question: Some(label),
                                factor: Some(FactorId::new(f)),
                                target: Some(target.clone()),
                            });
                        }
                    }
                }
            } else {
                let answer = answer_id(&target);
                if !self.used.contains(&answer) {
                    out.push(Move {
                        kind: MoveKind::AnswerCq,
                        instance: Some(answer),
                        question: Some(label),
                        factor: None,
                        target: Some(target.clone()),
                    });
                }
            }
        } else if let Some(inst) = self.graph.instance(&target) {
            for q in inst.open_questions() {
                let id = ask_id(q.label, &target, q.factor.as_ref());
                if self.used.contains(&id) {
                    continue;
                }
                let kind = if q.label.disputes_factor() { MoveKind::DisputeFactor } else { MoveKind::PoseCq };
                out.push(Move {
                    kind,
                    instance: Some(id),
                    question: Some(q.label),
                    factor: q.factor.clone(),
                    target: Some(target.clone()),
                });
            }
        }
        out
    }

    /// Every move the player to move may make now.
    pub fn legal_moves(&self) -> Result<Vec<Move>, DialogueError> {
        if self.status != Status::Open {
            return Err(DialogueError::Terminal);
        }
        let mut out = self.substantive_moves(self.turn);
        if self.line.iter().any(|e| e.role == self.turn) {
            out.push(Move::retract());
        }
        out.push(Move::concede());
        Ok(out)
    }

    pub fn apply(&self, mv: &Move) -> Result<Dialogue, DialogueError> {
        let mut next = self.clone();
        next.apply_mut(mv)?;
        Ok(next)
    }

    pub fn apply_mut(&mut self, mv: &Move) -> Result<(), DialogueError> {
        let legal = self.legal_moves()?;
        let Some(chosen) = legal.iter().find(|l| mv.matches(l)).cloned() else {
            return Err(DialogueError::IllegalMove(self.why_illegal(mv)));
        };
        let role = self.turn;
        self.history.push(HistoryItem { ply: self.history.len() + 1, role, mv: chosen.clone() });
        match chosen.kind {
            MoveKind::Concede => {
                self.status = Status::win_for(role.other());
                return Ok(());
            }
            MoveKind::Retract => {
                let pos = self.line.iter().rposition(|e| e.role == role).expect("retract needs a live entry");
                for e in self.line.drain(pos..) {
                    if e.role == role {
                        if let Some(i) = self.graph.instance(&e.instance) {
                            self.retracted.get_mut(&role).unwrap().push(i.conclusion.clone());
                        }
                    }
                }
            }
            _ => {
                let id = chosen.instance.clone().expect("substantive moves name an instance");
                if !self.graph.contains(&id) {
                    self.add_synthesised(&chosen, &id);
                } else if let Some(target) = &chosen.target {
                    if target.as_str().starts_with(ASK) {
                        self.graph.attack(Attack::new(&id, target, CqLabel::Rebuttal));
                        self.graph.relabel();
                    }
                }
                self.used.insert(id.clone());
                let lit = self.graph.instance(&id).unwrap().conclusion.clone();
                self.commitments.get_mut(&role).unwrap().insert(lit);
                self.line.push(LineEntry { role, instance: id, mv: chosen });
                self.turn = role.other();
            }
        }
        if self.substantive_moves(self.turn).is_empty() {
            self.status = Status::win_for(self.turn.other());
        }
        Ok(())
    }

    fn add_synthesised(&mut self, mv: &Move, id: &InstanceId) {
        let target = mv.target.clone().expect("synthesised moves reply to something");
        let label = mv.question.expect("synthesised moves carry a question");
        let inst = match mv.kind {
            MoveKind::AnswerCq => SchemeInstance::new(
                id.as_str(),
                SchemeKind::Objection,
                Literal::Challenge { question: label, target: target.clone() },
            )
            .bind("target", &target)
            .premise(format!("the {} answers {label}", self.turn)),
            _ => {
                let mut i = SchemeInstance::new(
                    id.as_str(),
                    SchemeKind::Objection,
                    Literal::Challenge { question: label, target: target.clone() },
                )
                .bind("question", label)
                .bind("target", &target)
                .premise(format!("the {} asks {label}", self.turn));
                if let Some(f) = &mv.factor {
                    i = i.bind("factor", f);
                }
                i
            }
        };
        self.graph.add(inst);
        let cq = if mv.kind == MoveKind::AnswerCq { CqLabel::Rebuttal } else { label };
        self.graph.attack(Attack::new(id, &target, cq));
        self.graph.relabel();
    }

    fn why_illegal(&self, mv: &Move) -> String {
        if mv.kind == MoveKind::Distinguish {
            if let (Some(f), Some(last)) = (&mv.factor, self.line.last()) {
                let prec = self.graph.instance(&last.instance).and_then(|i| i.binding("precedent"));
                if let Some(pf) = prec.and_then(|p| self.precedent_factors.get(p)) {
                    if pf.contains(f) && self.case_factors.contains(f) {
                        return format!("factor present in both cases: {f}");
                    }
                }
            }
        }
        match self.line.last() {
            Some(last) => {
                format!("no legal {} move for the {} replies to {}", mv.kind.as_str(), self.turn, last.instance)
            }
            None => format!("no legal {} move for the {} opens the dialogue", mv.kind.as_str(), self.turn),
        }
    }

    /// The move the engine makes when it plays the side to move: the first
    /// legal move in the order cite, claim, answer, add a factor, downplay,
    /// counterexample, distinguish, dispute a factor, pose a grounded
    /// question, concede.
    pub fn engine_move(&self) -> Option<Move> {
        let legal = self.legal_moves().ok()?;
        let rank = |m: &Move| match m.kind {
            MoveKind::Cite => 0,
            MoveKind::Claim => 1,
            MoveKind::AnswerCq => 2,
            MoveKind::AddFactor => 3,
            MoveKind::Downplay => 4,
            MoveKind::Counterexample => 5,
            MoveKind::Distinguish => 6,
            MoveKind::DisputeFactor if !is_asked(m) => 7,
            MoveKind::PoseCq if !is_asked(m) => 8,
            MoveKind::Concede => 9,
            _ => 99,
        };
        legal.into_iter().filter(|m| rank(m) < 99).min_by_key(rank)
    }

    pub fn view(&self) -> DialogueView {
        DialogueView {
            session: self.session.clone(),
            case: self.case.clone(),
            target: self.target.clone(),
            turn: self.turn,
            status: self.status,
            config: self.config.clone(),
            history: self.history.clone(),
            commitments: self.commitments.clone(),
            retracted: self.retracted.clone(),
            line: self.line.clone(),
            legal_moves: self
                .legal_moves()
                .unwrap_or_default()
                .into_iter()
                .map(|m| LegalMove { description: m.describe(), mv: m })
                .collect(),
            graph: self.graph.export(),
        }
    }

    pub fn transcript(&self) -> Transcript {
        Transcript {
            session: self.session.clone(),
            case: self.case.clone(),
            target: self.target.clone(),
            status: self.status,
            moves: self
                .history
                .iter()
                .map(|h| TranscriptEntry {
                    ply: h.ply,
                    role: h.role,
                    mv: h.mv.clone(),
                    instance: h.mv.instance.as_ref().and_then(|i| self.graph.instance(i)).cloned(),
                    label: h.mv.instance.as_ref().and_then(|i| self.graph.label(i)),
                })
                .collect(),
            commitments: self.commitments.clone(),
        }
    }
}

fn is_asked(m: &Move) -> bool {
    m.instance.as_ref().is_some_and(|i| i.as_str().starts_with(ASK))
}

fn ask_id(label: CqLabel, target: &InstanceId, factor: Option<&FactorId>) -> InstanceId {
    match factor {
        Some(f) => InstanceId::new(format!("{ASK}{label}:{target}:{f}")),
        None => InstanceId::new(format!("{ASK}{label}:{target}")),
    }
}

fn answer_id(asked: &InstanceId) -> InstanceId {
    InstanceId::new(format!("answer:{asked}"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegalMove {
    #[serde(flatten)]
    pub mv: Move,
    pub description: String,
}

/// A session as clients see it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogueView {
    pub session: String,
    pub case: CaseId,
    pub target: Literal,
    pub turn: Role,
    pub status: Status,
    pub config: DialogueConfig,
    pub history: Vec<HistoryItem>,
    pub commitments: BTreeMap<Role, BTreeSet<Literal>>,
    pub retracted: BTreeMap<Role, Vec<Literal>>,
    pub line: Vec<LineEntry>,
    pub legal_moves: Vec<LegalMove>,
    pub graph: GraphExport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub ply: usize,
    pub role: Role,
    #[serde(rename = "move")]
    pub mv: Move,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<SchemeInstance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
}

/// Ordered move list with the arguments each move put forward.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub session: String,
    pub case: CaseId,
    pub target: Literal,
    pub status: Status,
    pub moves: Vec<TranscriptEntry>,
    pub commitments: BTreeMap<Role, BTreeSet<Literal>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Party;
    use crate::kb::trade_secrets;

    fn restricted() -> Dialogue {
        let kb = trade_secrets();
        let target = Literal::issue("SecrecyMaintained", Party::Plaintiff);
        Dialogue::new(&kb, "s", "restricted", target, DialogueConfig::default()).unwrap()
    }

    #[test]
    fn opponent_first_can_only_concede() {
        let kb = trade_secrets();
        let target = Literal::issue("SecrecyMaintained", Party::Plaintiff);
        let cfg = DialogueConfig { first_mover: Role::Opponent, max_depth: None };
        let d = Dialogue::new(&kb, "s", "restricted", target, cfg).unwrap();
        assert_eq!(d.legal_moves().unwrap(), vec![Move::concede()]);
    }

    #[test]
    fn downplay_answers_the_distinction() {
        let mut d = restricted();
        d.apply_mut(&Move::new(MoveKind::Cite)).unwrap();
        d.apply_mut(&Move::new(MoveKind::Distinguish).with_factor("F10d")).unwrap();
        assert_eq!(d.turn, Role::Proponent);
        d.apply_mut(&Move::new(MoveKind::Downplay)).unwrap();
        assert_eq!(d.status, Status::ProponentWins);
    }

    #[test]
    fn retract_pops_own_entry_and_keeps_the_turn() {
        let mut d = restricted();
        d.apply_mut(&Move::new(MoveKind::Cite)).unwrap();
        d.apply_mut(&Move::new(MoveKind::Distinguish).with_factor("F10d")).unwrap();
        d.apply_mut(&Move::retract()).unwrap();
        assert!(d.line.is_empty());
        assert_eq!(d.retracted[&Role::Proponent], vec![d.target.clone()]);
        assert!(d.commitments[&Role::Proponent].contains(&d.target));
        if d.status == Status::Open {
            assert_eq!(d.turn, Role::Proponent);
        }
    }

    #[test]
    fn shared_factor_cannot_distinguish() {
        let mut d = restricted();
        d.apply_mut(&Move::new(MoveKind::Cite).with_instance("cite:bryce:SecrecyMaintained")).unwrap();
        let err = d.apply_mut(&Move::new(MoveKind::Distinguish).with_factor("F6p")).unwrap_err();
        assert!(err.to_string().contains("factor present in both cases"), "{err}");
    }

    #[test]
    fn terminal_dialogue_rejects_moves() {
        let mut d = restricted();
        d.apply_mut(&Move::concede()).unwrap();
        assert_eq!(d.status, Status::OpponentWins);
        assert_eq!(d.apply_mut(&Move::concede()), Err(DialogueError::Terminal));
    }
}
