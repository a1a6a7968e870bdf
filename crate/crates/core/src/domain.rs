//! Core vocabulary: factors, issues, dimensions, the strict rule model and
//! case records. Everything here is plain data; [`validate_domain`] checks
//! the cross-entity invariants.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::magnitude::Magnitude;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                $name(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{:?}", self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

pub(crate) use string_id;

string_id!(
    /// Short factor code such as `F6p`.
    FactorId
);
string_id!(IssueId);
string_id!(DimensionId);
string_id!(CaseId);
string_id!(
    /// An opaque, labelled proposition about a case.
    FactAtom
);
string_id!(
    /// Identifier of a meaning rule or of a strict rule in the rule model.
    RuleId
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Plaintiff,
    Defendant,
}

impl Party {
    pub fn opposite(self) -> Party {
        match self {
            Party::Plaintiff => Party::Defendant,
            Party::Defendant => Party::Plaintiff,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Party::Plaintiff => "plaintiff",
            Party::Defendant => "defendant",
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Party {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plaintiff" => Ok(Party::Plaintiff),
            "defendant" => Ok(Party::Defendant),
            other => Err(format!("unknown party {other:?}")),
        }
    }
}

/// How an issue stands in a case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Resolution {
    Plaintiff,
    Defendant,
    #[default]
    Open,
}

impl Resolution {
    pub fn party(self) -> Option<Party> {
        match self {
            Resolution::Plaintiff => Some(Party::Plaintiff),
            Resolution::Defendant => Some(Party::Defendant),
            Resolution::Open => None,
        }
    }

    pub fn mirrored(self) -> Resolution {
        match self {
            Resolution::Plaintiff => Resolution::Defendant,
            Resolution::Defendant => Resolution::Plaintiff,
            Resolution::Open => Resolution::Open,
        }
    }
}

impl From<Party> for Resolution {
    fn from(p: Party) -> Self {
        match p {
            Party::Plaintiff => Resolution::Plaintiff,
            Party::Defendant => Resolution::Defendant,
        }
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolution::Open => f.write_str("open"),
            other => f.write_str(other.party().unwrap().as_str()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Plaintiff,
    Defendant,
    #[default]
    Undecided,
}

impl Outcome {
    pub fn party(self) -> Option<Party> {
        match self {
            Outcome::Plaintiff => Some(Party::Plaintiff),
            Outcome::Defendant => Some(Party::Defendant),
            Outcome::Undecided => None,
        }
    }

    pub fn mirrored(self) -> Outcome {
        match self {
            Outcome::Plaintiff => Outcome::Defendant,
            Outcome::Defendant => Outcome::Plaintiff,
            Outcome::Undecided => Outcome::Undecided,
        }
    }
}

impl From<Party> for Outcome {
    fn from(p: Party) -> Self {
        match p {
            Party::Plaintiff => Outcome::Plaintiff,
            Party::Defendant => Outcome::Defendant,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Undecided => f.write_str("undecided"),
            other => f.write_str(other.party().unwrap().as_str()),
        }
    }
}

/// Where a dimension-derived factor comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorOrigin {
    pub dimension: DimensionId,
    /// Free-text description of the factor's region, e.g. "many recipients".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub id: FactorId,
    pub label: String,
    pub polarity: Party,
    /// Primary issue. Issue factor sets are the authoritative many-to-many map.
    pub issue: IssueId,
    #[serde(default)]
    pub knockout: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<FactorOrigin>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub id: IssueId,
    pub label: String,
    #[serde(default)]
    pub plaintiff_factors: BTreeSet<FactorId>,
    #[serde(default)]
    pub defendant_factors: BTreeSet<FactorId>,
}

impl Issue {
    pub fn factors_for(&self, party: Party) -> &BTreeSet<FactorId> {
        match party {
            Party::Plaintiff => &self.plaintiff_factors,
            Party::Defendant => &self.defendant_factors,
        }
    }

    pub fn contains(&self, factor: &FactorId) -> bool {
        self.plaintiff_factors.contains(factor) || self.defendant_factors.contains(factor)
    }

    pub fn has_factors(&self) -> bool {
        !self.plaintiff_factors.is_empty() || !self.defendant_factors.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionKind {
    Boolean,
    Scalar,
    /// A trade-off between two scalar dimensions, `axes[0]` being the first coordinate.
    Paired {
        axes: [DimensionId; 2],
    },
}

/// One factor's region along a dimension. Regions are listed in ascending
/// axis order; `bound` is the nominal switching point when known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorRegion {
    pub factor: FactorId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<Magnitude>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimension {
    pub id: DimensionId,
    pub label: String,
    pub kind: DimensionKind,
    #[serde(default)]
    pub unit: String,
    /// The party favoured by larger values (by `true` for booleans).
    pub high_end_favors: Party,
    #[serde(default)]
    pub factor_regions: Vec<FactorRegion>,
}

impl Dimension {
    /// Position of `location` measured in the direction that favours `party`:
    /// larger is more favourable. Pair locations have no single ordering.
    pub fn favourability(&self, party: Party, location: &Location) -> Option<Magnitude> {
        let raw = match (&self.kind, location) {
            (DimensionKind::Scalar, Location::Scalar(x)) => x.clone(),
            (DimensionKind::Boolean, Location::Boolean(b)) => Magnitude::from_integer(*b as i64),
            _ => return None,
        };
        Some(if party == self.high_end_favors { raw } else { -raw })
    }

    pub fn region_index(&self, factor: &FactorId) -> Option<usize> {
        self.factor_regions.iter().position(|r| &r.factor == factor)
    }
}

/// A case's value on one dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Location {
    Boolean(bool),
    Scalar(Magnitude),
    Pair(Magnitude, Magnitude),
}

impl Location {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Location::Boolean(_) => "boolean",
            Location::Scalar(_) => "scalar",
            Location::Pair(..) => "pair",
        }
    }

    pub fn fits(&self, kind: &DimensionKind) -> bool {
        matches!(
            (self, kind),
            (Location::Boolean(_), DimensionKind::Boolean)
                | (Location::Scalar(_), DimensionKind::Scalar)
                | (Location::Pair(..), DimensionKind::Paired { .. })
        )
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Boolean(b) => write!(f, "{b}"),
            Location::Scalar(x) => write!(f, "{x}"),
            Location::Pair(x, y) => write!(f, "({x}, {y})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub id: CaseId,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub facts: BTreeSet<FactAtom>,
    #[serde(default)]
    pub locations: BTreeMap<DimensionId, Location>,
    /// Factors ascribed to the case as given.
    #[serde(default)]
    pub factors: BTreeSet<FactorId>,
    #[serde(default)]
    pub issue_resolutions: BTreeMap<IssueId, Resolution>,
    #[serde(default)]
    pub outcome: Outcome,
}

impl CaseRecord {
    pub fn new(id: impl Into<String>) -> Self {
        CaseRecord {
            id: CaseId::new(id),
            title: String::new(),
            facts: BTreeSet::new(),
            locations: BTreeMap::new(),
            factors: BTreeSet::new(),
            issue_resolutions: BTreeMap::new(),
            outcome: Outcome::Undecided,
        }
    }

    pub fn with_factors<I, S>(mut self, factors: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.factors.extend(factors.into_iter().map(|f| FactorId::new(f)));
        self
    }

    pub fn with_facts<I, S>(mut self, facts: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.facts.extend(facts.into_iter().map(|f| FactAtom::new(f)));
        self
    }

    pub fn with_location(mut self, dim: &str, location: Location) -> Self {
        self.locations.insert(DimensionId::new(dim), location);
        self
    }

    pub fn with_resolution(mut self, issue: &str, resolution: Resolution) -> Self {
        self.issue_resolutions.insert(IssueId::new(issue), resolution);
        self
    }

    pub fn resolution(&self, issue: &IssueId) -> Resolution {
        self.issue_resolutions.get(issue).copied().unwrap_or_default()
    }

    /// A case that can be cited: it resolved some issue or was decided.
    pub fn is_precedent(&self) -> bool {
        self.outcome != Outcome::Undecided || self.issue_resolutions.values().any(|r| *r != Resolution::Open)
    }

    pub fn has_factor(&self, factor: &FactorId) -> bool {
        self.factors.contains(factor)
    }

    pub fn scalar(&self, dim: &DimensionId) -> Option<&Magnitude> {
        match self.locations.get(dim) {
            Some(Location::Scalar(x)) => Some(x),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeaningRule {
    pub id: RuleId,
    pub factor: FactorId,
    pub sufficient_facts: BTreeSet<FactAtom>,
    #[serde(default)]
    pub exceptions: BTreeSet<FactAtom>,
    #[serde(default)]
    pub incompatible_with: BTreeSet<FactorId>,
}

/// A node in the AND/OR tree of the strict rule model. Composite nodes may
/// carry a name (e.g. `TradeSecret`) so that strict rules can refer to them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleNode {
    Issue(IssueId),
    All {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        of: Vec<RuleNode>,
    },
    Any {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        of: Vec<RuleNode>,
    },
}

impl RuleNode {
    pub fn name(&self) -> Option<&str> {
        match self {
            RuleNode::Issue(id) => Some(id.as_str()),
            RuleNode::All { name, .. } | RuleNode::Any { name, .. } => name.as_deref(),
        }
    }

    pub fn children(&self) -> &[RuleNode] {
        match self {
            RuleNode::Issue(_) => &[],
            RuleNode::All { of, .. } | RuleNode::Any { of, .. } => of,
        }
    }

    /// Leaf issue ids in left-to-right order, without duplicates.
    pub fn leaves(&self) -> Vec<IssueId> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<IssueId>) {
        match self {
            RuleNode::Issue(id) => {
                if !out.contains(id) {
                    out.push(id.clone());
                }
            }
            _ => self.children().iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn find(&self, name: &str) -> Option<&RuleNode> {
        if self.name() == Some(name) {
            return Some(self);
        }
        self.children().iter().find_map(|c| c.find(name))
    }

    /// Every name (leaf issue or named composite) occurring in this subtree.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        if let Some(n) = self.name() {
            out.insert(n.to_string());
        }
        self.children().iter().for_each(|c| c.collect_names(out));
    }
}

/// Head of a strict rule: either the outcome or a named node of the tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleHead {
    Outcome(Party),
    Node(String),
}

impl fmt::Display for RuleHead {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleHead::Outcome(p) => write!(f, "{p} wins"),
            RuleHead::Node(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrictRule {
    pub id: RuleId,
    /// Names of tree nodes: leaf issue ids or named composites.
    pub premises: Vec<String>,
    pub conclusion: RuleHead,
    /// Issues that defeat the rule when they are satisfied against its conclusion.
    #[serde(default)]
    pub exceptions: Vec<IssueId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleModel {
    /// The party that wins when the root holds.
    pub outcome: Party,
    pub root: RuleNode,
    #[serde(default)]
    pub rules: Vec<StrictRule>,
}

impl RuleModel {
    pub fn leaves(&self) -> Vec<IssueId> {
        self.root.leaves()
    }

    pub fn rule(&self, id: &RuleId) -> Option<&StrictRule> {
        self.rules.iter().find(|r| &r.id == id)
    }

    /// The strict rule whose head is the outcome.
    pub fn outcome_rule(&self) -> Option<&StrictRule> {
        self.rules.iter().find(|r| r.conclusion == RuleHead::Outcome(self.outcome))
    }

    /// Subtree a rule head stands for.
    pub fn head_node(&self, head: &RuleHead) -> Option<&RuleNode> {
        match head {
            RuleHead::Outcome(p) if *p == self.outcome => Some(&self.root),
            RuleHead::Outcome(_) => None,
            RuleHead::Node(n) => self.root.find(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainModel {
    pub issues: IndexMap<IssueId, Issue>,
    pub factors: IndexMap<FactorId, Factor>,
    pub dimensions: IndexMap<DimensionId, Dimension>,
    pub rule_model: RuleModel,
    pub meaning_rules: IndexMap<RuleId, MeaningRule>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DomainError {
    #[error("unknown issue {0}")]
    UnknownIssue(IssueId),
    #[error("unknown factor {0}")]
    UnknownFactor(FactorId),
    #[error("unknown dimension {0}")]
    UnknownDimension(DimensionId),
}

impl DomainModel {
    pub fn issue(&self, id: &str) -> Result<&Issue, DomainError> {
        self.issues.get(id).ok_or_else(|| DomainError::UnknownIssue(IssueId::new(id)))
    }

    pub fn factor(&self, id: &str) -> Result<&Factor, DomainError> {
        self.factors.get(id).ok_or_else(|| DomainError::UnknownFactor(FactorId::new(id)))
    }

    pub fn dimension(&self, id: &str) -> Result<&Dimension, DomainError> {
        self.dimensions.get(id).ok_or_else(|| DomainError::UnknownDimension(DimensionId::new(id)))
    }

    /// Issues whose factor sets list `factor`, in catalogue order.
    pub fn issues_of(&self, factor: &FactorId) -> impl Iterator<Item = &Issue> + '_ {
        let factor = factor.clone();
        self.issues.values().filter(move |i| i.contains(&factor))
    }

    /// The case's factors relevant to `issue`, split by the party they favour.
    pub fn factors_for_issue(
        &self,
        case: &CaseRecord,
        issue: &IssueId,
    ) -> Result<(BTreeSet<FactorId>, BTreeSet<FactorId>), DomainError> {
        let issue = self.issue(issue.as_str())?;
        Ok(split_for_issue(issue, &case.factors))
    }

    /// Dimensions whose regions mention `factor`.
    pub fn dimensions_of(&self, factor: &FactorId) -> impl Iterator<Item = &Dimension> + '_ {
        let factor = factor.clone();
        self.dimensions.values().filter(move |d| d.region_index(&factor).is_some())
    }
}

/// Intersects `factors` with the issue's two factor sets.
pub fn split_for_issue(issue: &Issue, factors: &BTreeSet<FactorId>) -> (BTreeSet<FactorId>, BTreeSet<FactorId>) {
    (
        issue.plaintiff_factors.intersection(factors).cloned().collect(),
        issue.defendant_factors.intersection(factors).cloned().collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    DanglingReference,
    PolarityMismatch,
    OverlappingIssueSets,
    UnlistedFactor,
    KnockoutIssueCount,
    SuffixPolarity,
    BooleanRegionCount,
    RegionOrder,
    PairedAxes,
    OriginMismatch,
    RuleModel,
    IncompatibilityAsymmetric,
    EmptyMeaningRule,
    LocationKind,
    InvalidAssertion,
}

/// One broken invariant, naming the offending entity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub entity: String,
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{:?}]: {}", self.entity, self.kind, self.detail)
    }
}

fn cato_suffix(id: &str) -> Option<Party> {
    let body = id.strip_prefix('F')?;
    let (digits, suffix) = body.split_at(body.len().checked_sub(1)?);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    match suffix {
        "p" => Some(Party::Plaintiff),
        "d" => Some(Party::Defendant),
        _ => None,
    }
}

/// Checks every cross-entity invariant of the model. An empty list means the
/// model is consistent.
pub fn validate_domain(model: &DomainModel) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |entity: String, kind: ViolationKind, detail: String| out.push(Violation { entity, kind, detail });

    for factor in model.factors.values() {
        let entity = format!("factor {}", factor.id);
        match model.issues.get(&factor.issue) {
            None => {
                push(entity.clone(), ViolationKind::DanglingReference, format!("issue {} does not exist", factor.issue))
            }
            Some(issue) if !issue.contains(&factor.id) => {
                push(entity.clone(), ViolationKind::UnlistedFactor, format!("not listed under its issue {}", issue.id))
            }
            Some(_) => {}
        }
        if let Some(suffix) = cato_suffix(factor.id.as_str()) {
            if suffix != factor.polarity {
                push(
                    entity.clone(),
                    ViolationKind::SuffixPolarity,
                    format!("id suffix implies {suffix}, polarity is {}", factor.polarity),
                );
            }
        }
        if factor.knockout {
            let n = model.issues_of(&factor.id).count();
            if n != 1 {
                push(
                    entity.clone(),
                    ViolationKind::KnockoutIssueCount,
                    format!("knockout factor listed under {n} issues"),
                );
            }
        }
        if let Some(origin) = &factor.origin {
            match model.dimensions.get(&origin.dimension) {
                None => push(
                    entity.clone(),
                    ViolationKind::DanglingReference,
                    format!("dimension {} does not exist", origin.dimension),
                ),
                Some(dim) if dim.region_index(&factor.id).is_none() => push(
                    entity.clone(),
                    ViolationKind::OriginMismatch,
                    format!("dimension {} has no region for it", dim.id),
                ),
                Some(_) => {}
            }
        }
    }

    for issue in model.issues.values() {
        let entity = format!("issue {}", issue.id);
        for shared in issue.plaintiff_factors.intersection(&issue.defendant_factors) {
            push(entity.clone(), ViolationKind::OverlappingIssueSets, format!("{shared} listed for both parties"));
        }
        for party in [Party::Plaintiff, Party::Defendant] {
            for fid in issue.factors_for(party) {
                match model.factors.get(fid) {
                    None => {
                        push(entity.clone(), ViolationKind::DanglingReference, format!("factor {fid} does not exist"))
                    }
                    Some(f) if f.polarity != party => push(
                        entity.clone(),
                        ViolationKind::PolarityMismatch,
                        format!("{fid} favours the {} but is listed for the {party}", f.polarity),
                    ),
                    Some(_) => {}
                }
            }
        }
    }

    for dim in model.dimensions.values() {
        let entity = format!("dimension {}", dim.id);
        for region in &dim.factor_regions {
            if !model.factors.contains_key(&region.factor) {
                push(
                    entity.clone(),
                    ViolationKind::DanglingReference,
                    format!("factor {} does not exist", region.factor),
                );
            }
        }
        match &dim.kind {
            DimensionKind::Boolean if dim.factor_regions.len() != 1 => push(
                entity.clone(),
                ViolationKind::BooleanRegionCount,
                format!("boolean dimension has {} regions", dim.factor_regions.len()),
            ),
            DimensionKind::Scalar => {
                let bounds: Vec<&Magnitude> = dim.factor_regions.iter().filter_map(|r| r.bound.as_ref()).collect();
                if bounds.windows(2).any(|w| w[0] >= w[1]) {
                    push(
                        entity.clone(),
                        ViolationKind::RegionOrder,
                        "region bounds are not strictly increasing".into(),
                    );
                }
            }
            DimensionKind::Paired { axes } => {
                for axis in axes {
                    match model.dimensions.get(axis) {
                        None => push(
                            entity.clone(),
                            ViolationKind::DanglingReference,
                            format!("axis {axis} does not exist"),
                        ),
                        Some(d) if d.kind != DimensionKind::Scalar => {
                            push(entity.clone(), ViolationKind::PairedAxes, format!("axis {axis} is not scalar"))
                        }
                        Some(_) => {}
                    }
                }
                if axes[0] == axes[1] {
                    push(entity.clone(), ViolationKind::PairedAxes, "axes coincide".into());
                }
            }
            _ => {}
        }
    }

    validate_rule_model(model, &mut push);

    for rule in model.meaning_rules.values() {
        let entity = format!("meaning rule {}", rule.id);
        if !model.factors.contains_key(&rule.factor) {
            push(entity.clone(), ViolationKind::DanglingReference, format!("factor {} does not exist", rule.factor));
        }
        if rule.sufficient_facts.is_empty() {
            push(entity.clone(), ViolationKind::EmptyMeaningRule, "no sufficient facts".into());
        }
        for other in &rule.incompatible_with {
            if !model.factors.contains_key(other) {
                push(entity.clone(), ViolationKind::DanglingReference, format!("factor {other} does not exist"));
                continue;
            }
            let symmetric =
                model.meaning_rules.values().any(|r| &r.factor == other && r.incompatible_with.contains(&rule.factor));
            if !symmetric {
                push(
                    entity.clone(),
                    ViolationKind::IncompatibilityAsymmetric,
                    format!("no rule for {other} lists {} as incompatible", rule.factor),
                );
            }
        }
    }

    out
}

fn validate_rule_model(model: &DomainModel, push: &mut impl FnMut(String, ViolationKind, String)) {
    let rm = &model.rule_model;
    for leaf in rm.leaves() {
        if !model.issues.contains_key(&leaf) {
            push("rule model".into(), ViolationKind::DanglingReference, format!("leaf issue {leaf} does not exist"));
        }
    }
    let names = rm.root.names();
    for rule in &rm.rules {
        let entity = format!("rule {}", rule.id);
        for p in &rule.premises {
            if !names.contains(p) {
                push(entity.clone(), ViolationKind::DanglingReference, format!("premise {p} is not in the rule tree"));
            }
        }
        if rm.head_node(&rule.conclusion).is_none() {
            push(
                entity.clone(),
                ViolationKind::RuleModel,
                format!("conclusion {} is not a node of the rule tree", rule.conclusion),
            );
        }
        for e in &rule.exceptions {
            if !model.issues.contains_key(e) {
                push(entity.clone(), ViolationKind::DanglingReference, format!("exception issue {e} does not exist"));
            }
        }
    }
    if !rm.rules.is_empty() && rm.outcome_rule().is_none() {
        push("rule model".into(), ViolationKind::RuleModel, format!("no rule concludes that the {} wins", rm.outcome));
    }
}
