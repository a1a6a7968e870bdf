//! Reasoning with legal cases in three chained stages: ascribing factors from
//! facts and dimensions, resolving issues from factors against precedents,
//! and deriving the outcome from issues through strict rules.
//!
//! Every inference is a [`scheme::SchemeInstance`] that can be attacked through
//! the critical questions of its scheme. [`engine::build_graph`] assembles all
//! of them for one case and labels the result with grounded semantics;
//! [`dialogue`] lets a person argue over the same material move by move.

pub mod analysis;
pub mod ascription;
pub mod dialogue;
pub mod domain;
pub mod engine;
pub mod kb;
pub mod magnitude;
pub mod outcome;
pub mod resolution;
pub mod scheme;

pub use domain::{
    CaseId, CaseRecord, Dimension, DimensionId, DimensionKind, DomainModel, FactAtom, Factor, FactorId, Issue, IssueId,
    Location, Outcome, Party, Resolution, RuleId,
};
pub use kb::{parse_kb, serialize_kb, KbError, KnowledgeBase};
pub use magnitude::Magnitude;
pub use scheme::{Attack, AttackKind, CqLabel, InstanceId, Literal, SchemeInstance, SchemeKind};
