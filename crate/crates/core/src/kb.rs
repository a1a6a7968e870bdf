//! Reading and writing knowledge-base documents.
//!
//! A document is one JSON object with the keys `version`, `issues`,
//! `factors`, `dimensions`, `rule_model`, `meaning_rules`,
//! `analogy_assertions` and `cases`. Collections are arrays so that the
//! file keeps its authored order; ids must be unique within each.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::ascription::AnalogyAssertion;
use crate::domain::{
    validate_domain, CaseId, CaseRecord, Dimension, DomainModel, Factor, Issue, MeaningRule, RuleModel, Violation,
    ViolationKind,
};

pub const FORMAT_VERSION: &str = "factor-forge/1";

const TRADE_SECRETS: &str = include_str!("../data/trade_secrets.json");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub version: String,
    pub model: DomainModel,
    pub analogy_assertions: IndexMap<String, AnalogyAssertion>,
    pub cases: IndexMap<CaseId, CaseRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KbError {
    #[error("syntax error at line {line}, column {column} (offset {offset}): {message}")]
    Syntax { line: usize, column: usize, offset: usize, message: String },
    #[error("malformed document at line {line}, column {column}: {message}")]
    Shape { line: usize, column: usize, message: String },
    #[error("unsupported version {0:?}, expected {FORMAT_VERSION:?}")]
    UnsupportedVersion(String),
    #[error("duplicate {kind} id {id:?}")]
    DuplicateId { kind: &'static str, id: String },
    #[error("{entity} refers to missing {missing}")]
    DanglingReference { entity: String, missing: String },
    #[error("knowledge base is inconsistent: {}", list(.0))]
    Invalid(Vec<Violation>),
}

fn list(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

impl KbError {
    /// The violations behind the error, when it came from validation.
    pub fn violations(&self) -> &[Violation] {
        match self {
            KbError::Invalid(v) => v,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KbDocument {
    version: String,
    issues: Vec<Issue>,
    factors: Vec<Factor>,
    #[serde(default)]
    dimensions: Vec<Dimension>,
    rule_model: RuleModel,
    #[serde(default)]
    meaning_rules: Vec<MeaningRule>,
    #[serde(default)]
    analogy_assertions: Vec<AnalogyAssertion>,
    #[serde(default)]
    cases: Vec<CaseRecord>,
}

fn keyed<K, V>(kind: &'static str, items: Vec<V>, key: impl Fn(&V) -> K) -> Result<IndexMap<K, V>, KbError>
where
    K: std::hash::Hash + Eq + std::fmt::Display,
{
    let mut out = IndexMap::with_capacity(items.len());
    for item in items {
        let k = key(&item);
        if out.contains_key(&k) {
            return Err(KbError::DuplicateId { kind, id: k.to_string() });
        }
        out.insert(k, item);
    }
    Ok(out)
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let start: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

/// Parses and validates a knowledge-base document.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, KbError> {
    let doc: KbDocument = serde_json::from_str(text).map_err(|e| {
        let (line, column) = (e.line(), e.column());
        let message = e.to_string();
        match e.classify() {
            serde_json::error::Category::Data => KbError::Shape { line, column, message },
            _ => KbError::Syntax { line, column, offset: byte_offset(text, line, column), message },
        }
    })?;
    if doc.version != FORMAT_VERSION {
        return Err(KbError::UnsupportedVersion(doc.version));
    }
    let model = DomainModel {
        issues: keyed("issue", doc.issues, |i| i.id.clone())?,
        factors: keyed("factor", doc.factors, |f| f.id.clone())?,
        dimensions: keyed("dimension", doc.dimensions, |d| d.id.clone())?,
        rule_model: doc.rule_model,
        meaning_rules: keyed("meaning rule", doc.meaning_rules, |r| r.id.clone())?,
    };
    let kb = KnowledgeBase {
        version: doc.version,
        model,
        analogy_assertions: keyed("analogy assertion", doc.analogy_assertions, |a| a.id.clone())?,
        cases: keyed("case", doc.cases, |c| c.id.clone())?,
    };
    let violations = kb.validate();
    if violations.is_empty() {
        return Ok(kb);
    }
    if let Some(v) = violations.iter().find(|v| v.kind == ViolationKind::DanglingReference) {
        return Err(KbError::DanglingReference { entity: v.entity.clone(), missing: v.detail.clone() });
    }
    Err(KbError::Invalid(violations))
}

/// Writes the canonical form: pretty JSON in document order, newline-terminated.
pub fn serialize_kb(kb: &KnowledgeBase) -> String {
    let doc = KbDocument {
        version: kb.version.clone(),
        issues: kb.model.issues.values().cloned().collect(),
        factors: kb.model.factors.values().cloned().collect(),
        dimensions: kb.model.dimensions.values().cloned().collect(),
        rule_model: kb.model.rule_model.clone(),
        meaning_rules: kb.model.meaning_rules.values().cloned().collect(),
        analogy_assertions: kb.analogy_assertions.values().cloned().collect(),
        cases: kb.cases.values().cloned().collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("knowledge base serializes");
    out.push('\n');
    out
}

/// The bundled US trade secrets corpus.
pub fn trade_secrets() -> KnowledgeBase {
    parse_kb(TRADE_SECRETS).expect("bundled corpus is valid")
}

pub fn trade_secrets_source() -> &'static str {
    TRADE_SECRETS
}

impl KnowledgeBase {
    pub fn case(&self, id: &str) -> Option<&CaseRecord> {
        self.cases.get(id)
    }

    /// Cases other than `except` that decided something.
    pub fn precedents(&self, except: &CaseId) -> impl Iterator<Item = &CaseRecord> + '_ {
        let except = except.clone();
        self.cases.values().filter(move |c| c.id != except && c.is_precedent())
    }

    /// Domain invariants plus the references made by cases and assertions.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = validate_domain(&self.model);
        for case in self.cases.values() {
            out.extend(validate_case(&self.model, case));
        }
        for a in self.analogy_assertions.values() {
            let entity = format!("analogy assertion {}", a.id);
            if !self.model.factors.contains_key(&a.factor) {
                out.push(Violation {
                    entity: entity.clone(),
                    kind: ViolationKind::DanglingReference,
                    detail: format!("factor {}", a.factor),
                });
            }
            for p in std::iter::once(&a.precedent).chain(a.counter_precedent.as_ref()) {
                if !self.cases.contains_key(p) {
                    out.push(Violation {
                        entity: entity.clone(),
                        kind: ViolationKind::DanglingReference,
                        detail: format!("case {p}"),
                    });
                }
            }
            if let Some(p) = self.cases.get(&a.precedent) {
                if !a.situation_base.is_subset(&p.facts) {
                    out.push(Violation {
                        entity: entity.clone(),
                        kind: ViolationKind::InvalidAssertion,
                        detail: format!("precedent {} lacks the base situation facts", p.id),
                    });
                }
                if !p.has_factor(&a.factor) {
                    out.push(Violation {
                        entity,
                        kind: ViolationKind::InvalidAssertion,
                        detail: format!("{} is not ascribed in precedent {}", a.factor, p.id),
                    });
                }
            }
        }
        out
    }
}

/// Checks that a case only mentions known factors, dimensions and issues,
/// and that each location has the shape its dimension declares.
pub fn validate_case(model: &DomainModel, case: &CaseRecord) -> Vec<Violation> {
    let entity = format!("case {}", case.id);
    let mut out = Vec::new();
    let mut dangling: Vec<String> = Vec::new();
    for f in &case.factors {
        if !model.factors.contains_key(f) {
            dangling.push(format!("factor {f}"));
        }
    }
    for i in case.issue_resolutions.keys() {
        if !model.issues.contains_key(i) {
            dangling.push(format!("issue {i}"));
        }
    }
    for (d, loc) in &case.locations {
        match model.dimensions.get(d) {
            None => dangling.push(format!("dimension {d}")),
            Some(dim) if !loc.fits(&dim.kind) => out.push(Violation {
                entity: entity.clone(),
                kind: ViolationKind::LocationKind,
                detail: format!("{} value {loc} on dimension {d}", loc.kind_name()),
            }),
            Some(_) => {}
        }
    }
    out.extend(dangling.into_iter().map(|detail| Violation {
        entity: entity.clone(),
        kind: ViolationKind::DanglingReference,
        detail,
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_fails_at_offset_zero() {
        match parse_kb("") {
            Err(KbError::Syntax { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn offsets_count_bytes_across_lines() {
        let text = "{\n  \"a\": ,\n}";
        assert_eq!(byte_offset(text, 2, 8), 9);
        assert_eq!(&text[9..10], ",");
    }

    #[test]
    fn bundled_corpus_validates() {
        let kb = trade_secrets();
        assert!(kb.validate().is_empty());
    }

    #[test]
    fn wrong_version_is_rejected() {
        let text = TRADE_SECRETS.replacen(FORMAT_VERSION, "factor-forge/0", 1);
        assert!(matches!(parse_kb(&text), Err(KbError::UnsupportedVersion(_))));
    }

    #[test]
    fn duplicate_case_is_rejected() {
        let mut kb = trade_secrets();
        let text = serialize_kb(&kb);
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        let first = doc["cases"][0].clone();
        doc["cases"].as_array_mut().unwrap().push(first);
        let err = parse_kb(&doc.to_string()).unwrap_err();
        assert!(matches!(err, KbError::DuplicateId { kind: "case", .. }), "{err}");
        kb.cases.clear();
        kb.analogy_assertions.clear();
        assert!(parse_kb(&serialize_kb(&kb)).is_ok());
    }

    #[test]
    fn mistyped_location_is_reported() {
        let mut kb = trade_secrets();
        let case = kb.cases.get_mut("leaky").unwrap();
        case.locations.insert("disclosures".into(), crate::domain::Location::Boolean(true));
        let err = parse_kb(&serialize_kb(&kb)).unwrap_err();
        assert_eq!(err.violations()[0].kind, ViolationKind::LocationKind);
    }
}
