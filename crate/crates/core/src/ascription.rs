//! Factor ascription: arguments that a factor is, or is not, present in a
//! case, built from facts (ordinary meaning, analogy) and from locations on
//! dimensions (switching points, trade-off lines).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::{
    CaseId, CaseRecord, DimensionId, DimensionKind, DomainError, DomainModel, FactAtom, FactorId, Party, RuleId,
};
use crate::magnitude::Magnitude;
use crate::scheme::{CqLabel, Grounds, Literal, Question, SchemeInstance, SchemeKind};

/// A declared similarity between a situation in a precedent and one in a
/// current case, licensing the precedent's factor for the new case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalogyAssertion {
    pub id: String,
    pub precedent: CaseId,
    pub situation_base: BTreeSet<FactAtom>,
    pub situation_case: BTreeSet<FactAtom>,
    pub factor: FactorId,
    #[serde(default)]
    pub similarity_note: String,
    /// A precedent similar to the case in which the factor was not ascribed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counter_precedent: Option<CaseId>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AscriptionError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("unknown meaning rule {0}")]
    UnknownRule(RuleId),
    #[error("case {case} has no location on dimension {dimension}")]
    MissingLocation { case: CaseId, dimension: DimensionId },
    #[error("factor {factor} is not derived from dimension {dimension}")]
    NotDimensionDerived { factor: FactorId, dimension: DimensionId },
    #[error("scheme not applicable: {0}")]
    Inapplicable(String),
    #[error("a trade-off line needs at least two precedents with {factor}, found {found}")]
    TooFewPrecedents { factor: FactorId, found: usize },
    #[error("all precedents with {0} sit at the same point; no line is determined")]
    Degenerate(FactorId),
}

fn fmt_set<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    let v: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", v.join(", "))
}

/// Ordinary Meaning: the rule's sufficient facts hold in the case, so its
/// factor is present. Returns `None` when some sufficient fact is missing.
pub fn ascribe_ordinary(
    model: &DomainModel,
    case: &CaseRecord,
    rule: &RuleId,
) -> Result<Option<SchemeInstance>, AscriptionError> {
    let rule = model.meaning_rules.get(rule).ok_or_else(|| AscriptionError::UnknownRule(rule.clone()))?;
    model.factor(rule.factor.as_str())?;
    if !rule.sufficient_facts.is_subset(&case.facts) {
        return Ok(None);
    }
    let facts = fmt_set(&rule.sufficient_facts);
    let mut inst = SchemeInstance::new(
        format!("om:{}", rule.id),
        SchemeKind::OrdinaryMeaning,
        Literal::FactorPresent { factor: rule.factor.clone() },
    )
    .bind("case", &case.id)
    .bind("rule", &rule.id)
    .bind("factor", &rule.factor)
    .premise(format!("{facts} hold in {}", case.id))
    .premise(format!("{facts} are ordinarily understood as {}", rule.factor))
    .question(
        Question::open(CqLabel::MCQ1, format!("do the facts really amount to {}?", rule.factor))
            .about_factor(&rule.factor),
    );
    for e in rule.exceptions.intersection(&case.facts) {
        inst = inst.question(
            Question::raised(
                CqLabel::MCQ2,
                Grounds::Fact(e.clone()),
                format!("{e} is an exception to the usual meaning"),
            )
            .about_factor(&rule.factor),
        );
    }
    for other in &rule.incompatible_with {
        let other_applies =
            model.meaning_rules.values().any(|r| &r.factor == other && r.sufficient_facts.is_subset(&case.facts));
        if other_applies {
            inst = inst.question(
                Question::raised(
                    CqLabel::MCQ3,
                    Grounds::Factor(other.clone()),
                    format!("the facts also fit the incompatible factor {other}"),
                )
                .about_factor(&rule.factor),
            );
        }
    }
    Ok(Some(inst))
}

/// Analogy: the case's situation resembles one in a precedent where the
/// factor was ascribed. Returns `None` unless the case has the situation.
pub fn ascribe_by_analogy(assertion: &AnalogyAssertion, case: &CaseRecord) -> Option<SchemeInstance> {
    if !assertion.situation_case.is_subset(&case.facts) {
        return None;
    }
    let base = fmt_set(&assertion.situation_base);
    let here = fmt_set(&assertion.situation_case);
    let f = &assertion.factor;
    let mut inst = SchemeInstance::new(
        format!("an:{}", assertion.id),
        SchemeKind::Analogy,
        Literal::FactorPresent { factor: f.clone() },
    )
    .bind("case", &case.id)
    .bind("precedent", &assertion.precedent)
    .bind("factor", f)
    .premise(format!("{f} was ascribed in {} because of {base}", assertion.precedent))
    .premise(format!("{here} in {} is similar to {base}", case.id))
    .question(Question::open(CqLabel::ACQ1, format!("is {here} really similar to {base}?")).about_factor(f))
    .question(
        Question::open(
            CqLabel::ACQ2,
            format!("is there a relevant difference between {} and {}?", case.id, assertion.precedent),
        )
        .about_factor(f),
    );
    if !assertion.similarity_note.is_empty() {
        inst = inst.premise(assertion.similarity_note.clone());
    }
    if let Some(p2) = &assertion.counter_precedent {
        inst = inst.question(
            Question::raised(
                CqLabel::ACQ3,
                Grounds::Precedent(p2.clone()),
                format!("{p2} is also similar and {f} was not ascribed there"),
            )
            .about_factor(f),
        );
    }
    Some(inst)
}

/// Switching Point: the case lies at least as far toward the factor's party
/// on the dimension as a precedent that had the factor, so the factor applies;
/// otherwise it does not. `others` are further precedents used for SCQ3.
pub fn switching_point_argument(
    model: &DomainModel,
    case: &CaseRecord,
    precedent: &CaseRecord,
    dimension: &DimensionId,
    factor: &FactorId,
    others: &[&CaseRecord],
) -> Result<SchemeInstance, AscriptionError> {
    let dim = model.dimension(dimension.as_str())?;
    let fac = model.factor(factor.as_str())?;
    let derived = fac.origin.as_ref().is_some_and(|o| &o.dimension == dimension);
    if !derived || dim.region_index(factor).is_none() {
        return Err(AscriptionError::NotDimensionDerived { factor: factor.clone(), dimension: dimension.clone() });
    }
    if matches!(dim.kind, DimensionKind::Paired { .. }) {
        return Err(AscriptionError::Inapplicable(format!("{dimension} is a paired dimension; use a trade-off line")));
    }
    if !precedent.has_factor(factor) {
        return Err(AscriptionError::Inapplicable(format!("{factor} was not ascribed in {}", precedent.id)));
    }
    let party = fac.polarity;
    let position = |c: &CaseRecord| -> Result<Magnitude, AscriptionError> {
        c.locations
            .get(dimension)
            .and_then(|l| dim.favourability(party, l))
            .ok_or_else(|| AscriptionError::MissingLocation { case: c.id.clone(), dimension: dimension.clone() })
    };
    let here = position(case)?;
    let there = position(precedent)?;
    let applies = here >= there;
    let conclusion = if applies {
        Literal::FactorPresent { factor: factor.clone() }
    } else {
        Literal::FactorAbsent { factor: factor.clone() }
    };
    let loc = |c: &CaseRecord| c.locations[dimension].to_string();
    let comparison = if applies { "at least as" } else { "less" };
    let mut inst =
        SchemeInstance::new(format!("sp:{}:{}", precedent.id, factor), SchemeKind::SwitchingPoint, conclusion)
            .bind("case", &case.id)
            .bind("precedent", &precedent.id)
            .bind("dimension", dimension)
            .bind("factor", factor)
            .bind("case_location", loc(case))
            .bind("precedent_location", loc(precedent))
            .premise(format!("{factor} was ascribed in {} at {dimension} = {}", precedent.id, loc(precedent)))
            .premise(format!("{} at {dimension} = {} is {comparison} favourable to the {party}", case.id, loc(case)));

    if applies {
        if let Some(stronger) = stronger_region(model, dimension, factor, party) {
            inst = inst.question(
                Question::open(CqLabel::SCQ1, format!("has {} moved into the region of {stronger}?", case.id))
                    .about_factor(factor),
            );
        }
    } else {
        inst = inst.question(
            Question::open(
                CqLabel::SCQ2,
                format!("does the switching point for {factor} lie below {}?", loc(precedent)),
            )
            .about_factor(factor),
        );
    }

    for p2 in others {
        if p2.id == precedent.id || p2.id == case.id {
            continue;
        }
        let Ok(pos2) = position(p2) else { continue };
        let counter = if applies {
            // A decided case at least as far along without the factor.
            !p2.has_factor(factor) && p2.is_precedent() && here <= pos2
        } else {
            p2.has_factor(factor) && here >= pos2
        };
        if counter {
            inst = inst.question(
                Question::raised(
                    CqLabel::SCQ3,
                    Grounds::Precedent(p2.id.clone()),
                    format!("{} at {} points the other way", p2.id, loc(p2)),
                )
                .about_factor(factor),
            );
        }
    }
    Ok(inst)
}

/// A same-party region lying further toward `party` than `factor`'s region.
fn stronger_region(model: &DomainModel, dimension: &DimensionId, factor: &FactorId, party: Party) -> Option<FactorId> {
    let dim = model.dimensions.get(dimension)?;
    let idx = dim.region_index(factor)?;
    let same_side =
        |r: &&crate::domain::FactorRegion| model.factors.get(&r.factor).is_some_and(|f| f.polarity == party);
    let regions = &dim.factor_regions;
    let further: Option<&crate::domain::FactorRegion> = if party == dim.high_end_favors {
        regions[idx + 1..].iter().find(same_side)
    } else {
        regions[..idx].iter().rev().find(same_side)
    };
    further.map(|r| r.factor.clone())
}

/// A separator `a*D1 + b*D2 + c >= 0` between cases that have a factor and
/// cases that do not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineModel {
    pub a: Magnitude,
    pub b: Magnitude,
    pub c: Magnitude,
    pub d1: DimensionId,
    pub d2: DimensionId,
    pub factor: FactorId,
    pub fitted_from: Vec<CaseId>,
}

impl LineModel {
    pub fn evaluate(&self, x: &Magnitude, y: &Magnitude) -> Magnitude {
        &(&(&self.a * x) + &(&self.b * y)) + &self.c
    }

    /// Value at the case's location, if it has one on both axes.
    pub fn evaluate_case(&self, case: &CaseRecord) -> Option<Magnitude> {
        Some(self.evaluate(case.scalar(&self.d1)?, case.scalar(&self.d2)?))
    }

    fn missing(&self, case: &CaseRecord) -> AscriptionError {
        let dimension = if case.scalar(&self.d1).is_none() { &self.d1 } else { &self.d2 };
        AscriptionError::MissingLocation { case: case.id.clone(), dimension: dimension.clone() }
    }
}

impl fmt::Display for LineModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*{} + {}*{} ", self.a, self.d1, self.b, self.d2)?;
        if self.c.is_negative() {
            write!(f, "- {} >= 0", self.c.abs())
        } else {
            write!(f, "+ {} >= 0", self.c)
        }
    }
}

type Point = (Magnitude, Magnitude);

fn cross(o: &Point, a: &Point, b: &Point) -> Magnitude {
    &(&(&a.0 - &o.0) * &(&b.1 - &o.1)) - &(&(&a.1 - &o.1) * &(&b.0 - &o.0))
}

/// Fits the supporting line of the lower boundary of the precedents that
/// have `factor`. Among the edges of the lower convex hull it picks the one
/// spanning the mean first coordinate, i.e. the tightest half-plane at the
/// centre of the data. The line is normalised so that `b = 1`, or `a = 1`
/// when every point shares its first coordinate.
pub fn fit_tradeoff_line(
    precedents: &[&CaseRecord],
    d1: &DimensionId,
    d2: &DimensionId,
    factor: &FactorId,
) -> Result<LineModel, AscriptionError> {
    let mut used = Vec::new();
    let mut points: Vec<Point> = Vec::new();
    for p in precedents {
        if !p.has_factor(factor) {
            continue;
        }
        if let (Some(x), Some(y)) = (p.scalar(d1), p.scalar(d2)) {
            used.push(p.id.clone());
            points.push((x.clone(), y.clone()));
        }
    }
    if used.len() < 2 {
        return Err(AscriptionError::TooFewPrecedents { factor: factor.clone(), found: used.len() });
    }
    points.sort();
    points.dedup();
    if points.len() < 2 {
        return Err(AscriptionError::Degenerate(factor.clone()));
    }
    let line = |a: Magnitude, b: Magnitude, c: Magnitude| LineModel {
        a,
        b,
        c,
        d1: d1.clone(),
        d2: d2.clone(),
        factor: factor.clone(),
        fitted_from: used.clone(),
    };
    if points.first().unwrap().0 == points.last().unwrap().0 {
        let x0 = points[0].0.clone();
        return Ok(line(Magnitude::one(), Magnitude::zero(), -x0));
    }

    let mut hull: Vec<Point> = Vec::new();
    for p in &points {
        while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p).is_positive() {
            hull.pop();
        }
        hull.push(p.clone());
    }

    let n = Magnitude::from_integer(points.len() as i64);
    let sum_x = points.iter().fold(Magnitude::zero(), |acc, p| &acc + &p.0);
    let mean_x = sum_x.checked_div(&n).expect("non-empty");

    let mut best: Option<(Magnitude, Magnitude, Magnitude)> = None; // (height, a, c)
    for w in hull.windows(2) {
        let (p, q) = (&w[0], &w[1]);
        if p.0 == q.0 {
            continue;
        }
        let slope = (&q.1 - &p.1).checked_div(&(&q.0 - &p.0)).expect("distinct x");
        let height = &(&slope * &(&mean_x - &p.0)) + &p.1;
        let a = -&slope;
        let c = &(&slope * &p.0) - &p.1;
        let better = match &best {
            None => true,
            Some((h, ba, _)) => height > *h || (height == *h && a > *ba),
        };
        if better {
            best = Some((height, a, c));
        }
    }
    let (_, a, c) = best.expect("a hull over two distinct x values has a non-vertical edge");
    Ok(line(a, Magnitude::one(), c))
}

/// Whether `case` is a decided case, located on both axes, that lacks the
/// factor and went against the factor's party.
pub fn is_negative_precedent(model: &DomainModel, line: &LineModel, case: &CaseRecord) -> bool {
    let Some(f) = model.factors.get(&line.factor) else { return false };
    if case.has_factor(&line.factor) || line.evaluate_case(case).is_none() {
        return false;
    }
    let against = f.polarity.opposite();
    model.issues_of(&line.factor).any(|i| case.resolution(&i.id).party() == Some(against))
        || case.outcome.party() == Some(against)
}

/// Trade Off: the case's point on the two axes lies on or above the line,
/// so the factor is present; below it, absent.
pub fn trade_off_argument(
    model: &DomainModel,
    line: &LineModel,
    case: &CaseRecord,
    precedents: &[&CaseRecord],
) -> Result<SchemeInstance, AscriptionError> {
    let value = line.evaluate_case(case).ok_or_else(|| line.missing(case))?;
    let present = !value.is_negative();
    let f = &line.factor;
    let conclusion = if present {
        Literal::FactorPresent { factor: f.clone() }
    } else {
        Literal::FactorAbsent { factor: f.clone() }
    };
    let mut inst = SchemeInstance::new(format!("to:{f}"), SchemeKind::TradeOff, conclusion)
        .bind("case", &case.id)
        .bind("factor", f)
        .bind("line", line)
        .bind("value", &value)
        .bind("fitted_from", line.fitted_from.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(","))
        .premise(format!("{f} holds where {line}, as fitted to {}", fmt_set(&line.fitted_from)))
        .premise(format!(
            "{} sits at ({}, {}), where the line gives {value}",
            case.id,
            case.scalar(&line.d1).unwrap(),
            case.scalar(&line.d2).unwrap()
        ));

    let mut has_negative = false;
    for p in precedents {
        if p.id == case.id {
            continue;
        }
        let Some(v) = line.evaluate_case(p) else { continue };
        let negative = is_negative_precedent(model, line, p);
        has_negative |= negative;
        let violates = (p.has_factor(f) && v.is_negative()) || (negative && !v.is_negative());
        if violates {
            inst = inst.question(
                Question::raised(
                    CqLabel::TCQ1,
                    Grounds::Precedent(p.id.clone()),
                    format!("{} lies on the wrong side of the line (value {v})", p.id),
                )
                .about_factor(f),
            );
        }
    }
    if !present || has_negative {
        inst = inst
            .question(Question::open(CqLabel::TCQ2, "should the line be drawn less or more tightly?").about_factor(f));
    }
    Ok(inst)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum LineAdjustment {
    Adjusted {
        line: LineModel,
    },
    /// Admitting the case would also admit a negative precedent.
    Refused {
        blocking: CaseId,
        value: Magnitude,
    },
}

/// Shifts the constant of `line` just enough to admit `admit`, unless a
/// negative precedent among `precedents` would then be admitted too.
pub fn adjust_line(
    model: &DomainModel,
    line: &LineModel,
    admit: &CaseRecord,
    precedents: &[&CaseRecord],
) -> Result<LineAdjustment, AscriptionError> {
    let value = line.evaluate_case(admit).ok_or_else(|| line.missing(admit))?;
    if !value.is_negative() {
        return Ok(LineAdjustment::Adjusted { line: line.clone() });
    }
    let mut shifted = line.clone();
    shifted.c = &line.c - &value;
    for p in precedents {
        if p.id == admit.id || !is_negative_precedent(model, line, p) {
            continue;
        }
        let v = shifted.evaluate_case(p).expect("negative precedents have both locations");
        if !v.is_negative() {
            return Ok(LineAdjustment::Refused { blocking: p.id.clone(), value: v });
        }
    }
    Ok(LineAdjustment::Adjusted { line: shifted })
}
