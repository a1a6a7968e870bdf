//! Argument graphs and their grounded labelling.

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::domain::CaseId;
use crate::scheme::{Attack, InstanceId, Literal, SchemeInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "IN")]
    In,
    #[serde(rename = "OUT")]
    Out,
    #[serde(rename = "UNDEC")]
    Undec,
}

impl Label {
    /// Ordering used when choosing among arguments for the same conclusion.
    pub fn rank(self) -> u8 {
        match self {
            Label::In => 0,
            Label::Undec => 1,
            Label::Out => 2,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Label::In => "IN",
            Label::Out => "OUT",
            Label::Undec => "UNDEC",
        })
    }
}

/// The grounded labelling: the least fixpoint of "IN when every attacker is
/// OUT, OUT when some attacker is IN"; everything left over is UNDEC.
pub fn grounded<N: Ord + Clone>(
    nodes: impl IntoIterator<Item = N>,
    edges: impl IntoIterator<Item = (N, N)>,
) -> BTreeMap<N, Label> {
    let nodes: BTreeSet<N> = nodes.into_iter().collect();
    let mut attackers: BTreeMap<N, BTreeSet<N>> = nodes.iter().map(|n| (n.clone(), BTreeSet::new())).collect();
    for (from, to) in edges {
        if nodes.contains(&from) {
            if let Some(set) = attackers.get_mut(&to) {
                set.insert(from);
            }
        }
    }
    let mut label: BTreeMap<N, Label> = BTreeMap::new();
    loop {
        let mut changed = false;
        for n in &nodes {
            if label.contains_key(n) {
                continue;
            }
            let att = &attackers[n];
            if att.iter().all(|a| label.get(a) == Some(&Label::Out)) {
                label.insert(n.clone(), Label::In);
                changed = true;
            } else if att.iter().any(|a| label.get(a) == Some(&Label::In)) {
                label.insert(n.clone(), Label::Out);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for n in nodes {
        label.entry(n).or_insert(Label::Undec);
    }
    label
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgumentGraph {
    pub case: CaseId,
    instances: IndexMap<InstanceId, SchemeInstance>,
    attacks: Vec<Attack>,
    labelling: BTreeMap<InstanceId, Label>,
}

impl ArgumentGraph {
    pub fn new(case: CaseId) -> Self {
        ArgumentGraph { case, instances: IndexMap::new(), attacks: Vec::new(), labelling: BTreeMap::new() }
    }

    /// Adds an instance; returns false if one with the same id is already present.
    pub fn add(&mut self, inst: SchemeInstance) -> bool {
        if self.instances.contains_key(&inst.id) {
            return false;
        }
        self.instances.insert(inst.id.clone(), inst);
        true
    }

    /// Adds an attack between existing instances, at most one per ordered pair.
    pub fn attack(&mut self, attack: Attack) -> bool {
        if !self.instances.contains_key(&attack.from) || !self.instances.contains_key(&attack.to) {
            return false;
        }
        if self.attacks.iter().any(|a| a.from == attack.from && a.to == attack.to) {
            return false;
        }
        self.attacks.push(attack);
        true
    }

    pub fn contains(&self, id: &InstanceId) -> bool {
        self.instances.contains_key(id)
    }

    pub fn instance(&self, id: &InstanceId) -> Option<&SchemeInstance> {
        self.instances.get(id)
    }

    pub fn instances(&self) -> impl Iterator<Item = &SchemeInstance> {
        self.instances.values()
    }

    pub fn attacks(&self) -> &[Attack] {
        &self.attacks
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn attackers_of<'a>(&'a self, id: &'a InstanceId) -> impl Iterator<Item = &'a Attack> + 'a {
        self.attacks.iter().filter(move |a| &a.to == id)
    }

    pub fn targets_of<'a>(&'a self, id: &'a InstanceId) -> impl Iterator<Item = &'a Attack> + 'a {
        self.attacks.iter().filter(move |a| &a.from == id)
    }

    /// Recomputes the grounded labelling after instances or attacks changed.
    pub fn relabel(&mut self) {
        self.labelling =
            grounded(self.instances.keys().cloned(), self.attacks.iter().map(|a| (a.from.clone(), a.to.clone())));
    }

    pub fn label(&self, id: &InstanceId) -> Option<Label> {
        self.labelling.get(id).copied()
    }

    pub fn labelling(&self) -> &BTreeMap<InstanceId, Label> {
        &self.labelling
    }

    pub fn concluding<'a>(&'a self, lit: &'a Literal) -> impl Iterator<Item = &'a SchemeInstance> + 'a {
        self.instances.values().filter(move |i| &i.conclusion == lit)
    }

    /// The strongest instance for `lit`: IN before UNDEC before OUT, then by id.
    pub fn best_for<'a>(&'a self, lit: &'a Literal) -> Option<&'a SchemeInstance> {
        self.concluding(lit).min_by_key(|i| (self.label(&i.id).map_or(3, Label::rank), i.id.clone()))
    }

    pub fn holds(&self, lit: &Literal) -> bool {
        self.concluding(lit).any(|i| self.label(&i.id) == Some(Label::In))
    }

    pub fn export(&self) -> GraphExport {
        GraphExport {
            case: self.case.clone(),
            nodes: self
                .instances
                .values()
                .map(|i| GraphNode { instance: i.clone(), label: self.label(&i.id).unwrap_or(Label::Undec) })
                .collect(),
            edges: self.attacks.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    #[serde(flatten)]
    pub instance: SchemeInstance,
    pub label: Label,
}

/// Node and edge lists for clients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphExport {
    pub case: CaseId,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<Attack>,
}
