//! The argument graph for a case: construction, labelling and explanation.

mod build;
mod explain;
mod graph;

pub use build::{build_case, build_graph, objection, BuiltCase, EngineError, Forced};
pub use explain::{explain, explain_contrast, AttackExplanation, ContrastiveExplanation, ExplainError, Explanation};
pub use graph::{grounded, ArgumentGraph, GraphExport, GraphNode, Label};
