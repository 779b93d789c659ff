//! Doubling of ground diagrams into pure ones.

use super::{Diagram, EdgeId, Generator, GeneratorKind};
use crate::error::Result;

/// Display name of the second-copy edge: a combining macron after the first
/// character, so `e3` becomes `ē3`.
pub fn bar_name(name: &str) -> String {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) => format!("{c}\u{0304}{}", chars.as_str()),
        None => "\u{0304}".to_string(),
    }
}

/// Edge `e` of `d` in the second copy of `cpm_construct(d)`.
pub fn bar_edge(d: &Diagram, e: EdgeId) -> EdgeId {
    EdgeId(e.0 + d.edges().len())
}

/// Places `d` and its conjugate side by side and joins the two halves of every
/// ground through a cup. Edge `e` keeps its id in the first copy; its twin is
/// `e + |E|`. Boundaries interleave the copies: `[a1, ā1, a2, ā2, ...]`.
pub fn cpm_construct(d: &Diagram) -> Result<Diagram> {
    let n = d.edges().len();
    let bar = |e: &EdgeId| EdgeId(e.0 + n);
    let mut names: Vec<String> = d.edges().iter().map(|e| e.name.clone()).collect();
    names.extend(d.edges().iter().map(|e| bar_name(&e.name)));

    let mut generators = Vec::with_capacity(2 * d.generators().len());
    for g in d.generators() {
        if matches!(g.kind, GeneratorKind::Ground) {
            generators.push(Generator {
                kind: GeneratorKind::Cup,
                inputs: vec![g.inputs[0], bar(&g.inputs[0])],
                outputs: vec![],
            });
        } else {
            generators.push(g.clone());
        }
    }
    for g in d.generators() {
        let kind = match g.kind {
            GeneratorKind::Ground => continue,
            GeneratorKind::Z(a) => GeneratorKind::Z(-a),
            k => k,
        };
        generators.push(Generator {
            kind,
            inputs: g.inputs.iter().map(bar).collect(),
            outputs: g.outputs.iter().map(bar).collect(),
        });
    }
    let interleave =
        |slots: &[EdgeId]| -> Vec<EdgeId> { slots.iter().flat_map(|e| [*e, bar(e)]).collect() };
    Diagram::from_parts(
        names,
        generators,
        interleave(d.inputs()),
        interleave(d.outputs()),
    )
}
