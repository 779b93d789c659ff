//! Open multigraphs of ZX generators.
//!
//! Every edge has a top end and a bottom end. A top end sits either on an
//! output port of a generator or on an input slot of the diagram; a bottom end
//! sits on an input port or an output slot. Identity and swap are pure wiring:
//! composing diagrams fuses edges instead of materialising identity nodes.

mod connect;
mod cpm;
mod graph;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use connect::connect_components;
pub use cpm::{bar_edge, bar_name, cpm_construct};
pub use graph::{Component, Cycle, Path};

use crate::angle::Angle;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GenId(pub usize);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Direction of travel along an edge. `Down` goes from the top end to the
/// bottom end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    Down,
    Up,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Down => Dir::Up,
            Dir::Up => Dir::Down,
        }
    }

    pub fn arrow(self) -> &'static str {
        match self {
            Dir::Down => "↓",
            Dir::Up => "↑",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorKind {
    Z(Angle),
    H,
    Cup,
    Cap,
    Ground,
}

impl GeneratorKind {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::Z(_) => "Z",
            GeneratorKind::H => "H",
            GeneratorKind::Cup => "cup",
            GeneratorKind::Cap => "cap",
            GeneratorKind::Ground => "ground",
        }
    }

    pub fn check_arity(&self, inputs: usize, outputs: usize) -> Result<()> {
        let ok = match self {
            GeneratorKind::Z(_) => true,
            GeneratorKind::H => inputs == 1 && outputs == 1,
            GeneratorKind::Cup => inputs == 2 && outputs == 0,
            GeneratorKind::Cap => inputs == 0 && outputs == 2,
            GeneratorKind::Ground => inputs == 1 && outputs == 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArity {
                kind: self.name(),
                inputs,
                outputs,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub inputs: Vec<EdgeId>,
    pub outputs: Vec<EdgeId>,
}

/// Where one end of an edge is attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum End {
    /// A generator port: an output port when this is the top end of the edge,
    /// an input port when it is the bottom end.
    Port { gen: GenId, port: usize },
    /// A boundary slot: an input slot for a top end, an output slot for a
    /// bottom end.
    Slot(usize),
}

impl End {
    pub fn gen(self) -> Option<GenId> {
        match self {
            End::Port { gen, .. } => Some(gen),
            End::Slot(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub name: String,
    pub top: End,
    pub bottom: End,
}

impl Edge {
    /// The end a token travelling in `dir` is heading towards.
    pub fn end_towards(&self, dir: Dir) -> End {
        match dir {
            Dir::Down => self.bottom,
            Dir::Up => self.top,
        }
    }
}

/// Identifies a boundary slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Input(usize),
    Output(usize),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagram {
    generators: Vec<Generator>,
    edges: Vec<Edge>,
    inputs: Vec<EdgeId>,
    outputs: Vec<EdgeId>,
}

impl Diagram {
    pub fn empty() -> Diagram {
        Diagram::default()
    }

    /// Builds a diagram from generator port lists and boundary lists; edge ends
    /// are derived and the result is validated.
    pub fn from_parts(
        names: Vec<String>,
        generators: Vec<Generator>,
        inputs: Vec<EdgeId>,
        outputs: Vec<EdgeId>,
    ) -> Result<Diagram> {
        let n = names.len();
        let mut tops: Vec<Option<End>> = vec![None; n];
        let mut bottoms: Vec<Option<End>> = vec![None; n];
        let place = |slots: &mut Vec<Option<End>>, e: EdgeId, end: End, what: &str| {
            let slot = slots
                .get_mut(e.0)
                .ok_or_else(|| Error::UnknownEdge(e.to_string()))?;
            if slot.is_some() {
                return Err(Error::Malformed(format!("edge {e} has two {what} ends")));
            }
            *slot = Some(end);
            Ok(())
        };
        for (g, gen) in generators.iter().enumerate() {
            gen.kind.check_arity(gen.inputs.len(), gen.outputs.len())?;
            for (port, &e) in gen.inputs.iter().enumerate() {
                place(
                    &mut bottoms,
                    e,
                    End::Port {
                        gen: GenId(g),
                        port,
                    },
                    "bottom",
                )?;
            }
            for (port, &e) in gen.outputs.iter().enumerate() {
                place(
                    &mut tops,
                    e,
                    End::Port {
                        gen: GenId(g),
                        port,
                    },
                    "top",
                )?;
            }
        }
        for (i, &e) in inputs.iter().enumerate() {
            place(&mut tops, e, End::Slot(i), "top")?;
        }
        for (j, &e) in outputs.iter().enumerate() {
            place(&mut bottoms, e, End::Slot(j), "bottom")?;
        }
        let mut edges = Vec::with_capacity(n);
        for (i, name) in names.into_iter().enumerate() {
            let (Some(top), Some(bottom)) = (tops[i], bottoms[i]) else {
                return Err(Error::Malformed(format!("edge {name} is dangling")));
            };
            edges.push(Edge { name, top, bottom });
        }
        let d = Diagram {
            generators,
            edges,
            inputs,
            outputs,
        };
        d.validate()?;
        Ok(d)
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<()> {
        let mut names = HashSet::new();
        for e in &self.edges {
            if !names.insert(e.name.as_str()) {
                return Err(Error::Malformed(format!("duplicate edge label {}", e.name)));
            }
        }
        let check_end = |end: End, edge: EdgeId, top: bool| -> Result<()> {
            let ok = match end {
                End::Port { gen, port } => self.generators.get(gen.0).is_some_and(|g| {
                    let ports = if top { &g.outputs } else { &g.inputs };
                    ports.get(port) == Some(&edge)
                }),
                End::Slot(i) => {
                    let slots = if top { &self.inputs } else { &self.outputs };
                    slots.get(i) == Some(&edge)
                }
            };
            if ok {
                Ok(())
            } else {
                Err(Error::Malformed(format!("inconsistent end on edge {edge}")))
            }
        };
        for (i, e) in self.edges.iter().enumerate() {
            check_end(e.top, EdgeId(i), true)?;
            check_end(e.bottom, EdgeId(i), false)?;
        }
        let mut ports = 0;
        for g in &self.generators {
            g.kind.check_arity(g.inputs.len(), g.outputs.len())?;
            ports += g.inputs.len() + g.outputs.len();
        }
        if ports + self.inputs.len() + self.outputs.len() != 2 * self.edges.len() {
            return Err(Error::Malformed(
                "port count does not match edge count".into(),
            ));
        }
        Ok(())
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, g: GenId) -> &Generator {
        &self.generators[g.0]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn name(&self, e: EdgeId) -> &str {
        &self.edges[e.0].name
    }

    pub fn edge_by_name(&self, name: &str) -> Result<EdgeId> {
        self.edges
            .iter()
            .position(|e| e.name == name)
            .map(EdgeId)
            .ok_or_else(|| Error::UnknownEdge(name.to_string()))
    }

    pub fn inputs(&self) -> &[EdgeId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[EdgeId] {
        &self.outputs
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn has_ground(&self) -> bool {
        self.generators
            .iter()
            .any(|g| matches!(g.kind, GeneratorKind::Ground))
    }

    pub fn count_kind(&self, pred: impl Fn(&GeneratorKind) -> bool) -> usize {
        self.generators.iter().filter(|g| pred(&g.kind)).count()
    }

    /// A single generator with freshly labelled dangling edges.
    pub fn generator_diagram(
        kind: GeneratorKind,
        inputs: usize,
        outputs: usize,
    ) -> Result<Diagram> {
        kind.check_arity(inputs, outputs)?;
        let mut names = Vec::new();
        names.extend((0..inputs).map(|i| format!("i{i}")));
        names.extend((0..outputs).map(|j| format!("o{j}")));
        let ins: Vec<EdgeId> = (0..inputs).map(EdgeId).collect();
        let outs: Vec<EdgeId> = (inputs..inputs + outputs).map(EdgeId).collect();
        let gen = Generator {
            kind,
            inputs: ins.clone(),
            outputs: outs.clone(),
        };
        Diagram::from_parts(names, vec![gen], ins, outs)
    }

    pub fn z(inputs: usize, outputs: usize, angle: Angle) -> Diagram {
        Diagram::generator_diagram(GeneratorKind::Z(angle), inputs, outputs)
            .expect("green spiders accept any arity")
    }

    pub fn h() -> Diagram {
        Diagram::generator_diagram(GeneratorKind::H, 1, 1).unwrap()
    }

    pub fn cup() -> Diagram {
        Diagram::generator_diagram(GeneratorKind::Cup, 2, 0).unwrap()
    }

    pub fn cap() -> Diagram {
        Diagram::generator_diagram(GeneratorKind::Cap, 0, 2).unwrap()
    }

    pub fn ground() -> Diagram {
        Diagram::generator_diagram(GeneratorKind::Ground, 1, 0).unwrap()
    }

    pub fn identity_wire() -> Diagram {
        Diagram {
            generators: vec![],
            edges: vec![Edge {
                name: "w0".into(),
                top: End::Slot(0),
                bottom: End::Slot(0),
            }],
            inputs: vec![EdgeId(0)],
            outputs: vec![EdgeId(0)],
        }
    }

    /// `n` parallel wires.
    pub fn identity(n: usize) -> Diagram {
        (0..n).fold(Diagram::empty(), |acc, _| {
            acc.tensor(&Diagram::identity_wire())
        })
    }

    pub fn swap_wires() -> Diagram {
        Diagram {
            generators: vec![],
            edges: vec![
                Edge {
                    name: "w0".into(),
                    top: End::Slot(0),
                    bottom: End::Slot(1),
                },
                Edge {
                    name: "w1".into(),
                    top: End::Slot(1),
                    bottom: End::Slot(0),
                },
            ],
            inputs: vec![EdgeId(0), EdgeId(1)],
            outputs: vec![EdgeId(1), EdgeId(0)],
        }
    }

    /// `H^⊗n ; Z(n, m, α) ; H^⊗m`. There is no primitive red node.
    pub fn red_spider(inputs: usize, outputs: usize, angle: Angle) -> Diagram {
        let hs = |k: usize| (0..k).fold(Diagram::empty(), |acc, _| acc.tensor(&Diagram::h()));
        hs(inputs)
            .then(&Diagram::z(inputs, outputs, angle))
            .and_then(|d| d.then(&hs(outputs)))
            .expect("arities line up by construction")
    }

    /// Sequential composition: `self` on top, `below` underneath, i.e. the
    /// diagram `below ∘ self`. Joined wires keep the labels of `self`'s
    /// outputs.
    pub fn then(&self, below: &Diagram) -> Result<Diagram> {
        if self.outputs.len() != below.inputs.len() {
            return Err(Error::ArityMismatch {
                left: self.outputs.len(),
                right: below.inputs.len(),
            });
        }
        let goff = self.generators.len();
        let mut out = self.clone();
        let mut used: HashSet<String> = out.edges.iter().map(|e| e.name.clone()).collect();
        // Map below's edge ids into the result.
        let mut map = vec![EdgeId(usize::MAX); below.edges.len()];
        for (i, &f) in below.inputs.iter().enumerate() {
            map[f.0] = self.outputs[i];
        }
        for (i, e) in below.edges.iter().enumerate() {
            if matches!(e.top, End::Slot(_)) {
                continue;
            }
            let name = fresh_name(&e.name, &used);
            used.insert(name.clone());
            map[i] = EdgeId(out.edges.len());
            out.edges.push(Edge {
                name,
                top: End::Slot(usize::MAX),
                bottom: End::Slot(usize::MAX),
            });
        }
        let shift = |end: End| match end {
            End::Port { gen, port } => End::Port {
                gen: GenId(gen.0 + goff),
                port,
            },
            slot => slot,
        };
        for (i, e) in below.edges.iter().enumerate() {
            let target = map[i];
            if !matches!(e.top, End::Slot(_)) {
                out.edges[target.0].top = shift(e.top);
            }
            out.edges[target.0].bottom = shift(e.bottom);
        }
        for g in &below.generators {
            out.generators.push(Generator {
                kind: g.kind,
                inputs: g.inputs.iter().map(|e| map[e.0]).collect(),
                outputs: g.outputs.iter().map(|e| map[e.0]).collect(),
            });
        }
        out.outputs = below.outputs.iter().map(|e| map[e.0]).collect();
        debug_assert!(out.validate().is_ok());
        Ok(out)
    }

    /// Parallel composition `self ⊗ right`.
    pub fn tensor(&self, right: &Diagram) -> Diagram {
        let goff = self.generators.len();
        let eoff = self.edges.len();
        let (ioff, ooff) = (self.inputs.len(), self.outputs.len());
        let mut out = self.clone();
        let mut used: HashSet<String> = out.edges.iter().map(|e| e.name.clone()).collect();
        for e in &right.edges {
            let name = fresh_name(&e.name, &used);
            used.insert(name.clone());
            let top = match e.top {
                End::Port { gen, port } => End::Port {
                    gen: GenId(gen.0 + goff),
                    port,
                },
                End::Slot(i) => End::Slot(i + ioff),
            };
            let bottom = match e.bottom {
                End::Port { gen, port } => End::Port {
                    gen: GenId(gen.0 + goff),
                    port,
                },
                End::Slot(j) => End::Slot(j + ooff),
            };
            out.edges.push(Edge { name, top, bottom });
        }
        let shift = |e: &EdgeId| EdgeId(e.0 + eoff);
        for g in &right.generators {
            out.generators.push(Generator {
                kind: g.kind,
                inputs: g.inputs.iter().map(shift).collect(),
                outputs: g.outputs.iter().map(shift).collect(),
            });
        }
        out.inputs.extend(right.inputs.iter().map(shift));
        out.outputs.extend(right.outputs.iter().map(shift));
        out
    }

    /// Every spider angle negated.
    pub fn conjugate(&self) -> Diagram {
        let mut out = self.clone();
        for g in &mut out.generators {
            if let GeneratorKind::Z(a) = g.kind {
                g.kind = GeneratorKind::Z(-a);
            }
        }
        out
    }

    /// Turns one boundary wire around. An input slot becomes the last output
    /// (through a new cap); an output slot becomes the last input (through a
    /// new cup).
    pub fn bend_wire(&self, slot: Boundary) -> Result<Diagram> {
        let mut out = self.clone();
        let used: HashSet<String> = out.edges.iter().map(|e| e.name.clone()).collect();
        let g = GenId(out.generators.len());
        let new_edge = EdgeId(out.edges.len());
        match slot {
            Boundary::Input(k) => {
                let e = *self.inputs.get(k).ok_or(Error::SlotOutOfRange {
                    index: k,
                    len: self.inputs.len(),
                })?;
                let name = fresh_name(&format!("{}'", self.name(e)), &used);
                out.inputs.remove(k);
                out.edges[e.0].top = End::Port { gen: g, port: 1 };
                out.edges.push(Edge {
                    name,
                    top: End::Port { gen: g, port: 0 },
                    bottom: End::Slot(out.outputs.len()),
                });
                out.outputs.push(new_edge);
                out.generators.push(Generator {
                    kind: GeneratorKind::Cap,
                    inputs: vec![],
                    outputs: vec![new_edge, e],
                });
            }
            Boundary::Output(k) => {
                let e = *self.outputs.get(k).ok_or(Error::SlotOutOfRange {
                    index: k,
                    len: self.outputs.len(),
                })?;
                let name = fresh_name(&format!("{}'", self.name(e)), &used);
                out.outputs.remove(k);
                out.edges[e.0].bottom = End::Port { gen: g, port: 0 };
                out.edges.push(Edge {
                    name,
                    top: End::Slot(out.inputs.len()),
                    bottom: End::Port { gen: g, port: 1 },
                });
                out.inputs.push(new_edge);
                out.generators.push(Generator {
                    kind: GeneratorKind::Cup,
                    inputs: vec![e, new_edge],
                    outputs: vec![],
                });
            }
        }
        out.renumber_slots();
        debug_assert!(out.validate().is_ok());
        Ok(out)
    }

    /// Relabels edges as `a1..an` (inputs), `b1..bm` (outputs) and `e1..` for
    /// internal edges in id order. A bare wire keeps its input name.
    pub fn relabel_standard(&mut self) {
        let mut named = vec![false; self.edges.len()];
        for (i, e) in self.inputs.iter().enumerate() {
            self.edges[e.0].name = format!("a{}", i + 1);
            named[e.0] = true;
        }
        for (j, e) in self.outputs.iter().enumerate() {
            if !named[e.0] {
                self.edges[e.0].name = format!("b{}", j + 1);
                named[e.0] = true;
            }
        }
        let mut k = 0;
        for (i, e) in self.edges.iter_mut().enumerate() {
            if !named[i] {
                k += 1;
                e.name = format!("e{k}");
            }
        }
    }

    pub fn set_edge_name(&mut self, e: EdgeId, name: impl Into<String>) -> Result<()> {
        let name = name.into();
        if self
            .edges
            .iter()
            .enumerate()
            .any(|(i, x)| i != e.0 && x.name == name)
        {
            return Err(Error::Malformed(format!("duplicate edge label {name}")));
        }
        self.edges[e.0].name = name;
        Ok(())
    }

    /// The generator a token travelling along `e` in direction `dir` enters,
    /// with the port index it enters through. `None` when it reaches a slot.
    pub fn target(&self, e: EdgeId, dir: Dir) -> Option<(GenId, usize)> {
        match self.edges[e.0].end_towards(dir) {
            End::Port { gen, port } => Some((gen, port)),
            End::Slot(_) => None,
        }
    }

    fn renumber_slots(&mut self) {
        for (i, e) in self.inputs.clone().into_iter().enumerate() {
            self.edges[e.0].top = End::Slot(i);
        }
        for (j, e) in self.outputs.clone().into_iter().enumerate() {
            self.edges[e.0].bottom = End::Slot(j);
        }
    }

    pub(crate) fn push_generator(&mut self, kind: GeneratorKind) -> GenId {
        self.generators.push(Generator {
            kind,
            inputs: vec![],
            outputs: vec![],
        });
        GenId(self.generators.len() - 1)
    }

    /// Adds an edge from an output port appended to `from` to an input port
    /// appended to `to`.
    pub(crate) fn link(&mut self, from: GenId, to: GenId, base: &str) -> EdgeId {
        let used: HashSet<String> = self.edges.iter().map(|e| e.name.clone()).collect();
        let name = fresh_name(base, &used);
        let id = EdgeId(self.edges.len());
        let top = End::Port {
            gen: from,
            port: self.generators[from.0].outputs.len(),
        };
        let bottom = End::Port {
            gen: to,
            port: self.generators[to.0].inputs.len(),
        };
        self.generators[from.0].outputs.push(id);
        self.generators[to.0].inputs.push(id);
        self.edges.push(Edge { name, top, bottom });
        id
    }

    /// Cuts `e` and splices a fresh `Z(1,1,0)` into it; returns the new node.
    /// The upper half keeps the original id and label.
    pub(crate) fn split_with_identity_spider(&mut self, e: EdgeId) -> GenId {
        let g = self.push_generator(GeneratorKind::Z(Angle::ZERO));
        let used: HashSet<String> = self.edges.iter().map(|x| x.name.clone()).collect();
        let name = fresh_name(&format!("{}'", self.edges[e.0].name), &used);
        let lower = EdgeId(self.edges.len());
        let old_bottom = self.edges[e.0].bottom;
        self.edges.push(Edge {
            name,
            top: End::Port { gen: g, port: 0 },
            bottom: old_bottom,
        });
        match old_bottom {
            End::Port { gen, port } => self.generators[gen.0].inputs[port] = lower,
            End::Slot(j) => self.outputs[j] = lower,
        }
        self.edges[e.0].bottom = End::Port { gen: g, port: 0 };
        self.generators[g.0].inputs.push(e);
        self.generators[g.0].outputs.push(lower);
        g
    }
}

/// Free-function spelling of [`Diagram::then`]: `d2 ∘ d1`.
pub fn compose(d1: &Diagram, d2: &Diagram) -> Result<Diagram> {
    d1.then(d2)
}

pub fn tensor(d1: &Diagram, d2: &Diagram) -> Diagram {
    d1.tensor(d2)
}

pub(crate) fn fresh_name(base: &str, used: &HashSet<String>) -> String {
    if !used.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|k| format!("{base}_{k}"))
        .find(|n| !used.contains(n))
        .unwrap()
}
