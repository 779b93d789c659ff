//! JSON documents. Keys come out in alphabetical order, complex numbers as
//! `[re, im]` and tokens as `{bits, dir, edge}` with the edge's label, so
//! the same value always serializes to the same bytes.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::diagram::{Diagram, Dir, EdgeId, End, GenId, Generator, GeneratorKind};
use crate::error::{Error, Result};
use crate::interp::Matrix;
use crate::machine::{
    state_digest, Engine, GroundToken, Rule, Rules, Site, State, StepRecord, Token, TokenLike,
    Trace,
};

pub const DIAGRAM_VERSION: u32 = 1;

fn pretty<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum EndDoc {
    Port { gen: usize, port: usize },
    Slot { slot: usize },
}

impl From<End> for EndDoc {
    fn from(e: End) -> Self {
        match e {
            End::Port { gen, port } => EndDoc::Port { gen: gen.0, port },
            End::Slot(slot) => EndDoc::Slot { slot },
        }
    }
}

impl From<EndDoc> for End {
    fn from(e: EndDoc) -> Self {
        match e {
            EndDoc::Port { gen, port } => End::Port {
                gen: GenId(gen),
                port,
            },
            EndDoc::Slot { slot } => End::Slot(slot),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub bottom: EndDoc,
    pub label: String,
    pub top: EndDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<Angle>,
    pub inputs: Vec<String>,
    pub kind: String,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramDoc {
    pub edges: Vec<EdgeDoc>,
    pub generators: Vec<GeneratorDoc>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub version: u32,
}

impl DiagramDoc {
    pub fn from_diagram(d: &Diagram) -> DiagramDoc {
        let label = |e: &EdgeId| d.name(*e).to_string();
        DiagramDoc {
            edges: d
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    bottom: e.bottom.into(),
                    label: e.name.clone(),
                    top: e.top.into(),
                })
                .collect(),
            generators: d
                .generators()
                .iter()
                .map(|g| GeneratorDoc {
                    angle: match g.kind {
                        GeneratorKind::Z(a) => Some(a),
                        _ => None,
                    },
                    inputs: g.inputs.iter().map(label).collect(),
                    kind: g.kind.name().to_string(),
                    outputs: g.outputs.iter().map(label).collect(),
                })
                .collect(),
            inputs: d.inputs().iter().map(label).collect(),
            outputs: d.outputs().iter().map(label).collect(),
            version: DIAGRAM_VERSION,
        }
    }

    pub fn to_diagram(&self) -> Result<Diagram> {
        if self.version != DIAGRAM_VERSION {
            return Err(Error::Json(format!(
                "unsupported diagram version {}",
                self.version
            )));
        }
        let mut ids = HashMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            if ids.insert(e.label.as_str(), EdgeId(i)).is_some() {
                return Err(Error::Malformed(format!(
                    "duplicate edge label {}",
                    e.label
                )));
            }
        }
        let lookup = |l: &String| {
            ids.get(l.as_str())
                .copied()
                .ok_or_else(|| Error::UnknownEdge(l.clone()))
        };
        let labels = |ls: &[String]| ls.iter().map(lookup).collect::<Result<Vec<_>>>();
        let mut generators = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            let kind = match (g.kind.as_str(), g.angle) {
                ("Z", a) => GeneratorKind::Z(a.unwrap_or(Angle::ZERO)),
                ("H", None) => GeneratorKind::H,
                ("cup", None) => GeneratorKind::Cup,
                ("cap", None) => GeneratorKind::Cap,
                ("ground", None) => GeneratorKind::Ground,
                (k, Some(_)) => return Err(Error::Json(format!("{k} takes no angle"))),
                (k, None) => return Err(Error::Json(format!("unknown generator kind {k:?}"))),
            };
            generators.push(Generator {
                kind,
                inputs: labels(&g.inputs)?,
                outputs: labels(&g.outputs)?,
            });
        }
        let d = Diagram::from_parts(
            self.edges.iter().map(|e| e.label.clone()).collect(),
            generators,
            labels(&self.inputs)?,
            labels(&self.outputs)?,
        )?;
        for (e, doc) in d.edges().iter().zip(&self.edges) {
            if End::from(doc.top) != e.top || End::from(doc.bottom) != e.bottom {
                return Err(Error::Malformed(format!(
                    "endpoints of {} disagree with the ports",
                    doc.label
                )));
            }
        }
        Ok(d)
    }
}

pub fn diagram_to_json(d: &Diagram) -> Result<String> {
    pretty(&DiagramDoc::from_diagram(d))
}

pub fn diagram_from_json(text: &str) -> Result<Diagram> {
    serde_json::from_str::<DiagramDoc>(text)?.to_diagram()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenDoc {
    pub bits: Vec<u8>,
    pub dir: Dir,
    pub edge: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub coeff: [f64; 2],
    pub tokens: Vec<TokenDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub machine: String,
    pub terms: Vec<TermDoc>,
}

/// Tokens that can be written with edge labels.
pub trait TokenCodec: TokenLike {
    const MACHINE: &'static str;

    fn from_parts(edge: EdgeId, dir: Dir, bits: &[u8]) -> Option<Self>;

    fn to_doc(&self, d: &Diagram) -> TokenDoc {
        TokenDoc {
            bits: self.bits(),
            dir: self.dir(),
            edge: d.name(self.edge()).to_string(),
        }
    }

    fn from_doc(doc: &TokenDoc, d: &Diagram) -> Result<Self> {
        let e = d.edge_by_name(&doc.edge)?;
        if doc.bits.iter().any(|&b| b > 1) {
            return Err(Error::Json(format!("bits {:?} are not 0/1", doc.bits)));
        }
        Self::from_parts(e, doc.dir, &doc.bits).ok_or_else(|| {
            Error::Json(format!(
                "{} machine tokens do not carry {} bits",
                Self::MACHINE,
                doc.bits.len()
            ))
        })
    }
}

impl TokenCodec for Token {
    const MACHINE: &'static str = "pure";

    fn from_parts(edge: EdgeId, dir: Dir, bits: &[u8]) -> Option<Self> {
        match bits {
            [b] => Some(Token::new(edge, dir, *b)),
            _ => None,
        }
    }
}

impl TokenCodec for GroundToken {
    const MACHINE: &'static str = "ground";

    fn from_parts(edge: EdgeId, dir: Dir, bits: &[u8]) -> Option<Self> {
        match bits {
            [x, y] => Some(GroundToken::new(edge, dir, *x, *y)),
            _ => None,
        }
    }
}

fn c2(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

fn term_doc<T: TokenCodec>(d: &Diagram, tokens: &[T], c: Complex64) -> TermDoc {
    TermDoc {
        coeff: c2(c),
        tokens: tokens.iter().map(|t| t.to_doc(d)).collect(),
    }
}

fn term_from_doc<T: TokenCodec>(d: &Diagram, doc: &TermDoc) -> Result<(Vec<T>, Complex64)> {
    let toks = doc
        .tokens
        .iter()
        .map(|t| T::from_doc(t, d))
        .collect::<Result<Vec<_>>>()?;
    Ok((toks, Complex64::new(doc.coeff[0], doc.coeff[1])))
}

impl StateDoc {
    pub fn from_state<T: TokenCodec>(d: &Diagram, s: &State<T>) -> StateDoc {
        StateDoc {
            machine: T::MACHINE.to_string(),
            terms: s.iter().map(|(k, c)| term_doc(d, k, *c)).collect(),
        }
    }

    pub fn to_state<T: TokenCodec>(&self, d: &Diagram) -> Result<State<T>> {
        if self.machine != T::MACHINE {
            return Err(Error::Json(format!(
                "expected a {} state, found {}",
                T::MACHINE,
                self.machine
            )));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| term_from_doc(d, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(State::from_terms(terms))
    }
}

pub fn state_to_json<T: TokenCodec>(d: &Diagram, s: &State<T>) -> Result<String> {
    pretty(&StateDoc::from_state(d, s))
}

pub fn state_from_json<T: TokenCodec>(d: &Diagram, text: &str) -> Result<State<T>> {
    serde_json::from_str::<StateDoc>(text)?.to_state(d)
}

/// Row-major entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
    pub rows: usize,
}

impl MatrixDoc {
    pub fn from_matrix(m: &Matrix) -> MatrixDoc {
        MatrixDoc {
            cols: m.cols(),
            data: m.to_row_vec().into_iter().map(c2).collect(),
            rows: m.rows(),
        }
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                got: self.data.len(),
            });
        }
        let data: Vec<Complex64> = self
            .data
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        Matrix::from_row_slice(self.rows, self.cols, &data)
    }
}

pub fn matrix_to_json(m: &Matrix) -> Result<String> {
    pretty(&MatrixDoc::from_matrix(m))
}

pub fn matrix_from_json(text: &str) -> Result<Matrix> {
    serde_json::from_str::<MatrixDoc>(text)?.to_matrix()
}

/// One line of a `.trace.jsonl` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceLine {
    pub consumed: TokenDoc,
    pub digest: String,
    pub edge: String,
    pub generator: usize,
    pub produced: Vec<TermDoc>,
    pub rule: Rule,
    pub step: usize,
    /// The rewritten term before the step.
    pub term: TermDoc,
    pub terms_after: usize,
}

impl TraceLine {
    pub fn from_record<T: TokenCodec>(d: &Diagram, r: &StepRecord<T>) -> TraceLine {
        TraceLine {
            consumed: r.consumed.to_doc(d),
            digest: r.digest.clone(),
            edge: d.name(r.consumed.edge()).to_string(),
            generator: r.gen.0,
            produced: r.produced.iter().map(|(c, k)| term_doc(d, k, *c)).collect(),
            rule: r.rule,
            step: r.step,
            term: term_doc(d, &r.term, r.coeff),
            terms_after: r.terms_after,
        }
    }
}

pub fn trace_to_jsonl<T: TokenCodec>(d: &Diagram, t: &Trace<T>) -> Result<String> {
    let mut out = String::new();
    for r in &t.steps {
        out.push_str(&serde_json::to_string(&TraceLine::from_record(d, r))?);
        out.push('\n');
    }
    Ok(out)
}

pub fn trace_lines(text: &str) -> Result<Vec<TraceLine>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Json(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

pub fn trace_lines_to_jsonl(lines: &[TraceLine]) -> Result<String> {
    let mut out = String::new();
    for l in lines {
        out.push_str(&serde_json::to_string(l)?);
        out.push('\n');
    }
    Ok(out)
}

/// The rebuilt trace and the state it ends in.
pub type Replayed<T> = (Trace<T>, State<T>);

/// Re-runs a recorded trace from `seed`. Every line must name a term present
/// in the current state with the recorded coefficient, the rule must agree,
/// and a non-empty digest must match the recomputed state. Returns the
/// rebuilt trace and the final state.
pub fn replay_jsonl<R: Rules>(
    engine: &Engine<'_, R>,
    seed: &State<R::Token>,
    text: &str,
) -> Result<Replayed<R::Token>>
where
    R::Token: TokenCodec,
{
    let d = engine.diagram;
    let mut s = seed.clone();
    let mut trace = Trace::default();
    for line in trace_lines(text)? {
        let bad = |what: &str| Error::UnexpectedState(format!("step {}: {what}", line.step));
        let (mut key, coeff) = term_from_doc::<R::Token>(d, &line.term)?;
        key.sort();
        let consumed = R::Token::from_doc(&line.consumed, d)?;
        let term = s
            .keys()
            .position(|k| *k == key)
            .ok_or_else(|| bad("term not in state"))?;
        if (s.coeff(&key) - coeff).norm() > 1e-9 {
            return Err(bad("coefficient differs"));
        }
        let token = key
            .iter()
            .position(|t| *t == consumed)
            .ok_or_else(|| bad("token not in term"))?;
        let (next, mut rec) = engine.step_at(&s, Site { term, token })?;
        if rec.rule != line.rule || rec.gen.0 != line.generator {
            return Err(bad("rule differs"));
        }
        rec.step = line.step;
        rec.digest = state_digest(&next);
        if !line.digest.is_empty() && rec.digest != line.digest {
            return Err(bad("digest differs"));
        }
        trace.steps.push(rec);
        s = next;
    }
    Ok((trace, s))
}
