//! File formats: the diagram language (`.zxd`), diagram documents (`.zxj`),
//! token states (`.state.json`), traces (`.trace.jsonl`) and matrices
//! (`.mat.json`).

pub mod dsl;
pub mod json;

use std::path::Path;

pub use dsl::{parse_dsl, parse_expr, Atom, Expr};
pub use json::{
    diagram_from_json, diagram_to_json, matrix_from_json, matrix_to_json, replay_jsonl,
    state_from_json, state_to_json, trace_lines, trace_lines_to_jsonl, trace_to_jsonl, DiagramDoc,
    MatrixDoc, Replayed, StateDoc, TokenCodec, TraceLine,
};

use crate::diagram::Diagram;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Dsl,
    DiagramJson,
    State,
    Trace,
    Matrix,
}

impl Format {
    pub fn from_path(path: &Path) -> Option<Format> {
        let name = path.file_name()?.to_str()?;
        [
            (".trace.jsonl", Format::Trace),
            (".mat.json", Format::Matrix),
            (".state.json", Format::State),
            (".zxd", Format::Dsl),
            (".zxj", Format::DiagramJson),
        ]
        .into_iter()
        .find(|(ext, _)| name.ends_with(ext))
        .map(|(_, f)| f)
    }
}

/// Reads a diagram from `.zxd` or `.zxj` text.
pub fn read_diagram(text: &str, format: Format) -> Result<Diagram> {
    match format {
        Format::Dsl => parse_dsl(text),
        Format::DiagramJson => diagram_from_json(text),
        other => Err(Error::Json(format!("{other:?} files do not hold diagrams"))),
    }
}
