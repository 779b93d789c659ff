use thiserror::Error;

use crate::diagram::EdgeId;

/// Errors raised by diagram construction, interpretation and the token machines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid arity for {kind}: {inputs} inputs, {outputs} outputs")]
    InvalidArity {
        kind: &'static str,
        inputs: usize,
        outputs: usize,
    },

    #[error("arity mismatch: left side has {left} outputs, right side has {right} inputs")]
    ArityMismatch { left: usize, right: usize },

    #[error("cannot compose `{left}` ({outputs} outputs) with `{right}` ({inputs} inputs)")]
    CompositionMismatch {
        left: String,
        right: String,
        outputs: usize,
        inputs: usize,
    },

    #[error("malformed diagram: {0}")]
    Malformed(String),

    #[error("unknown edge {0}")]
    UnknownEdge(String),

    #[error("boundary slot {index} out of range ({len} slots)")]
    SlotOutOfRange { index: usize, len: usize },

    #[error("diagram contains a ground generator; use the mixed-process interpretation")]
    GroundPresent,

    #[error("diagram is not connected ({components} components)")]
    NotConnected { components: usize },

    #[error("diagram has no edges")]
    NoEdges,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("diagram too wide for dense interpretation ({wires} open wires)")]
    TooWide { wires: usize },

    #[error("token on edge {edge:?} points at a boundary slot; no rule applies")]
    Frozen { edge: EdgeId },

    #[error("site not present in the token state")]
    NoSuchSite,

    #[error("normal form reached")]
    NormalFormReached,

    #[error("token state is not well-formed")]
    NotWellFormed,

    #[error("token state is not cycle-balanced")]
    NotCycleBalanced,

    #[error("more than {cap} cycles")]
    CapExceeded { cap: usize },

    #[error("step fuse tripped after {steps} steps")]
    FuseTripped { steps: usize },

    #[error("unexpected token state: {0}")]
    UnexpectedState(String),

    #[error("no rewinding witness: {0}")]
    NoWitness(String),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
