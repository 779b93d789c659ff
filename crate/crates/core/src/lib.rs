//! A ZX-calculus engine: diagrams, their matrix interpretation, and the
//! asynchronous token machines (pure and ground) that compute the same
//! semantics by moving particles along the wires.

pub mod angle;
pub mod diagram;
pub mod error;
pub mod fixtures;
pub mod interp;
pub mod machine;
pub mod textio;
pub mod verify;

pub use angle::Angle;
pub use diagram::{Diagram, Dir, EdgeId, GenId, GeneratorKind};
pub use error::{Error, Result};
pub use interp::{interp, interp_cpm, Ket, Matrix};
