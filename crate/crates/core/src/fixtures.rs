//! Named diagrams used throughout the tests and the CLI benchmarks.

use crate::angle::Angle;
use crate::diagram::{Diagram, EdgeId};

/// `(Z(1,2,0) ⊗ id) ; (id ⊗ X(2,1,0))` with edges
/// `a1 b1 e1 a2 e2 e3 e4 b2`: `e1` runs from the green spider into the first
/// Hadamard, `e2`/`e3` feed the inner spider and `e4` leaves it. Interprets to
/// `CNOT / √2`.
pub fn cnot() -> Diagram {
    let mut d = Diagram::z(1, 2, Angle::ZERO)
        .tensor(&Diagram::identity_wire())
        .then(&Diagram::identity_wire().tensor(&Diagram::red_spider(2, 1, Angle::ZERO)))
        .expect("arities line up");
    d.relabel_standard();
    d
}

/// `Z(1,2,0) ; Z(2,1,0)`: input `a`, the double edge `b`, `c`, output `d`.
pub fn spider_special() -> Diagram {
    let mut d = Diagram::z(1, 2, Angle::ZERO)
        .then(&Diagram::z(2, 1, Angle::ZERO))
        .expect("arities line up");
    for (i, name) in ["a", "b", "c", "d"].into_iter().enumerate() {
        d.set_edge_name(EdgeId(i), name).unwrap();
    }
    d
}

/// The `n`-in `n`-out green spider.
pub fn spider(n: usize, angle: Angle) -> Diagram {
    let mut d = Diagram::z(n, n, angle);
    d.relabel_standard();
    d
}

/// `n` CNOTs on the same pair of wires.
pub fn cnot_chain(n: usize) -> Diagram {
    let mut d = Diagram::identity(2);
    for _ in 0..n {
        d = d.then(&cnot()).expect("two wires throughout");
    }
    d.relabel_standard();
    d
}
