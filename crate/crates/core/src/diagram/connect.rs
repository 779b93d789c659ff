//! Joining the connected components of a diagram without changing its
//! interpretation.

use super::{Diagram, GeneratorKind};
use crate::angle::Angle;
use crate::error::Result;

/// Returns a connected diagram with the same interpretation.
///
/// Every component gets a host green spider: an existing one, or a `Z(1,1,0)`
/// spliced onto one of its edges. Each host grows one extra output leg, and the
/// `k` legs meet in a red `X(k,k,0)` whose outputs are each closed by `Z(1,0,0)`.
/// That gadget is the effect `Σ_a ⟨a|` = `(⟨0|+⟨1|)^⊗k`, and a spider with one
/// leg closed by `⟨0|+⟨1|` is the spider without it.
pub fn connect_components(d: &Diagram) -> Result<Diagram> {
    let comps = d.connected_components();
    if comps.len() <= 1 {
        return Ok(d.clone());
    }
    let mut out = d.clone();
    let mut hosts = Vec::with_capacity(comps.len());
    for comp in &comps {
        let existing = comp
            .diagram
            .generators()
            .iter()
            .position(|g| matches!(g.kind, GeneratorKind::Z(_)))
            .map(|local| comp.gen_map[local]);
        let host = match existing {
            Some(g) => g,
            // Every component without a spider has an edge: only spiders may
            // have no ports at all.
            None => out.split_with_identity_spider(comp.edge_map[0]),
        };
        hosts.push(host);
    }
    let k = hosts.len();
    let hub = out.push_generator(GeneratorKind::Z(Angle::ZERO));
    for &host in &hosts {
        let h = out.push_generator(GeneratorKind::H);
        out.link(host, h, "j");
        out.link(h, hub, "j");
    }
    for _ in 0..k {
        let h = out.push_generator(GeneratorKind::H);
        let cap = out.push_generator(GeneratorKind::Z(Angle::ZERO));
        out.link(hub, h, "j");
        out.link(h, cap, "j");
    }
    out.validate()?;
    Ok(out)
}
