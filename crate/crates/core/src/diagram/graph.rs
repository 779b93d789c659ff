//! Connectivity, paths and cycles.
//!
//! A path is a sequence of distinct edges where consecutive edges meet at a
//! generator, and every generator is passed through at most once. Each edge of
//! a path carries the direction it is traversed in. A cycle is a path whose
//! last edge also meets the first one at a generator that has not been passed
//! through.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use super::{Diagram, Dir, EdgeId, End, GenId, Generator};
use crate::error::{Error, Result};

/// Visitor for `Diagram::walk`; returns `false` to prune.
pub(crate) type PathVisitor<'a> = dyn FnMut(&[(EdgeId, Dir)]) -> bool + 'a;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub hops: Vec<(EdgeId, Dir)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cycle {
    pub hops: Vec<(EdgeId, Dir)>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    pub fn reversed(&self) -> Path {
        Path {
            hops: self
                .hops
                .iter()
                .rev()
                .map(|&(e, d)| (e, d.flip()))
                .collect(),
        }
    }

    pub fn orientation(&self, e: EdgeId) -> Option<Dir> {
        self.hops.iter().find(|h| h.0 == e).map(|h| h.1)
    }
}

impl Cycle {
    pub fn orientation(&self, e: EdgeId) -> Option<Dir> {
        self.hops.iter().find(|h| h.0 == e).map(|h| h.1)
    }
}

/// A connected piece of a diagram together with where its boundary slots sit
/// in the parent diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub diagram: Diagram,
    /// `input_slots[i]` is the parent input slot of the component's input `i`.
    pub input_slots: Vec<usize>,
    pub output_slots: Vec<usize>,
    /// Parent edge id of each component edge.
    pub edge_map: Vec<EdgeId>,
    /// Parent generator id of each component generator.
    pub gen_map: Vec<GenId>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl Diagram {
    /// Generator at the far end of `e` when travelling in `dir`.
    fn gen_towards(&self, e: EdgeId, dir: Dir) -> Option<GenId> {
        self.edge(e).end_towards(dir).gen()
    }

    /// Edges leaving generator `g`, other than through the port `e` arrived
    /// at, with the direction that moves away from `g`.
    fn exits(&self, g: GenId, arrived: (EdgeId, Dir)) -> Vec<(EdgeId, Dir)> {
        let gen: &Generator = self.generator(g);
        let (ae, ad) = arrived;
        // A token moving down arrives at an input port; moving up, at an output port.
        let mut out = Vec::new();
        for (port, &f) in gen.inputs.iter().enumerate() {
            let same =
                ad == Dir::Down && f == ae && self.edge(ae).bottom == (End::Port { gen: g, port });
            if !same {
                out.push((f, Dir::Up));
            }
        }
        for (port, &f) in gen.outputs.iter().enumerate() {
            let same =
                ad == Dir::Up && f == ae && self.edge(ae).top == (End::Port { gen: g, port });
            if !same {
                out.push((f, Dir::Down));
            }
        }
        out
    }

    /// Maximal connected pieces. Every generator and edge lands in exactly one
    /// component; bare wires and isolated scalar spiders are components of
    /// their own.
    pub fn connected_components(&self) -> Vec<Component> {
        let ng = self.generators().len();
        let ne = self.edges().len();
        // items: generators 0..ng, edges ng..ng+ne
        let mut uf = UnionFind((0..ng + ne).collect());
        for (i, e) in self.edges().iter().enumerate() {
            for end in [e.top, e.bottom] {
                if let Some(g) = end.gen() {
                    uf.union(ng + i, g.0);
                }
            }
        }
        let mut groups: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for g in 0..ng {
            let r = uf.find(g);
            groups.entry(r).or_default().0.push(g);
        }
        for e in 0..ne {
            let r = uf.find(ng + e);
            groups.entry(r).or_default().1.push(e);
        }
        groups
            .into_values()
            .map(|(gens, edges)| self.extract_component(&gens, &edges))
            .collect()
    }

    fn extract_component(&self, gens: &[usize], edges: &[usize]) -> Component {
        let emap: HashMap<usize, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let remap = |e: &EdgeId| EdgeId(emap[&e.0]);
        let generators = gens
            .iter()
            .map(|&g| {
                let gen = self.generator(GenId(g));
                Generator {
                    kind: gen.kind,
                    inputs: gen.inputs.iter().map(remap).collect(),
                    outputs: gen.outputs.iter().map(remap).collect(),
                }
            })
            .collect();
        let mut inputs = Vec::new();
        let mut input_slots = Vec::new();
        for (i, e) in self.inputs().iter().enumerate() {
            if let Some(&local) = emap.get(&e.0) {
                inputs.push(EdgeId(local));
                input_slots.push(i);
            }
        }
        let mut outputs = Vec::new();
        let mut output_slots = Vec::new();
        for (j, e) in self.outputs().iter().enumerate() {
            if let Some(&local) = emap.get(&e.0) {
                outputs.push(EdgeId(local));
                output_slots.push(j);
            }
        }
        let names = edges
            .iter()
            .map(|&e| self.edges()[e].name.clone())
            .collect();
        let diagram = Diagram::from_parts(names, generators, inputs, outputs)
            .expect("a component of a valid diagram is valid");
        Component {
            diagram,
            input_slots,
            output_slots,
            edge_map: edges.iter().map(|&e| EdgeId(e)).collect(),
            gen_map: gens.iter().map(|&g| GenId(g)).collect(),
        }
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// All paths from `from` to `to`, each starting with `from` and ending with
    /// `to`. For `from == to` both single-edge orientations are returned.
    pub fn paths_between(&self, from: EdgeId, to: EdgeId) -> Result<Vec<Path>> {
        self.check_edge(from)?;
        self.check_edge(to)?;
        let mut found = Vec::new();
        for dir in [Dir::Down, Dir::Up] {
            let mut hops = vec![(from, dir)];
            let mut used_edges = HashSet::from([from]);
            let mut passed = HashSet::new();
            self.walk(&mut hops, &mut used_edges, &mut passed, &mut |hops| {
                if hops.last().unwrap().0 == to {
                    found.push(Path {
                        hops: hops.to_vec(),
                    });
                }
                true
            });
        }
        Ok(found)
    }

    /// Depth-first walk over every path extending `hops`. The visitor returns
    /// `false` to stop descending below the current path.
    pub(crate) fn walk(
        &self,
        hops: &mut Vec<(EdgeId, Dir)>,
        used_edges: &mut HashSet<EdgeId>,
        passed: &mut HashSet<GenId>,
        visit: &mut PathVisitor<'_>,
    ) {
        if !visit(hops) {
            return;
        }
        let last = *hops.last().unwrap();
        let Some(g) = self.gen_towards(last.0, last.1) else {
            return;
        };
        if passed.contains(&g) {
            return;
        }
        passed.insert(g);
        for (f, d) in self.exits(g, last) {
            if used_edges.contains(&f) {
                continue;
            }
            used_edges.insert(f);
            hops.push((f, d));
            self.walk(hops, used_edges, passed, visit);
            hops.pop();
            used_edges.remove(&f);
        }
        passed.remove(&g);
    }

    /// Every path of the diagram, one orientation each.
    pub fn all_paths(&self) -> Vec<Path> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for e in self.edge_ids() {
            for dir in [Dir::Down, Dir::Up] {
                let mut hops = vec![(e, dir)];
                let mut used = HashSet::from([e]);
                let mut passed = HashSet::new();
                self.walk(&mut hops, &mut used, &mut passed, &mut |h| {
                    let p = Path { hops: h.to_vec() };
                    if !seen.contains(&p.reversed()) {
                        seen.insert(p.clone());
                        out.push(p);
                    }
                    true
                });
            }
        }
        out
    }

    /// Length of the shortest path between two edges, counted as edges minus
    /// one. `None` when no path exists.
    pub fn distance(&self, from: EdgeId, to: EdgeId) -> Result<Option<usize>> {
        self.check_edge(from)?;
        self.check_edge(to)?;
        let mut dist = vec![usize::MAX; self.edges().len()];
        dist[from.0] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(e) = queue.pop_front() {
            if e == to {
                return Ok(Some(dist[e.0]));
            }
            let edge = self.edge(e);
            for g in [edge.top.gen(), edge.bottom.gen()].into_iter().flatten() {
                let gen = self.generator(g);
                for &f in gen.inputs.iter().chain(&gen.outputs) {
                    if dist[f.0] == usize::MAX {
                        dist[f.0] = dist[e.0] + 1;
                        queue.push_back(f);
                    }
                }
            }
        }
        Ok(None)
    }

    /// Exhaustive enumeration of simple cycles, each reported once. Fails when
    /// more than `cap` cycles exist.
    pub fn enumerate_cycles(&self, cap: usize) -> Result<Vec<Cycle>> {
        let mut out = Vec::new();
        for e0 in self.edge_ids() {
            let edge = self.edge(e0);
            let (Some(start), Some(first)) = (edge.top.gen(), edge.bottom.gen()) else {
                continue;
            };
            if start == first {
                out.push(Cycle {
                    hops: vec![(e0, Dir::Down)],
                });
                if out.len() > cap {
                    return Err(Error::CapExceeded { cap });
                }
                continue;
            }
            let mut hops = vec![(e0, Dir::Down)];
            let mut passed = HashSet::from([start, first]);
            let mut used = HashSet::from([e0]);
            self.cycle_walk(
                e0,
                start,
                first,
                &mut hops,
                &mut passed,
                &mut used,
                &mut out,
                cap,
            )?;
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn cycle_walk(
        &self,
        e0: EdgeId,
        start: GenId,
        at: GenId,
        hops: &mut Vec<(EdgeId, Dir)>,
        passed: &mut HashSet<GenId>,
        used: &mut HashSet<EdgeId>,
        out: &mut Vec<Cycle>,
        cap: usize,
    ) -> Result<()> {
        let last = *hops.last().unwrap();
        for (f, d) in self.exits(at, last) {
            if f.0 <= e0.0 || used.contains(&f) {
                continue;
            }
            let Some(next) = self.gen_towards(f, d) else {
                continue;
            };
            if next == start {
                let mut h = hops.clone();
                h.push((f, d));
                out.push(Cycle { hops: h });
                if out.len() > cap {
                    return Err(Error::CapExceeded { cap });
                }
                continue;
            }
            if passed.contains(&next) {
                continue;
            }
            passed.insert(next);
            used.insert(f);
            hops.push((f, d));
            self.cycle_walk(e0, start, next, hops, passed, used, out, cap)?;
            hops.pop();
            used.remove(&f);
            passed.remove(&next);
        }
        Ok(())
    }

    /// Fundamental cycles of a spanning forest over the generators. Polarity
    /// is linear in the signed edge vector of a cycle, and these cycles span
    /// the integer cycle space, so zero polarity on all of them means zero
    /// polarity on every cycle.
    pub fn cycle_basis(&self) -> Vec<Cycle> {
        let ng = self.generators().len();
        // parent[g] = (parent generator, edge used)
        let mut parent: Vec<Option<(GenId, EdgeId)>> = vec![None; ng];
        let mut depth = vec![usize::MAX; ng];
        let mut tree_edge = vec![false; self.edges().len()];
        for root in 0..ng {
            if depth[root] != usize::MAX {
                continue;
            }
            depth[root] = 0;
            let mut queue = VecDeque::from([GenId(root)]);
            while let Some(g) = queue.pop_front() {
                let gen = self.generator(g);
                for &f in gen.inputs.iter().chain(&gen.outputs) {
                    let edge = self.edge(f);
                    let (Some(a), Some(b)) = (edge.top.gen(), edge.bottom.gen()) else {
                        continue;
                    };
                    let other = if a == g { b } else { a };
                    if depth[other.0] == usize::MAX {
                        depth[other.0] = depth[g.0] + 1;
                        parent[other.0] = Some((g, f));
                        tree_edge[f.0] = true;
                        queue.push_back(other);
                    }
                }
            }
        }
        // Direction that moves from generator `from` across edge `f`.
        let away = |f: EdgeId, from: GenId| -> Dir {
            if self.edge(f).top.gen() == Some(from) {
                Dir::Down
            } else {
                Dir::Up
            }
        };
        let mut out = Vec::new();
        for f in self.edge_ids() {
            if tree_edge[f.0] {
                continue;
            }
            let edge = self.edge(f);
            let (Some(u), Some(v)) = (edge.top.gen(), edge.bottom.gen()) else {
                continue;
            };
            // f goes u -> v; return v -> ... -> u through the tree.
            let mut hops = vec![(f, Dir::Down)];
            let (mut a, mut b) = (v, u);
            let mut up_part = Vec::new(); // from v towards the meeting point
            let mut down_part = Vec::new(); // from u towards the meeting point, reversed later
            while a != b {
                if depth[a.0] >= depth[b.0] {
                    let (p, e) = parent[a.0].unwrap();
                    up_part.push((e, away(e, a)));
                    a = p;
                } else {
                    let (p, e) = parent[b.0].unwrap();
                    // traversed from p to b
                    down_part.push((e, away(e, p)));
                    b = p;
                }
            }
            hops.extend(up_part);
            hops.extend(down_part.into_iter().rev());
            out.push(Cycle { hops });
        }
        out
    }

    fn check_edge(&self, e: EdgeId) -> Result<()> {
        if e.0 < self.edges().len() {
            Ok(())
        } else {
            Err(Error::UnknownEdge(e.to_string()))
        }
    }

    /// Checks the path invariants: distinct edges, consecutive edges meeting
    /// at the generator the previous hop heads into, and no generator passed
    /// through twice.
    pub fn is_valid_path(&self, hops: &[(EdgeId, Dir)]) -> bool {
        if hops.is_empty() {
            return false;
        }
        let mut edges = HashSet::new();
        let mut passed = HashSet::new();
        for w in hops.windows(2) {
            let (e, d) = w[0];
            let (f, fd) = w[1];
            let Some(g) = self.gen_towards(e, d) else {
                return false;
            };
            if !passed.insert(g) {
                return false;
            }
            // f must leave g in direction fd
            let leaves = match fd {
                Dir::Down => self.edge(f).top.gen() == Some(g),
                Dir::Up => self.edge(f).bottom.gen() == Some(g),
            };
            if !leaves {
                return false;
            }
        }
        hops.iter().all(|h| edges.insert(h.0))
    }

    pub fn is_valid_cycle(&self, hops: &[(EdgeId, Dir)]) -> bool {
        if !self.is_valid_path(hops) {
            return false;
        }
        let (last, ld) = *hops.last().unwrap();
        let (first, fd) = hops[0];
        let Some(g) = self.gen_towards(last, ld) else {
            return false;
        };
        let starts_here = match fd {
            Dir::Down => self.edge(first).top.gen() == Some(g),
            Dir::Up => self.edge(first).bottom.gen() == Some(g),
        };
        if !starts_here {
            return false;
        }
        // the closing generator must not have been passed through already
        let mut passed = HashSet::new();
        for &(e, d) in &hops[..hops.len() - 1] {
            passed.insert(self.gen_towards(e, d).unwrap());
        }
        !passed.contains(&g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::Angle;
    use crate::fixtures;

    #[test]
    fn components_of_tensor() {
        let d = Diagram::h().tensor(&Diagram::h());
        let comps = d.connected_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[1].input_slots, vec![1]);
        assert!(fixtures::cnot().is_connected());
    }

    #[test]
    fn components_partition() {
        let d = Diagram::z(0, 0, Angle::pi_ratio(1, 2))
            .tensor(&Diagram::identity_wire())
            .tensor(&fixtures::cnot());
        let comps = d.connected_components();
        assert_eq!(comps.len(), 3);
        let gens: usize = comps.iter().map(|c| c.diagram.generators().len()).sum();
        let edges: usize = comps.iter().map(|c| c.diagram.edges().len()).sum();
        assert_eq!(gens, d.generators().len());
        assert_eq!(edges, d.edges().len());
    }

    #[test]
    fn cnot_paths_and_distance() {
        let d = fixtures::cnot();
        let a1 = d.edge_by_name("a1").unwrap();
        let b2 = d.edge_by_name("b2").unwrap();
        let paths = d.paths_between(a1, b2).unwrap();
        assert!(!paths.is_empty());
        for p in &paths {
            assert!(d.is_valid_path(&p.hops));
        }
        assert_eq!(d.distance(a1, a1).unwrap(), Some(0));
        // a1 -g1- e1 -h- e2 -g2- e4 -h- b2
        assert_eq!(d.distance(a1, b2).unwrap(), Some(4));
        let two = Diagram::h().tensor(&Diagram::h());
        assert_eq!(two.distance(EdgeId(0), EdgeId(2)).unwrap(), None);
    }

    #[test]
    fn cnot_is_acyclic_spider_special_has_double_edge() {
        assert!(fixtures::cnot().enumerate_cycles(100).unwrap().is_empty());
        let d = fixtures::spider_special();
        let cycles = d.enumerate_cycles(100).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].hops.len(), 2);
        assert!(d.is_valid_cycle(&cycles[0].hops));
        assert_eq!(d.cycle_basis().len(), 1);
    }

    #[test]
    fn self_loop_is_a_cycle() {
        // Z(1,1) with its output fed back to a second input.
        let g = Generator {
            kind: crate::diagram::GeneratorKind::Z(Angle::ZERO),
            inputs: vec![EdgeId(0), EdgeId(2)],
            outputs: vec![EdgeId(1), EdgeId(2)],
        };
        let d = Diagram::from_parts(
            vec!["a".into(), "b".into(), "l".into()],
            vec![g],
            vec![EdgeId(0)],
            vec![EdgeId(1)],
        )
        .unwrap();
        let cycles = d.enumerate_cycles(10).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].hops, vec![(EdgeId(2), Dir::Down)]);
        assert_eq!(d.cycle_basis().len(), 1);
    }
}
