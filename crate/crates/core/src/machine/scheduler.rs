//! Choosing which token moves next.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::{Diagram, Dir, EdgeId, GenId, GeneratorKind};
use crate::error::{Error, Result};

/// Position of a token inside a state: the term's rank in canonical order and
/// the token's rank inside the term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site {
    pub term: usize,
    pub token: usize,
}

/// A token that can move, with the generator it is about to enter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub site: Site,
    pub edge: EdgeId,
    pub dir: Dir,
    pub gen: GenId,
}

/// Rewriting strategies. Candidates always arrive in canonical order, so the
/// first one is the lexicographically least site.
#[derive(Debug, Clone)]
pub enum Scheduler {
    Lexicographic,
    Random(Box<ChaCha8Rng>),
    /// Moves the token whose generator comes first in a topological order of
    /// the diagram, mimicking slice-by-slice evaluation.
    SliceOrder(Vec<usize>),
    /// Postpones Hadamards, which are the only generators that split terms.
    SparseFirst(Vec<bool>),
    /// Follows a list of `(edge, direction)` moves, then falls back to the
    /// lexicographic choice.
    Scripted(VecDeque<(EdgeId, Dir)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchedulerKind {
    Lexicographic,
    Random,
    SliceOrder,
    SparseFirst,
}

impl FromStr for SchedulerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lex" | "lexicographic" => SchedulerKind::Lexicographic,
            "random" => SchedulerKind::Random,
            "slice" | "slice-order" => SchedulerKind::SliceOrder,
            "sparse" | "sparse-first" => SchedulerKind::SparseFirst,
            other => {
                return Err(Error::Parse {
                    offset: 0,
                    message: format!("unknown scheduler {other:?}"),
                })
            }
        })
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchedulerKind::Lexicographic => "lexicographic",
            SchedulerKind::Random => "random",
            SchedulerKind::SliceOrder => "slice-order",
            SchedulerKind::SparseFirst => "sparse-first",
        })
    }
}

impl Scheduler {
    pub fn build(kind: SchedulerKind, d: &Diagram, seed: u64) -> Scheduler {
        match kind {
            SchedulerKind::Lexicographic => Scheduler::Lexicographic,
            SchedulerKind::Random => Scheduler::random(seed),
            SchedulerKind::SliceOrder => Scheduler::slice_order(d),
            SchedulerKind::SparseFirst => Scheduler::sparse_first(d),
        }
    }

    pub fn random(seed: u64) -> Scheduler {
        Scheduler::Random(Box::new(ChaCha8Rng::seed_from_u64(seed)))
    }

    pub fn slice_order(d: &Diagram) -> Scheduler {
        Scheduler::SliceOrder(topological_ranks(d))
    }

    pub fn sparse_first(d: &Diagram) -> Scheduler {
        Scheduler::SparseFirst(
            d.generators()
                .iter()
                .map(|g| g.kind == GeneratorKind::H)
                .collect(),
        )
    }

    pub fn scripted(moves: impl IntoIterator<Item = (EdgeId, Dir)>) -> Scheduler {
        Scheduler::Scripted(moves.into_iter().collect())
    }

    /// Index into `candidates`, which must be non-empty.
    pub fn choose(&mut self, candidates: &[Candidate]) -> usize {
        debug_assert!(!candidates.is_empty());
        match self {
            Scheduler::Lexicographic => 0,
            Scheduler::Random(rng) => rng.gen_range(0..candidates.len()),
            Scheduler::SliceOrder(rank) => min_index(candidates, |c| rank[c.gen.0]),
            Scheduler::SparseFirst(is_h) => min_index(candidates, |c| is_h[c.gen.0] as usize),
            Scheduler::Scripted(moves) => match moves.pop_front() {
                Some((e, dir)) => candidates
                    .iter()
                    .position(|c| c.edge == e && c.dir == dir)
                    .unwrap_or(0),
                None => 0,
            },
        }
    }
}

fn min_index(candidates: &[Candidate], key: impl Fn(&Candidate) -> usize) -> usize {
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate() {
        if key(c) < key(&candidates[best]) {
            best = i;
        }
    }
    best
}

/// Kahn's algorithm over edges pointing from a generator's outputs to the
/// next generator's inputs. Inside a cycle the smallest pending id goes first.
pub fn topological_ranks(d: &Diagram) -> Vec<usize> {
    let n = d.generators().len();
    let mut indeg = vec![0usize; n];
    for e in d.edges() {
        if let (Some(_), Some(b)) = (e.top.gen(), e.bottom.gen()) {
            indeg[b.0] += 1;
        }
    }
    let mut rank = vec![usize::MAX; n];
    let mut next = 0;
    let mut ready: VecDeque<usize> = (0..n).filter(|&g| indeg[g] == 0).collect();
    while next < n {
        let g = match ready.pop_front() {
            Some(g) => g,
            None => (0..n).find(|&g| rank[g] == usize::MAX).unwrap(),
        };
        if rank[g] != usize::MAX {
            continue;
        }
        rank[g] = next;
        next += 1;
        for &e in &d.generator(GenId(g)).outputs {
            if let Some(b) = d.edge(e).bottom.gen() {
                indeg[b.0] = indeg[b.0].saturating_sub(1);
                if indeg[b.0] == 0 && rank[b.0] == usize::MAX {
                    ready.push_back(b.0);
                }
            }
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn cnot_ranks_follow_the_wires() {
        let d = fixtures::cnot();
        let r = topological_ranks(&d);
        // the copying spider comes before the Hadamard it feeds
        let z = d.edge(d.edge_by_name("e1").unwrap()).top.gen().unwrap();
        let h = d.edge(d.edge_by_name("e1").unwrap()).bottom.gen().unwrap();
        assert!(r[z.0] < r[h.0]);
        let mut sorted = r.clone();
        sorted.sort();
        assert_eq!(sorted, (0..d.generators().len()).collect::<Vec<_>>());
    }

    #[test]
    fn ranks_cover_cycles() {
        let d = fixtures::spider_special();
        let r = topological_ranks(&d);
        assert_eq!(r, vec![0, 1]);
    }

    #[test]
    fn parse_kinds() {
        assert_eq!(
            "slice".parse::<SchedulerKind>().unwrap(),
            SchedulerKind::SliceOrder
        );
        assert!("bogus".parse::<SchedulerKind>().is_err());
    }
}
