//! Polarity and the structural conditions built on it.

use std::collections::{HashMap, HashSet};

use super::engine::{collide_term, Engine, Trace};
use super::rules::Rules;
use super::scheduler::Site;
use super::state::{State, TermKey};
use super::token::TokenLike;
use crate::diagram::{Cycle, Diagram, Dir, EdgeId, Path};
use crate::error::{Error, Result};

/// Default cap on exhaustive cycle enumeration.
pub const CYCLE_CAP: usize = 100_000;

/// A term together with a path or cycle on which its polarity is out of
/// bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<T> {
    pub term: TermKey<T>,
    pub hops: Vec<(EdgeId, Dir)>,
    pub polarity: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleMode {
    /// Fundamental cycles only. Polarity is linear in the signed edge vector
    /// of a cycle, so this decides balance on every cycle.
    Basis,
    /// Every simple cycle, up to a cap.
    Exhaustive { cap: usize },
}

/// Down tokens minus up tokens, per edge.
pub fn edge_weights<T: TokenLike>(term: &[T]) -> HashMap<EdgeId, i64> {
    let mut w = HashMap::new();
    for t in term {
        *w.entry(t.edge()).or_insert(0) += match t.dir() {
            Dir::Down => 1,
            Dir::Up => -1,
        };
    }
    w
}

fn hop_sign(dir: Dir) -> i64 {
    match dir {
        Dir::Down => 1,
        Dir::Up => -1,
    }
}

/// `P(p, t)`: +1 per token travelling along the path's orientation of its
/// edge, -1 per token against it.
pub fn polarity<T: TokenLike>(hops: &[(EdgeId, Dir)], term: &[T]) -> i64 {
    let w = edge_weights(term);
    hops.iter()
        .map(|&(e, d)| w.get(&e).copied().unwrap_or(0) * hop_sign(d))
        .sum()
}

pub fn polarity_of_path<T: TokenLike>(p: &Path, term: &[T]) -> i64 {
    polarity(&p.hops, term)
}

pub fn polarity_of_cycle<T: TokenLike>(c: &Cycle, term: &[T]) -> i64 {
    polarity(&c.hops, term)
}

/// A path with `|P| >= 2` for this term, if one exists.
///
/// A path with polarity at least 2 can be shortened to start on an edge that
/// contributes +1, so the search only starts there, and it abandons a branch
/// once the tokens left off the path cannot lift the sum to 2. Negative
/// polarities are found as positive ones on the reversed path.
pub fn term_violation<T: TokenLike>(d: &Diagram, term: &[T]) -> Option<Witness<T>> {
    let w = edge_weights(term);
    let total: i64 = w.values().map(|v| v.abs()).sum();
    if total < 2 {
        return None;
    }
    let mut starts: Vec<(EdgeId, Dir)> = Vec::new();
    for (&e, &v) in &w {
        if v.abs() >= 2 {
            let dir = if v > 0 { Dir::Down } else { Dir::Up };
            return Some(Witness {
                term: term.to_vec(),
                hops: vec![(e, dir)],
                polarity: v.abs(),
            });
        }
        if v != 0 {
            starts.push((e, if v > 0 { Dir::Down } else { Dir::Up }));
        }
    }
    starts.sort();
    let mut found: Option<Vec<(EdgeId, Dir)>> = None;
    for start in starts {
        let mut hops = vec![start];
        let mut used = HashSet::from([start.0]);
        let mut passed = HashSet::new();
        d.walk(&mut hops, &mut used, &mut passed, &mut |h| {
            if found.is_some() {
                return false;
            }
            let mut sum = 0;
            let mut on_path = 0;
            for &(e, dir) in h {
                let v = w.get(&e).copied().unwrap_or(0);
                sum += v * hop_sign(dir);
                on_path += v.abs();
            }
            if sum >= 2 {
                found = Some(h.to_vec());
                return false;
            }
            sum + (total - on_path) >= 2
        });
        if let Some(hops) = found {
            let polarity = polarity(&hops, term);
            return Some(Witness {
                term: term.to_vec(),
                hops,
                polarity,
            });
        }
    }
    None
}

/// The first term, in canonical order, that breaks well-formedness.
pub fn well_formedness_witness<T: TokenLike>(d: &Diagram, s: &State<T>) -> Option<Witness<T>> {
    s.keys().find_map(|k| term_violation(d, k))
}

pub fn is_well_formed<T: TokenLike>(d: &Diagram, s: &State<T>) -> bool {
    well_formedness_witness(d, s).is_none()
}

/// Remembers terms already found well-formed, keyed by their token positions
/// (bits do not matter for polarity).
#[derive(Debug, Default)]
pub struct WellFormedCache {
    ok: HashSet<Vec<(EdgeId, Dir)>>,
}

impl WellFormedCache {
    pub fn new() -> Self {
        WellFormedCache::default()
    }

    pub fn check<T: TokenLike>(&mut self, d: &Diagram, term: &[T]) -> Option<Witness<T>> {
        let shape: Vec<(EdgeId, Dir)> = term.iter().map(|t| (t.edge(), t.dir())).collect();
        if self.ok.contains(&shape) {
            return None;
        }
        let w = term_violation(d, term);
        if w.is_none() {
            self.ok.insert(shape);
        }
        w
    }
}

/// Cycles checked in the given mode.
pub fn cycles_for(d: &Diagram, mode: CycleMode) -> Result<Vec<Cycle>> {
    match mode {
        CycleMode::Basis => Ok(d.cycle_basis()),
        CycleMode::Exhaustive { cap } => d.enumerate_cycles(cap),
    }
}

/// The first term and cycle with nonzero polarity.
pub fn cycle_balance_witness<T: TokenLike>(
    d: &Diagram,
    s: &State<T>,
    mode: CycleMode,
) -> Result<Option<Witness<T>>> {
    let cycles = cycles_for(d, mode)?;
    Ok(cycle_witness_in(&cycles, s))
}

pub fn cycle_witness_in<T: TokenLike>(cycles: &[Cycle], s: &State<T>) -> Option<Witness<T>> {
    for k in s.keys() {
        for c in cycles {
            let p = polarity(&c.hops, k);
            if p != 0 {
                return Some(Witness {
                    term: k.clone(),
                    hops: c.hops.clone(),
                    polarity: p,
                });
            }
        }
    }
    None
}

pub fn is_cycle_balanced<T: TokenLike>(d: &Diagram, s: &State<T>) -> Result<bool> {
    Ok(cycle_balance_witness(d, s, CycleMode::Basis)?.is_none())
}

/// Recovers a path `p` ending on the target token's edge, oriented along its
/// direction, with `P(p, initial) = 1`.
///
/// The trace is replayed from `initial` to confirm the target survives. The
/// target's ancestry is then followed backwards through the recorded
/// diffusions, trimmed to a proper path, and checked; if that candidate does
/// not qualify, every path into the target is searched.
pub fn rewind_witness<T: TokenLike>(
    d: &Diagram,
    initial: &[T],
    trace: &Trace<T>,
    target: &T,
) -> Result<Path> {
    let c = trace
        .steps
        .first()
        .map_or(num_complex::Complex64::new(1.0, 0.0), |r| r.coeff);
    let seed = State::term(initial.to_vec(), c);
    let last = trace.replay(&seed)?;
    if !last.keys().any(|k| k.contains(target)) {
        return Err(Error::NoWitness(
            "target token is not in the final state".into(),
        ));
    }
    let mut chain = vec![(target.edge(), target.dir())];
    let mut cur = (target.edge(), target.dir());
    for r in trace.steps.iter().rev() {
        let made_here = r
            .produced
            .iter()
            .any(|(_, toks)| toks.iter().any(|t| (t.edge(), t.dir()) == cur));
        if made_here {
            cur = (r.consumed.edge(), r.consumed.dir());
            chain.push(cur);
        }
    }
    chain.reverse();
    while chain.len() > 1 && !d.is_valid_path(&chain) {
        chain.remove(0);
    }
    if d.is_valid_path(&chain) && polarity(&chain, initial) == 1 {
        return Ok(Path { hops: chain });
    }
    // Exhaustive: walk backwards from the target, then flip.
    let mut best: Option<Vec<(EdgeId, Dir)>> = None;
    let mut hops = vec![(target.edge(), target.dir().flip())];
    let mut used = HashSet::from([target.edge()]);
    let mut passed = HashSet::new();
    d.walk(&mut hops, &mut used, &mut passed, &mut |h| {
        let fwd: Vec<(EdgeId, Dir)> = h.iter().rev().map(|&(e, dir)| (e, dir.flip())).collect();
        if polarity(&fwd, initial) == 1 && best.as_ref().is_none_or(|b| fwd.len() < b.len()) {
            best = Some(fwd);
        }
        true
    });
    best.map(|hops| Path { hops })
        .ok_or_else(|| Error::NoWitness("no path with polarity 1 reaches the target".into()))
}

/// Outcome of driving a badly formed term until two tokens share an edge and
/// a direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Duplicate<T> {
    pub term: TermKey<T>,
    pub edge: EdgeId,
    pub dir: Dir,
    pub steps: usize,
}

fn duplicate_in<T: TokenLike>(term: &[T]) -> Option<(EdgeId, Dir)> {
    term.windows(2)
        .find(|w| w[0].edge() == w[1].edge() && w[0].dir() == w[1].dir())
        .map(|w| (w[0].edge(), w[0].dir()))
}

/// Given a term with `P(p, t) >= 2` on the path `hops`, rewrites it until some
/// edge carries two tokens in the same direction. The path is consumed from
/// its first edge: empty edges and edges with a token against the path are
/// skipped, a head-on pair collides, and a token along the path moves on
/// through the next generator, keeping a resulting term of equal polarity on
/// the rest of the path.
pub fn drive_to_duplicate<R: Rules>(
    engine: &Engine<'_, R>,
    term: &[R::Token],
    hops: &[(EdgeId, Dir)],
) -> Result<Duplicate<R::Token>> {
    let start = polarity(hops, term);
    if start < 2 {
        return Err(Error::NoWitness(format!(
            "path polarity is {start}, not at least 2"
        )));
    }
    let mut t: Vec<R::Token> = term.to_vec();
    t.sort();
    let mut p = hops.to_vec();
    let mut steps = 0;
    loop {
        if let Some((edge, dir)) = duplicate_in(&t) {
            return Ok(Duplicate {
                term: t,
                edge,
                dir,
                steps,
            });
        }
        let Some(&(e0, o)) = p.first() else {
            return Err(Error::NoWitness("path exhausted".into()));
        };
        let on_edge: Vec<usize> = (0..t.len()).filter(|&i| t[i].edge() == e0).collect();
        match on_edge.len() {
            0 => {
                p.remove(0);
            }
            2 => {
                // one each way; collide them
                let (k, _) = collide_term(&t)
                    .ok_or_else(|| Error::NoWitness("head-on pair disagrees".into()))?;
                t = k;
                p.remove(0);
            }
            1 => {
                let i = on_edge[0];
                if t[i].dir() != o {
                    p.remove(0);
                    continue;
                }
                let s = State::term(t.clone(), num_complex::Complex64::new(1.0, 0.0));
                let site = Site { term: 0, token: i };
                let (_, record) = engine.step_at(&s, site)?;
                steps += 1;
                let rest = &p[1..];
                let next = record
                    .results
                    .iter()
                    .map(|(k, _)| k)
                    .find(|k| polarity(rest, k) >= 2)
                    .cloned()
                    .ok_or_else(|| Error::NoWitness("every branch lost polarity".into()))?;
                t = next;
                p.remove(0);
            }
            _ => unreachable!("three tokens on one edge include a same-direction pair"),
        }
    }
}
