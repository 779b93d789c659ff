//! The rewriting system: one diffusion, then every collision.

use std::collections::{BTreeSet, HashMap};

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use super::invariants::{cycle_balance_witness, well_formedness_witness, CycleMode};
use super::rules::{Rule, Rules};
use super::scheduler::{Candidate, Scheduler, Site};
use super::state::{State, TermKey};
use super::token::TokenLike;
use crate::diagram::{Diagram, GenId, GeneratorKind};
use crate::error::{Error, Result};

/// Hard ceiling on the automatic fuse.
const FUSE_CEILING: usize = 1 << 28;

/// What happened in one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<T> {
    pub step: usize,
    pub rule: Rule,
    pub gen: GenId,
    /// The rewritten term, as it was before the step, and its coefficient.
    pub term: TermKey<T>,
    pub coeff: Complex64,
    pub consumed: T,
    /// Right-hand side of the diffusion rule.
    pub produced: Vec<(Complex64, Vec<T>)>,
    /// Surviving terms after collisions, coefficients included, before they
    /// merge into the rest of the state.
    pub results: Vec<(TermKey<T>, Complex64)>,
    pub collisions: usize,
    pub terms_after: usize,
    /// SHA-256 of the state after the step; empty unless recording.
    pub digest: String,
}

/// A state after one step, with the record of that step.
pub type Stepped<T> = (State<T>, StepRecord<T>);

/// Called after every step with its record and the new state.
pub type Observer<'a, T> = dyn FnMut(&StepRecord<T>, &State<T>) + 'a;

#[derive(Debug, Clone, PartialEq)]
pub struct Trace<T> {
    pub steps: Vec<StepRecord<T>>,
}

impl<T> Default for Trace<T> {
    fn default() -> Self {
        Trace { steps: Vec::new() }
    }
}

impl<T: TokenLike> Trace<T> {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Re-applies every step to `seed`, checking that each rewritten term is
    /// present with the recorded coefficient.
    pub fn replay(&self, seed: &State<T>) -> Result<State<T>> {
        let mut s = seed.clone();
        for r in &self.steps {
            let c = s
                .remove(&r.term)
                .ok_or_else(|| Error::UnexpectedState(format!("step {}: term missing", r.step)))?;
            if (c - r.coeff).norm() > 1e-9 {
                return Err(Error::UnexpectedState(format!(
                    "step {}: coefficient differs",
                    r.step
                )));
            }
            for (k, c) in &r.results {
                s.add_sorted(k.clone(), *c);
            }
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Step limit; `None` picks [`default_fuse`].
    pub fuse: Option<usize>,
    /// A run whose state grows past this many terms trips the fuse as well.
    pub max_terms: usize,
    /// Skip the well-formedness and cycle-balance checks on the seed.
    pub force: bool,
    /// Keep a [`Trace`] with digests.
    pub record: bool,
    /// Track which generators each term has passed through.
    pub track_visits: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            fuse: None,
            max_terms: 1 << 20,
            force: false,
            record: false,
            track_visits: false,
        }
    }
}

impl RunConfig {
    pub fn recording() -> Self {
        RunConfig {
            record: true,
            ..RunConfig::default()
        }
    }

    pub fn forced(fuse: Option<usize>) -> Self {
        RunConfig {
            force: true,
            fuse,
            ..RunConfig::default()
        }
    }
}

/// `4 · max(g,1) · terms · 2^(k·h + 2)` where `h` counts Hadamards and `k` is
/// the number of bits per token. Each term meets every generator at most once
/// and only Hadamards branch, so terminating runs stay far below this.
pub fn default_fuse(d: &Diagram, seed_terms: usize, bits: usize) -> usize {
    let g = d.generators().len().max(1);
    let h = d.count_kind(|k| *k == GeneratorKind::H);
    let exp = (bits * h + 2).min(24) as u32;
    4usize
        .saturating_mul(g)
        .saturating_mul(seed_terms.max(1))
        .saturating_mul(1usize << exp)
        .min(FUSE_CEILING)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Run<T: TokenLike> {
    pub state: State<T>,
    pub steps: usize,
    pub trace: Trace<T>,
    /// Largest number of terms seen along the way.
    pub peak_terms: usize,
    /// Steps that sent a term into a generator it had already passed through.
    pub revisits: usize,
}

/// Pairs head-on tokens edge by edge. `None` when a pair disagrees and the
/// term vanishes; otherwise the survivors and how many pairs met.
pub fn collide_term<T: TokenLike>(key: &[T]) -> Option<(TermKey<T>, usize)> {
    let mut out = Vec::with_capacity(key.len());
    let mut hits = 0;
    let mut i = 0;
    while i < key.len() {
        let e = key[i].edge();
        let mut j = i;
        while j < key.len() && key[j].edge() == e {
            j += 1;
        }
        let group = &key[i..j];
        let split = group.partition_point(|t| t.dir() == crate::diagram::Dir::Down);
        let (downs, ups) = group.split_at(split);
        let pairs = downs.len().min(ups.len());
        for k in 0..pairs {
            if !downs[k].bits_match(&ups[k]) {
                return None;
            }
        }
        hits += pairs;
        out.extend_from_slice(&downs[pairs..]);
        out.extend_from_slice(&ups[pairs..]);
        i = j;
    }
    Some((out, hits))
}

/// Applies every collision in every term.
pub fn collide_all<T: TokenLike>(s: &State<T>) -> State<T> {
    let mut out = State::zero();
    for (k, c) in s.iter() {
        if let Some((k2, _)) = collide_term(k) {
            out.add_sorted(k2, *c);
        }
    }
    out
}

pub fn is_collision_free<T: TokenLike>(s: &State<T>) -> bool {
    s.keys()
        .all(|k| collide_term(k).is_some_and(|(_, n)| n == 0))
}

pub fn state_digest<T: TokenLike>(s: &State<T>) -> String {
    let mut h = Sha256::new();
    for (k, c) in s.iter() {
        for t in k {
            h.update(format!("{}{:?}{:?};", t.edge().0, t.dir(), t.bits()));
        }
        h.update(format!("={:.12e},{:.12e}\n", c.re, c.im));
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// A rule table bound to a diagram.
#[derive(Debug, Clone)]
pub struct Engine<'d, R> {
    pub diagram: &'d Diagram,
    pub rules: R,
}

impl<'d, R: Rules> Engine<'d, R> {
    pub fn new(diagram: &'d Diagram, rules: R) -> Self {
        Engine { diagram, rules }
    }

    pub fn is_frozen(&self, t: &R::Token) -> bool {
        self.diagram.target(t.edge(), t.dir()).is_none()
    }

    /// Every movable token, in canonical order.
    pub fn candidates(&self, s: &State<R::Token>) -> Vec<Candidate> {
        let mut out = Vec::new();
        for (ti, (k, _)) in s.iter().enumerate() {
            for (i, t) in k.iter().enumerate() {
                if let Some((gen, _)) = self.diagram.target(t.edge(), t.dir()) {
                    out.push(Candidate {
                        site: Site { term: ti, token: i },
                        edge: t.edge(),
                        dir: t.dir(),
                        gen,
                    });
                }
            }
        }
        out
    }

    /// Normal means every token sits against a boundary slot.
    pub fn is_normal(&self, s: &State<R::Token>) -> bool {
        s.keys().all(|k| k.iter().all(|t| self.is_frozen(t)))
    }

    fn locate(&self, s: &State<R::Token>, site: Site) -> Result<(TermKey<R::Token>, Complex64)> {
        let (k, c) = s.nth(site.term).ok_or(Error::NoSuchSite)?;
        if site.token >= k.len() {
            return Err(Error::NoSuchSite);
        }
        Ok((k.clone(), *c))
    }

    /// One diffusion at `site`, without collisions.
    pub fn diffuse_once(&self, s: &State<R::Token>, site: Site) -> Result<State<R::Token>> {
        let (key, coeff) = self.locate(s, site)?;
        let t = &key[site.token];
        let diff = self.rules.diffuse(self.diagram, t)?;
        let mut out = s.clone();
        out.remove(&key);
        let mut rest = key.clone();
        rest.remove(site.token);
        for (c, toks) in diff.branches {
            let mut k = rest.clone();
            k.extend(toks);
            out.add_term(k, coeff * c);
        }
        Ok(out)
    }

    /// One diffusion at `site` followed by every collision in the rewritten
    /// term. Other terms are untouched.
    pub fn step_at(&self, s: &State<R::Token>, site: Site) -> Result<Stepped<R::Token>> {
        let (key, coeff) = self.locate(s, site)?;
        let t = key[site.token].clone();
        let diff = self.rules.diffuse(self.diagram, &t)?;
        let mut rest = key.clone();
        rest.remove(site.token);
        let mut results = Vec::with_capacity(diff.branches.len());
        let mut collisions = 0;
        for (c, toks) in &diff.branches {
            let mut k = rest.clone();
            k.extend(toks.iter().cloned());
            k.sort();
            match collide_term(&k) {
                Some((k2, n)) => {
                    collisions += n;
                    results.push((k2, coeff * c));
                }
                None => collisions += 1,
            }
        }
        let mut out = s.clone();
        out.remove(&key);
        for (k, c) in &results {
            out.add_sorted(k.clone(), *c);
        }
        let record = StepRecord {
            step: 0,
            rule: diff.rule,
            gen: diff.gen,
            term: key,
            coeff,
            consumed: t,
            produced: diff.branches,
            results,
            collisions,
            terms_after: out.len(),
            digest: String::new(),
        };
        Ok((out, record))
    }

    /// One step at the site the scheduler picks.
    pub fn step(
        &self,
        s: &State<R::Token>,
        scheduler: &mut Scheduler,
    ) -> Result<Stepped<R::Token>> {
        let cands = self.candidates(s);
        if cands.is_empty() {
            return Err(Error::NormalFormReached);
        }
        let pick = scheduler.choose(&cands);
        self.step_at(s, cands[pick].site)
    }

    /// Checks the seed unless forced, then steps until every token is frozen.
    pub fn normalize(
        &self,
        seed: &State<R::Token>,
        scheduler: &mut Scheduler,
        cfg: &RunConfig,
    ) -> Result<Run<R::Token>> {
        self.normalize_with(seed, scheduler, cfg, &mut |_, _| {})
    }

    /// As [`Engine::normalize`], calling `observe` after every step with the
    /// step's record and the new state.
    pub fn normalize_with(
        &self,
        seed: &State<R::Token>,
        scheduler: &mut Scheduler,
        cfg: &RunConfig,
        observe: &mut Observer<'_, R::Token>,
    ) -> Result<Run<R::Token>> {
        if !cfg.force {
            if well_formedness_witness(self.diagram, seed).is_some() {
                return Err(Error::NotWellFormed);
            }
            if cycle_balance_witness(self.diagram, seed, CycleMode::Basis)?.is_some() {
                return Err(Error::NotCycleBalanced);
            }
        }
        let bits = seed
            .keys()
            .flat_map(|k| k.first())
            .map(|t| t.bits().len())
            .next()
            .unwrap_or(1);
        let fuse = cfg
            .fuse
            .unwrap_or_else(|| default_fuse(self.diagram, seed.len(), bits));
        let mut visits: Option<HashMap<TermKey<R::Token>, BTreeSet<GenId>>> =
            cfg.track_visits.then(HashMap::new);
        let mut run = Run {
            state: seed.clone(),
            steps: 0,
            trace: Trace::default(),
            peak_terms: seed.len(),
            revisits: 0,
        };
        loop {
            let cands = self.candidates(&run.state);
            if cands.is_empty() {
                return Ok(run);
            }
            if run.steps >= fuse || run.state.len() > cfg.max_terms {
                return Err(Error::FuseTripped { steps: run.steps });
            }
            let pick = scheduler.choose(&cands);
            let (next, mut record) = self.step_at(&run.state, cands[pick].site)?;
            record.step = run.steps;
            if let Some(v) = visits.as_mut() {
                let mut seen = v.remove(&record.term).unwrap_or_default();
                if !seen.insert(record.gen) {
                    run.revisits += 1;
                }
                for (k, _) in &record.results {
                    if next.coeff(k) != Complex64::new(0.0, 0.0) {
                        v.entry(k.clone()).or_default().extend(seen.iter().copied());
                    } else {
                        v.remove(k);
                    }
                }
            }
            if cfg.record {
                record.digest = state_digest(&next);
            }
            observe(&record, &next);
            run.steps += 1;
            run.peak_terms = run.peak_terms.max(next.len());
            run.state = next;
            if cfg.record {
                run.trace.steps.push(record);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::EdgeId;
    use crate::fixtures;
    use crate::machine::rules::PureRules;
    use crate::machine::token::Token;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn collisions() {
        let e = EdgeId(2);
        let d = EdgeId(3);
        let s = State::from_terms([(
            vec![Token::down(d, 0), Token::up(e, 0), Token::down(e, 0)],
            one(),
        )]);
        assert_eq!(collide_all(&s), State::token(Token::down(d, 0)));
        let s = State::from_terms([(vec![Token::down(e, 1), Token::up(e, 0)], one())]);
        assert!(collide_all(&s).is_empty());
        let free = State::token(Token::down(e, 1));
        assert_eq!(collide_all(&free), free);
        assert!(is_collision_free(&free));
    }

    #[test]
    fn spider_trap_collides_first() {
        let d = fixtures::spider_special();
        let eng = Engine::new(&d, PureRules);
        let (b, c) = (d.edge_by_name("b").unwrap(), d.edge_by_name("c").unwrap());
        let s = State::from_terms([(vec![Token::down(b, 0), Token::down(c, 0)], one())]);
        let (next, rec) = eng.step(&s, &mut Scheduler::Lexicographic).unwrap();
        assert_eq!(rec.consumed, Token::down(b, 0));
        assert_eq!(rec.collisions, 1);
        assert_eq!(
            next,
            State::token(Token::down(d.edge_by_name("d").unwrap(), 0))
        );
        assert_eq!(
            eng.step(&next, &mut Scheduler::Lexicographic).unwrap_err(),
            Error::NormalFormReached
        );
    }

    #[test]
    fn empty_state_is_normal() {
        let d = fixtures::cnot();
        let eng = Engine::new(&d, PureRules);
        let run = eng
            .normalize(
                &State::zero(),
                &mut Scheduler::Lexicographic,
                &RunConfig::recording(),
            )
            .unwrap();
        assert!(run.state.is_empty());
        assert!(run.trace.is_empty());
    }

    #[test]
    fn replay_matches_and_fuse_trips() {
        let d = fixtures::cnot();
        let eng = Engine::new(&d, PureRules);
        let seed = State::from_terms([(
            vec![
                Token::down(EdgeId(0), 1),
                Token::down(d.edge_by_name("a2").unwrap(), 0),
            ],
            one(),
        )]);
        let run = eng
            .normalize(
                &seed,
                &mut Scheduler::Lexicographic,
                &RunConfig::recording(),
            )
            .unwrap();
        assert_eq!(run.trace.replay(&seed).unwrap(), run.state);
        let cfg = RunConfig {
            fuse: Some(2),
            ..RunConfig::default()
        };
        assert_eq!(
            eng.normalize(&seed, &mut Scheduler::Lexicographic, &cfg),
            Err(Error::FuseTripped { steps: 2 })
        );
    }
}
