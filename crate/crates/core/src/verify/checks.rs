//! Invariants observed along a single run.

use serde::Serialize;

use crate::diagram::{Cycle, Diagram};
use crate::error::Result;
use crate::machine::{
    polarity, rewind_witness, Engine, Rules, Run, RunConfig, Scheduler, State, TokenLike,
    WellFormedCache, CYCLE_CAP,
};

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct InvariantStats {
    pub steps: usize,
    /// Result terms checked for well-formedness.
    pub terms_checked: usize,
    pub cycles: usize,
    pub revisits: usize,
    pub violations: Vec<String>,
}

impl InvariantStats {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.revisits == 0
    }
}

/// Runs `seed` to normal form while checking, after every step, that each
/// term the step produced is well-formed and has the same polarity as the
/// rewritten term on every enumerated cycle. Generator visits are tracked
/// per term.
pub fn check_run<R: Rules>(
    engine: &Engine<'_, R>,
    seed: &State<R::Token>,
    scheduler: &mut Scheduler,
) -> Result<(Run<R::Token>, InvariantStats)> {
    let d = engine.diagram;
    let cycles: Vec<Cycle> = d.enumerate_cycles(CYCLE_CAP)?;
    let mut cache = WellFormedCache::new();
    let mut stats = InvariantStats {
        cycles: cycles.len(),
        ..InvariantStats::default()
    };
    for k in seed.keys() {
        if let Some(w) = cache.check(d, k) {
            stats
                .violations
                .push(format!("seed term has polarity {} on a path", w.polarity));
        }
    }
    let cfg = RunConfig {
        record: true,
        track_visits: true,
        ..RunConfig::default()
    };
    let mut violations = Vec::new();
    let mut checked = 0;
    let run = engine.normalize_with(seed, scheduler, &cfg, &mut |rec, _| {
        for (k, _) in &rec.results {
            checked += 1;
            if let Some(w) = cache.check(d, k) {
                violations.push(format!(
                    "step {}: polarity {} on a path",
                    rec.step, w.polarity
                ));
            }
            for c in &cycles {
                let (before, after) = (polarity(&c.hops, &rec.term), polarity(&c.hops, k));
                if before != after {
                    violations.push(format!(
                        "step {}: cycle polarity {before} -> {after}",
                        rec.step
                    ));
                }
            }
        }
    })?;
    stats.steps = run.steps;
    stats.terms_checked = checked;
    stats.revisits = run.revisits;
    stats.violations.extend(violations);
    Ok((run, stats))
}

/// For a single-term seed, recovers a polarity-1 path to every token of
/// every final term. Returns the number of witnesses found.
pub fn check_rewinds<T: TokenLike>(d: &Diagram, seed: &[T], run: &Run<T>) -> Result<usize> {
    let mut found = 0;
    for k in run.state.keys() {
        for t in k {
            let p = rewind_witness(d, seed, &run.trace, t)?;
            debug_assert_eq!(polarity(&p.hops, seed), 1);
            found += 1;
        }
    }
    Ok(found)
}
