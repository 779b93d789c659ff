//! The property suites. Every trial is rebuilt from `(config, index)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::checks::{check_rewinds, check_run};
use super::gen::{random_diagram, random_diagram_with, GenConfig};
use super::report::{Outcome, Suite, SuiteReport, TrialReport};
use super::seeds::{random_ground_seed, random_seed, unbalanced_seed};
use crate::diagram::{Diagram, EdgeId};
use crate::error::{Error, Result};
use crate::interp::{interp, interp_cpm, TOLERANCE};
use crate::machine::{
    check_simulation_run, extract_matrix, extract_matrix_general, g_extract_superoperator,
    g_normalize, is_collision_free, normalize, Engine, PureRules, RunConfig, Scheduler,
};

/// Step limit for forced runs in the termination suite.
pub const FORCED_FUSE: usize = 2_000;
/// Term limit for forced runs in the termination suite.
pub const FORCED_MAX_TERMS: usize = 1 << 10;

/// A second generator per trial, for choices made after the diagram.
pub fn aux_rng(cfg: &GenConfig, trial: u64, salt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(trial);
    rng
}

fn from_error(trial: u64, e: Error) -> TrialReport {
    match e {
        Error::FuseTripped { steps } => TrialReport {
            trial,
            outcome: Outcome::FuseTripped { steps },
            deviation: 0.0,
            steps,
            generators: 0,
        },
        other => TrialReport::fail(trial, other.to_string()),
    }
}

fn settle(trial: u64, d: &Diagram, r: Result<TrialReport>) -> TrialReport {
    let mut t = r.unwrap_or_else(|e| from_error(trial, e));
    t.generators = d.generators().len();
    t
}

/// Runs `f` on every trial index, on `jobs` threads (all cores if `None`),
/// and returns the reports in index order.
pub fn run_trials(
    trials: u64,
    jobs: Option<usize>,
    f: impl Fn(u64) -> TrialReport + Sync + Send,
) -> Vec<TrialReport> {
    let work = || (0..trials).into_par_iter().map(&f).collect();
    match jobs {
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(work),
            Err(_) => (0..trials).map(&f).collect(),
        },
        None => work(),
    }
}

fn deviation_report(trial: u64, deviation: f64, what: &str) -> TrialReport {
    if deviation <= TOLERANCE {
        TrialReport::pass(trial, deviation, 0, 0)
    } else {
        let mut t = TrialReport::fail(trial, format!("{what} deviates by {deviation:.3e}"));
        t.deviation = deviation;
        t
    }
}

/// Where a suite gets its diagrams: freshly generated per trial, or one
/// fixed diagram with per-trial seeds and schedulers.
#[derive(Debug, Clone)]
pub enum Source {
    Random(GenConfig),
    Fixed(GenConfig, Diagram),
}

impl Source {
    pub fn config(&self) -> &GenConfig {
        match self {
            Source::Random(c) | Source::Fixed(c, _) => c,
        }
    }

    pub fn diagram(&self, trial: u64) -> Diagram {
        match self {
            Source::Random(c) => random_diagram(c, trial),
            Source::Fixed(_, d) => d.clone(),
        }
    }
}

/// One oracle trial: token extraction from a random edge against the dense
/// interpretation (the doubled one for ground diagrams). Disconnected fixed
/// diagrams go through per-component extraction.
pub fn oracle_trial(src: &Source, trial: u64) -> TrialReport {
    let cfg = src.config();
    let d = src.diagram(trial);
    let mut rng = aux_rng(cfg, trial, 1);
    let e = EdgeId(rng.gen_range(0..d.edges().len().max(1)));
    let r = (|| {
        let dev = if !d.is_connected() && !d.has_ground() {
            extract_matrix_general(&d)?.max_deviation(&interp(&d)?)
        } else if d.has_ground() {
            g_extract_superoperator(&d, e)?.max_deviation(&interp_cpm(&d)?)
        } else {
            extract_matrix(&d, e)?.max_deviation(&interp(&d)?)
        };
        Ok(deviation_report(trial, dev, "extracted matrix"))
    })();
    settle(trial, &d, r)
}

pub fn suite_oracle(src: &Source, trials: u64, jobs: Option<usize>) -> SuiteReport {
    let t = run_trials(trials, jobs, |i| oracle_trial(src, i));
    SuiteReport::new(Suite::Oracle, src.config().clone(), t)
}

/// One confluence trial: the lexicographic normal form against
/// `schedulers` random orders.
pub fn confluence_trial(src: &Source, trial: u64, schedulers: usize) -> TrialReport {
    let cfg = src.config();
    let d = src.diagram(trial);
    let mut rng = aux_rng(cfg, trial, 2);
    let seed = random_seed(&d, &mut rng);
    let r = (|| {
        let reference = normalize(
            &d,
            &seed,
            &mut Scheduler::Lexicographic,
            &RunConfig::default(),
        )?;
        let mut worst: f64 = 0.0;
        for _ in 0..schedulers {
            let mut s = Scheduler::random(rng.gen());
            let other = normalize(&d, &seed, &mut s, &RunConfig::default())?;
            worst = worst.max(reference.state.max_deviation(&other.state));
        }
        let mut t = deviation_report(trial, worst, "normal form");
        t.steps = reference.steps;
        Ok(t)
    })();
    settle(trial, &d, r)
}

pub fn suite_confluence(
    src: &Source,
    trials: u64,
    schedulers: usize,
    jobs: Option<usize>,
) -> SuiteReport {
    let t = run_trials(trials, jobs, |i| confluence_trial(src, i, schedulers));
    SuiteReport::new(Suite::Confluence, src.config().clone(), t)
}

/// One invariants trial: well-formedness and cycle polarity after every
/// step, no generator visited twice by a term, and rewinding witnesses for
/// single-term seeds.
pub fn invariants_trial(src: &Source, trial: u64) -> TrialReport {
    let cfg = src.config();
    let d = src.diagram(trial);
    let mut rng = aux_rng(cfg, trial, 3);
    let seed = random_seed(&d, &mut rng);
    let r = (|| {
        let eng = Engine::new(&d, PureRules);
        let mut sched = Scheduler::random(rng.gen());
        let (run, stats) = check_run(&eng, &seed, &mut sched)?;
        if !stats.ok() {
            let why = stats
                .violations
                .first()
                .cloned()
                .unwrap_or_else(|| format!("{} generator revisits", stats.revisits));
            return Ok(TrialReport::fail(trial, why));
        }
        if seed.len() == 1 && is_collision_free(&seed) {
            let (k, _) = seed.nth(0).expect("one term");
            check_rewinds(&d, k, &run)?;
        }
        Ok(TrialReport::pass(trial, 0.0, run.steps, 0))
    })();
    settle(trial, &d, r)
}

pub fn suite_invariants(src: &Source, trials: u64, jobs: Option<usize>) -> SuiteReport {
    let t = run_trials(trials, jobs, |i| invariants_trial(src, i));
    SuiteReport::new(Suite::Invariants, src.config().clone(), t)
}

/// One simulation trial on a ground diagram: every ground step is matched
/// on the doubled diagram, and the ground superoperator equals the doubled
/// interpretation.
pub fn simulation_trial(src: &Source, trial: u64) -> TrialReport {
    let cfg = src.config();
    let d = src.diagram(trial);
    let mut rng = aux_rng(cfg, trial, 4);
    let seed = random_ground_seed(&d, &mut rng);
    let e = EdgeId(rng.gen_range(0..d.edges().len()));
    let r = (|| {
        let run = g_normalize(
            &d,
            &seed,
            &mut Scheduler::random(rng.gen()),
            &RunConfig::recording(),
        )?;
        let report = check_simulation_run(&d, &run)?;
        if !report.passed {
            let bad = report.steps.iter().find(|s| {
                s.deviation > TOLERANCE
                    || s.lifted_steps > 2
                    || (s.rule == crate::machine::Rule::TraceOut && s.primitive_rewrites != 2)
            });
            return Ok(TrialReport::fail(
                trial,
                format!("simulation broke at {bad:?}"),
            ));
        }
        let dev = g_extract_superoperator(&d, e)?.max_deviation(&interp_cpm(&d)?);
        let dev = dev.max(report.max_deviation);
        let mut t = deviation_report(trial, dev, "superoperator");
        t.steps = run.steps;
        Ok(t)
    })();
    settle(trial, &d, r)
}

pub fn suite_simulation(src: &Source, trials: u64, jobs: Option<usize>) -> SuiteReport {
    let t = run_trials(trials, jobs, |i| simulation_trial(src, i));
    SuiteReport::new(Suite::Simulation, src.config().clone(), t)
}

/// A cyclic diagram and a token that unbalances one of its cycles.
///
/// Random diagrams here have no Hadamards. Then every token carries the
/// seed's bit, no term ever vanishes, and since polarity on the cycle stays
/// at ±1 while a normal form would have it at 0, every run diverges. With
/// Hadamards on the cycle, branches can cancel and a forced run may end in
/// the zero state. `None` for an acyclic fixed diagram.
pub fn unbalanced_case(src: &Source, trial: u64) -> Option<(Diagram, crate::machine::TokenState)> {
    match src {
        Source::Fixed(cfg, d) => {
            let mut rng = aux_rng(cfg, trial, 5);
            unbalanced_seed(d, &mut rng).map(|s| (d.clone(), s))
        }
        Source::Random(cfg) => {
            let cfg = GenConfig {
                allow_hadamard: false,
                allow_ground: false,
                require_connected: true,
                require_acyclic: false,
                ..cfg.clone()
            };
            let mut rng = aux_rng(&cfg, trial, 5);
            loop {
                let d = random_diagram_with(&cfg, &mut rng);
                if let Some(seed) = unbalanced_seed(&d, &mut rng) {
                    return Some((d, seed));
                }
            }
        }
    }
}

/// One termination trial: the checked run must refuse the seed, and the
/// forced run must not reach a normal form before the fuse.
pub fn termination_trial(src: &Source, trial: u64) -> TrialReport {
    let Some((d, seed)) = unbalanced_case(src, trial) else {
        return TrialReport::fail(trial, "diagram has no cycles");
    };
    let r = (|| {
        match normalize(
            &d,
            &seed,
            &mut Scheduler::Lexicographic,
            &RunConfig::default(),
        ) {
            Err(Error::NotCycleBalanced) => {}
            Err(e) => return Ok(TrialReport::fail(trial, format!("checked run: {e}"))),
            Ok(_) => return Ok(TrialReport::fail(trial, "checked run accepted the seed")),
        }
        let forced = RunConfig {
            max_terms: FORCED_MAX_TERMS,
            ..RunConfig::forced(Some(FORCED_FUSE))
        };
        match normalize(&d, &seed, &mut Scheduler::Lexicographic, &forced) {
            Err(Error::FuseTripped { steps }) => Ok(TrialReport::pass(trial, 0.0, steps, 0)),
            Err(e) => Ok(TrialReport::fail(trial, format!("forced run: {e}"))),
            Ok(run) => Ok(TrialReport::fail(
                trial,
                format!("forced run reached a normal form after {} steps", run.steps),
            )),
        }
    })();
    settle(trial, &d, r)
}

pub fn suite_termination(src: &Source, trials: u64, jobs: Option<usize>) -> SuiteReport {
    let t = run_trials(trials, jobs, |i| termination_trial(src, i));
    SuiteReport::new(Suite::Termination, src.config().clone(), t)
}

/// Dispatches by name; `schedulers` only matters for confluence.
pub fn run_suite(
    suite: Suite,
    src: &Source,
    trials: u64,
    schedulers: usize,
    jobs: Option<usize>,
) -> SuiteReport {
    match suite {
        Suite::Oracle => suite_oracle(src, trials, jobs),
        Suite::Confluence => suite_confluence(src, trials, schedulers, jobs),
        Suite::Invariants => suite_invariants(src, trials, jobs),
        Suite::Simulation => suite_simulation(src, trials, jobs),
        Suite::Termination => suite_termination(src, trials, jobs),
    }
}
