//! The ground machine, its image in the doubled pure diagram, and the
//! superoperator it computes.

use num_complex::Complex64;
use serde::Serialize;

use super::engine::{is_collision_free, Engine, Run, RunConfig, StepRecord};
use super::pure::{read_matrix, require_connected};
use super::rules::{GroundRules, PureRules, Rule};
use super::scheduler::{Scheduler, Site};
use super::state::{GroundTokenState, State, TokenState};
use super::token::{GroundToken, Token};
use crate::diagram::{bar_edge, cpm_construct, Diagram, EdgeId};
use crate::error::{Error, Result};
use crate::interp::{Matrix, TOLERANCE};

pub fn g_normalize(
    d: &Diagram,
    seed: &GroundTokenState,
    scheduler: &mut Scheduler,
    cfg: &RunConfig,
) -> Result<Run<GroundToken>> {
    Engine::new(d, GroundRules).normalize(seed, scheduler, cfg)
}

/// `(e,d,x,y) ↦ (e,d,x)(ē,d,y)`, extended to sums and products. The result
/// lives on `cpm_construct(d)`.
pub fn cpm_map(s: &GroundTokenState, d: &Diagram) -> TokenState {
    s.map_tokens(|t| {
        vec![
            Token::new(t.edge, t.dir, t.x),
            Token::new(bar_edge(d, t.edge), t.dir, t.y),
        ]
    })
}

/// How one ground step was matched in the doubled diagram.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimStep {
    pub step: usize,
    pub rule: Rule,
    /// Pure steps, each applied to every term carrying the token.
    pub lifted_steps: usize,
    /// Diffusions plus collisions, counted once per lifted step.
    pub primitive_rewrites: usize,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub steps: Vec<SimStep>,
    pub max_deviation: f64,
    pub passed: bool,
}

impl SimulationReport {
    fn from_steps(steps: Vec<SimStep>) -> Self {
        let max_deviation = steps.iter().map(|s| s.deviation).fold(0.0, f64::max);
        let passed = steps.iter().all(|s| {
            s.deviation <= TOLERANCE
                && (1..=2).contains(&s.lifted_steps)
                && (s.rule != Rule::TraceOut || s.primitive_rewrites == 2)
        });
        SimulationReport {
            steps,
            max_deviation,
            passed,
        }
    }

    /// Primitive rewrite counts of the Trace-Out steps.
    pub fn trace_out_rewrites(&self) -> Vec<usize> {
        self.steps
            .iter()
            .filter(|s| s.rule == Rule::TraceOut)
            .map(|s| s.primitive_rewrites)
            .collect()
    }
}

/// Rewrites `tok` in every term of `s` that carries it. Returns the new
/// state, whether any term carried it, and the collisions met on the way.
fn lifted_step(
    eng: &Engine<'_, PureRules>,
    s: &TokenState,
    tok: &Token,
) -> Result<(TokenState, bool, usize)> {
    let mut out = State::zero();
    let mut hit = false;
    let mut collisions = 0;
    for (k, c) in s.iter() {
        match k.iter().position(|t| t == tok) {
            Some(i) => {
                hit = true;
                let single = State::term(k.clone(), *c);
                let (next, rec) = eng.step_at(&single, Site { term: 0, token: i })?;
                collisions = collisions.max(rec.collisions);
                out = &out + &next;
            }
            None => out.add_term(k.clone(), *c),
        }
    }
    Ok((out, hit, collisions))
}

fn simulate_step(
    d: &Diagram,
    eng: &Engine<'_, PureRules>,
    r: &StepRecord<GroundToken>,
) -> Result<SimStep> {
    let before = cpm_map(&GroundTokenState::term(r.term.clone(), r.coeff), d);
    let g = r.consumed;
    let first = Token::new(g.edge, g.dir, g.x);
    let second = Token::new(bar_edge(d, g.edge), g.dir, g.y);
    let (mut s, _, c1) = lifted_step(eng, &before, &first)?;
    let mut lifted = 1;
    let mut primitive = 1 + c1;
    if r.rule != Rule::TraceOut {
        let (s2, hit, c2) = lifted_step(eng, &s, &second)?;
        if hit {
            lifted += 1;
            primitive += 1 + c2;
        }
        s = s2;
    }
    let after = cpm_map(&GroundTokenState::from_terms(r.results.iter().cloned()), d);
    Ok(SimStep {
        step: r.step,
        rule: r.rule,
        lifted_steps: lifted,
        primitive_rewrites: primitive,
        deviation: s.max_deviation(&after),
    })
}

/// Checks every step of a recorded ground run against the pure machine on
/// `cpm_construct(d)`: `CPM(t₁)` must rewrite to `CPM(t₂)` in one or two
/// lifted pure steps, and Trace-Out in one cup diffusion plus one collision.
pub fn check_simulation_run(d: &Diagram, run: &Run<GroundToken>) -> Result<SimulationReport> {
    let doubled = cpm_construct(d)?;
    let eng = Engine::new(&doubled, PureRules);
    let steps = run
        .trace
        .steps
        .iter()
        .map(|r| simulate_step(d, &eng, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimulationReport::from_steps(steps))
}

/// Normalizes `s` on the ground machine, recording, and checks the run. The
/// seed must be collision-free: the pure machine collides a mirrored pair as
/// soon as either copy moves, the ground machine only when the pair is hit.
pub fn check_simulation(d: &Diagram, s: &GroundTokenState) -> Result<SimulationReport> {
    if !is_collision_free(s) {
        return Err(Error::UnexpectedState("seed carries a head-on pair".into()));
    }
    let run = g_normalize(d, s, &mut Scheduler::Lexicographic, &RunConfig::recording())?;
    check_simulation_run(d, &run)
}

/// The doubled-space matrix of a connected diagram computed by the ground
/// machine from `Σ_{x,y} (e↓x,y)(e↑x,y)`. Wires are interleaved as in
/// [`cpm_construct`].
pub fn g_extract_superoperator(d: &Diagram, seed_edge: EdgeId) -> Result<Matrix> {
    require_connected(d)?;
    if d.edges().is_empty() {
        return Err(Error::NoEdges);
    }
    if seed_edge.0 >= d.edges().len() {
        return Err(Error::UnknownEdge(format!("#{}", seed_edge.0)));
    }
    let mut total = GroundTokenState::zero();
    for x in 0..2 {
        for y in 0..2 {
            let seed = State::term(
                vec![
                    GroundToken::new(seed_edge, crate::diagram::Dir::Down, x, y),
                    GroundToken::new(seed_edge, crate::diagram::Dir::Up, x, y),
                ],
                Complex64::new(1.0, 0.0),
            );
            let run = g_normalize(
                d,
                &seed,
                &mut Scheduler::Lexicographic,
                &RunConfig::default(),
            )?;
            total = &total + &run.state;
        }
    }
    read_matrix(d, &total, 2)
}
