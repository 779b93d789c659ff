//! Random token states to start runs from.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::diagram::{Diagram, Dir, EdgeId};
use crate::machine::{
    is_cycle_balanced, is_well_formed, Engine, GroundRules, GroundToken, GroundTokenState,
    Scheduler, State, Token, TokenState,
};

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn random_coeff(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// `(e↓x)(e↑x)` on a random edge.
pub fn wire_pair(d: &Diagram, rng: &mut ChaCha8Rng) -> (EdgeId, TokenState) {
    let e = EdgeId(rng.gen_range(0..d.edges().len()));
    let x = rng.gen_range(0..2);
    (
        e,
        State::term(vec![Token::down(e, x), Token::up(e, x)], one()),
    )
}

/// A random well-formed, cycle-balanced seed: a wire pair, a single input
/// token, a superposition over all inputs, or a sum of wire pairs.
pub fn random_seed(d: &Diagram, rng: &mut ChaCha8Rng) -> TokenState {
    let n = d.num_inputs();
    let s = match rng.gen_range(0..4) {
        1 if n > 0 => {
            let k = rng.gen_range(0..n);
            State::token(Token::down(d.inputs()[k], rng.gen_range(0..2)))
        }
        2 if n > 0 => {
            let mut s = State::zero();
            let picks = rng.gen_range(1..=(1usize << n).min(4));
            for _ in 0..picks {
                let toks = d
                    .inputs()
                    .iter()
                    .map(|&a| Token::down(a, rng.gen_range(0..2)))
                    .collect();
                s.add_term(toks, random_coeff(rng));
            }
            s
        }
        3 => {
            let mut s = State::zero();
            for _ in 0..rng.gen_range(1..=3) {
                let (_, t) = wire_pair(d, rng);
                s = &s + &t.scale(random_coeff(rng));
            }
            s
        }
        _ => wire_pair(d, rng).1,
    };
    if !s.is_empty() && is_well_formed(d, &s) && is_cycle_balanced(d, &s).unwrap_or(false) {
        s
    } else {
        wire_pair(d, rng).1
    }
}

/// A collision-free ground seed: one token on every input, or a wire pair
/// `(e↓x,y)(e↑x,y)` advanced by one step so that the pair no longer faces
/// itself.
pub fn random_ground_seed(d: &Diagram, rng: &mut ChaCha8Rng) -> GroundTokenState {
    let bits = |rng: &mut ChaCha8Rng| (rng.gen_range(0..2), rng.gen_range(0..2));
    if d.num_inputs() > 0 && rng.gen_bool(0.5) {
        let toks = d
            .inputs()
            .iter()
            .map(|&a| {
                let (x, y) = bits(rng);
                GroundToken::new(a, Dir::Down, x, y)
            })
            .collect();
        return State::term(toks, one());
    }
    let (x, y) = bits(rng);
    let e = EdgeId(rng.gen_range(0..d.edges().len()));
    let pair = State::term(
        vec![
            GroundToken::new(e, Dir::Down, x, y),
            GroundToken::new(e, Dir::Up, x, y),
        ],
        one(),
    );
    let eng = Engine::new(d, GroundRules);
    match eng.step(&pair, &mut Scheduler::Lexicographic) {
        Ok((next, _)) => next,
        Err(_) => pair,
    }
}

/// A single token placed on a cycle, which gives that cycle polarity ±1.
/// `None` when the diagram is acyclic.
pub fn unbalanced_seed(d: &Diagram, rng: &mut ChaCha8Rng) -> Option<TokenState> {
    let basis = d.cycle_basis();
    let c = basis.choose(rng)?;
    let &(e, dir) = c.hops.choose(rng)?;
    Some(State::token(Token::new(e, dir, rng.gen_range(0..2))))
}
