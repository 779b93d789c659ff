//! Running the pure machine on boundary seeds and reading matrices back.

use num_complex::Complex64;

use super::engine::{Engine, Run, RunConfig};
use super::rules::PureRules;
use super::scheduler::Scheduler;
use super::state::{State, TokenState};
use super::token::{Token, TokenLike};
use crate::diagram::{Diagram, Dir, EdgeId};
use crate::error::{Error, Result};
use crate::interp::{interp, Ket, Matrix, MAX_WIDTH};

/// Pure normalization with the given scheduler and configuration.
pub fn normalize(
    d: &Diagram,
    seed: &TokenState,
    scheduler: &mut Scheduler,
    cfg: &RunConfig,
) -> Result<Run<Token>> {
    Engine::new(d, PureRules).normalize(seed, scheduler, cfg)
}

pub(crate) fn require_connected(d: &Diagram) -> Result<()> {
    let n = d.connected_components().len();
    if n > 1 {
        return Err(Error::NotConnected { components: n });
    }
    Ok(())
}

fn require_pure(d: &Diagram) -> Result<()> {
    if d.has_ground() {
        return Err(Error::GroundPresent);
    }
    Ok(())
}

/// Normal form of `(a_k↓x)`.
pub fn run_single_token(d: &Diagram, k: usize, x: u8) -> Result<TokenState> {
    require_pure(d)?;
    require_connected(d)?;
    let a = *d.inputs().get(k).ok_or(Error::SlotOutOfRange {
        index: k,
        len: d.num_inputs(),
    })?;
    let seed = State::token(Token::down(a, x & 1));
    Ok(normalize(
        d,
        &seed,
        &mut Scheduler::Lexicographic,
        &RunConfig::default(),
    )?
    .state)
}

/// Normal form of `Σ λ_q ∏(a_i↓x_i,q)` for the amplitudes of `input`.
pub fn run_multi_token(d: &Diagram, input: &Ket) -> Result<TokenState> {
    require_pure(d)?;
    require_connected(d)?;
    let n = d.num_inputs();
    if n == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    if input.len() != 1 << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            got: input.len(),
        });
    }
    let mut seed = State::zero();
    for (idx, amp) in input.0.iter().enumerate() {
        let toks = (0..n)
            .map(|i| Token::down(d.inputs()[i], ((idx >> (n - 1 - i)) & 1) as u8))
            .collect();
        seed.add_term(toks, *amp);
    }
    Ok(normalize(
        d,
        &seed,
        &mut Scheduler::Lexicographic,
        &RunConfig::default(),
    )?
    .state)
}

/// Output vector of a normal form whose terms are `∏(b_i↓y_i)`.
pub fn output_ket(d: &Diagram, s: &TokenState) -> Result<Ket> {
    let m = d.num_outputs();
    if m > MAX_WIDTH {
        return Err(Error::TooWide { wires: m });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << m];
    for (k, c) in s.iter() {
        let row = read_slots(d, k, d.outputs(), Dir::Down)?;
        if k.len() != m {
            return Err(Error::UnexpectedState(
                "normal form still carries input tokens".into(),
            ));
        }
        amps[row] += c;
    }
    Ket::from_vec(amps)
}

fn read_slots<T: TokenLike>(d: &Diagram, term: &[T], slots: &[EdgeId], dir: Dir) -> Result<usize> {
    let mut idx = 0usize;
    for &e in slots {
        let mut hit = term.iter().filter(|t| t.edge() == e && t.dir() == dir);
        let t = hit.next().ok_or_else(|| {
            Error::UnexpectedState(format!(
                "no {} token on boundary edge {}",
                dir.arrow(),
                d.name(e)
            ))
        })?;
        if hit.next().is_some() {
            return Err(Error::UnexpectedState(format!(
                "two tokens on {}",
                d.name(e)
            )));
        }
        for b in t.bits() {
            idx = (idx << 1) | b as usize;
        }
    }
    Ok(idx)
}

/// Bits read from a term: row bits from down tokens on outputs, column bits
/// from up tokens on inputs, each in slot order.
pub(crate) fn read_term<T: TokenLike>(d: &Diagram, term: &[T]) -> Result<(usize, usize)> {
    let row = read_slots(d, term, d.outputs(), Dir::Down)?;
    let col = read_slots(d, term, d.inputs(), Dir::Up)?;
    let expected = d.num_outputs() + d.num_inputs();
    if term.len() != expected {
        return Err(Error::UnexpectedState(format!(
            "term has {} tokens, expected {expected}",
            term.len()
        )));
    }
    Ok((row, col))
}

pub(crate) fn read_matrix<T: TokenLike>(d: &Diagram, s: &State<T>, bits: usize) -> Result<Matrix> {
    let wires = bits * (d.num_inputs() + d.num_outputs());
    if wires > MAX_WIDTH {
        return Err(Error::TooWide { wires });
    }
    let mut m = Matrix::zeros(1 << (bits * d.num_outputs()), 1 << (bits * d.num_inputs()));
    for (k, c) in s.iter() {
        let (r, col) = read_term(d, k)?;
        m.set(r, col, m.get(r, col) + c);
    }
    Ok(m)
}

/// Reads `∏(b_i↓y)∏(a_i↑x)` terms as entries `(y, x)`.
pub fn state_to_matrix(d: &Diagram, s: &TokenState) -> Result<Matrix> {
    read_matrix(d, s, 1)
}

/// `t_0 + t_1`, the sum of the normal forms of `(e↓x)(e↑x)`.
pub fn extract_state(
    d: &Diagram,
    seed_edge: EdgeId,
    scheduler: &mut Scheduler,
    cfg: &RunConfig,
) -> Result<TokenState> {
    require_pure(d)?;
    require_connected(d)?;
    if d.edges().is_empty() {
        return Err(Error::NoEdges);
    }
    if seed_edge.0 >= d.edges().len() {
        return Err(Error::UnknownEdge(format!("#{}", seed_edge.0)));
    }
    let mut total = State::zero();
    for x in 0..2 {
        let seed = State::term(
            vec![Token::down(seed_edge, x), Token::up(seed_edge, x)],
            Complex64::new(1.0, 0.0),
        );
        let run = normalize(d, &seed, scheduler, cfg)?;
        total = &total + &run.state;
    }
    Ok(total)
}

/// The matrix of a connected diagram, computed by the token machine from a
/// seed on `seed_edge`.
pub fn extract_matrix(d: &Diagram, seed_edge: EdgeId) -> Result<Matrix> {
    let s = extract_state(
        d,
        seed_edge,
        &mut Scheduler::Lexicographic,
        &RunConfig::default(),
    )?;
    state_to_matrix(d, &s)
}

/// The matrix of any pure diagram: each component is extracted on its own
/// (edgeless ones are scalars and go through [`interp`]), then the pieces are
/// tensored and the wires put back in slot order.
pub fn extract_matrix_general(d: &Diagram) -> Result<Matrix> {
    require_pure(d)?;
    let mut m = Matrix::identity(0);
    let mut out_slots = Vec::new();
    let mut in_slots = Vec::new();
    for c in d.connected_components() {
        let part = if c.diagram.edges().is_empty() {
            interp(&c.diagram)?
        } else {
            extract_matrix(&c.diagram, EdgeId(0))?
        };
        m = m.kron(&part);
        out_slots.extend(c.output_slots);
        in_slots.extend(c.input_slots);
    }
    let inverse = |slots: &[usize]| {
        let mut perm = vec![0; slots.len()];
        for (q, &p) in slots.iter().enumerate() {
            perm[p] = q;
        }
        perm
    };
    Ok(m.permute_wires(&inverse(&out_slots), &inverse(&in_slots)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::Angle;
    use crate::fixtures;
    use crate::interp::{apply, TOLERANCE};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn single_token_h() {
        let d = Diagram::h();
        let s = run_single_token(&d, 0, 0).unwrap();
        let b = d.outputs()[0];
        let want = State::from_terms([
            (vec![Token::down(b, 0)], c(FRAC_1_SQRT_2)),
            (vec![Token::down(b, 1)], c(FRAC_1_SQRT_2)),
        ]);
        assert!(s.approx_eq(&want, 1e-12));
    }

    #[test]
    fn single_token_copy() {
        let d = Diagram::z(1, 2, Angle::ZERO);
        let s = run_single_token(&d, 0, 0).unwrap();
        let want = State::term(
            vec![
                Token::down(d.outputs()[0], 0),
                Token::down(d.outputs()[1], 0),
            ],
            c(1.0),
        );
        assert_eq!(s, want);
        assert!(run_single_token(&d, 1, 0).is_err());
    }

    #[test]
    fn cnot_multi_token() {
        let d = fixtures::cnot();
        let s = run_multi_token(&d, &Ket::basis(&[1, 0])).unwrap();
        let want = State::term(
            vec![
                Token::down(d.outputs()[0], 1),
                Token::down(d.outputs()[1], 1),
            ],
            c(FRAC_1_SQRT_2),
        );
        assert!(s.approx_eq(&want, 1e-12));
        let ket = output_ket(&d, &s).unwrap();
        let oracle = apply(&interp(&d).unwrap(), &Ket::basis(&[1, 0])).unwrap();
        assert!(ket.max_deviation(&oracle) < TOLERANCE);
    }

    #[test]
    fn identity_wire_extracts_identity() {
        let d = Diagram::identity_wire();
        let m = extract_matrix(&d, EdgeId(0)).unwrap();
        assert!(m.approx_eq(&Matrix::identity(1), 1e-12));
    }

    #[test]
    fn cnot_every_seed() {
        let d = fixtures::cnot();
        let oracle = interp(&d).unwrap();
        for e in d.edge_ids() {
            let s =
                extract_state(&d, e, &mut Scheduler::Lexicographic, &RunConfig::default()).unwrap();
            assert_eq!(s.len(), 4);
            assert!(s.iter().all(|(_, k)| (k - c(FRAC_1_SQRT_2)).norm() < 1e-12));
            assert!(state_to_matrix(&d, &s)
                .unwrap()
                .approx_eq(&oracle, TOLERANCE));
        }
    }

    #[test]
    fn general_extraction() {
        let hh = Diagram::h().tensor(&Diagram::h());
        assert!(extract_matrix_general(&hh)
            .unwrap()
            .approx_eq(&interp(&hh).unwrap(), TOLERANCE));
        let scalar = Diagram::z(0, 0, Angle::pi_ratio(1, 2)).tensor(&Diagram::h());
        let m = extract_matrix_general(&scalar).unwrap();
        assert!(m.approx_eq(&interp(&scalar).unwrap(), TOLERANCE));
        let e = extract_matrix_general(&Diagram::empty()).unwrap();
        assert_eq!((e.rows(), e.cols()), (1, 1));
        assert_eq!(e.get(0, 0), c(1.0));
        // crossed wires
        let sw = Diagram::swap_wires()
            .then(&Diagram::h().tensor(&Diagram::identity_wire()))
            .unwrap();
        assert!(extract_matrix_general(&sw)
            .unwrap()
            .approx_eq(&interp(&sw).unwrap(), TOLERANCE));
    }

    #[test]
    fn disconnected_rejected() {
        let hh = Diagram::h().tensor(&Diagram::h());
        assert_eq!(
            extract_matrix(&hh, EdgeId(0)),
            Err(Error::NotConnected { components: 2 })
        );
        assert_eq!(
            extract_matrix(&Diagram::z(0, 0, Angle::ZERO), EdgeId(0)),
            Err(Error::NoEdges)
        );
    }
}
