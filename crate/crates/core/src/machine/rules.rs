//! Rule tables of the two machines.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::token::{GroundToken, Token, TokenLike};
use crate::diagram::{Diagram, Dir, EdgeId, GenId, GeneratorKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Cup,
    Cap,
    Green,
    Hadamard,
    TraceOut,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Cup => "cup",
            Rule::Cap => "cap",
            Rule::Green => "green",
            Rule::Hadamard => "hadamard",
            Rule::TraceOut => "trace-out",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rule> {
        Ok(match s {
            "cup" => Rule::Cup,
            "cap" => Rule::Cap,
            "green" => Rule::Green,
            "hadamard" => Rule::Hadamard,
            "trace-out" => Rule::TraceOut,
            other => return Err(Error::Json(format!("unknown rule {other:?}"))),
        })
    }
}

/// Right-hand side of one diffusion: a sum of token products. No branches at
/// all means the term vanishes; a branch with no tokens is a scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct Diffusion<T> {
    pub rule: Rule,
    pub gen: GenId,
    pub branches: Vec<(Complex64, Vec<T>)>,
}

/// A rule table. The engine is generic over it.
pub trait Rules: Send + Sync {
    type Token: TokenLike;

    /// Rewrites one token that points into a generator.
    fn diffuse(&self, d: &Diagram, token: &Self::Token) -> Result<Diffusion<Self::Token>>;

    /// Short machine name for reports.
    fn name(&self) -> &'static str;
}

/// Which port of which generator a token is about to enter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub gen: GenId,
    pub port: usize,
    /// Entering through an input port (travelling down) or an output port.
    pub via_input: bool,
}

pub fn entry(d: &Diagram, edge: EdgeId, dir: Dir) -> Result<Entry> {
    match d.target(edge, dir) {
        Some((gen, port)) => Ok(Entry {
            gen,
            port,
            via_input: dir == Dir::Down,
        }),
        None => Err(Error::Frozen { edge }),
    }
}

/// Places a green spider sends copies to: every input except the entry port
/// (travelling up) and every output except the entry port (travelling down).
pub fn broadcast(d: &Diagram, at: Entry) -> Vec<(EdgeId, Dir)> {
    let g = d.generator(at.gen);
    let mut out = Vec::with_capacity(g.inputs.len() + g.outputs.len());
    for (i, &e) in g.inputs.iter().enumerate() {
        if !(at.via_input && i == at.port) {
            out.push((e, Dir::Up));
        }
    }
    for (j, &e) in g.outputs.iter().enumerate() {
        if !(!at.via_input && j == at.port) {
            out.push((e, Dir::Down));
        }
    }
    out
}

/// Where a token leaves a two-port generator (H, cup, cap).
fn pass_through(d: &Diagram, at: Entry) -> (EdgeId, Dir) {
    let g = d.generator(at.gen);
    match d.generator(at.gen).kind {
        GeneratorKind::H => {
            if at.via_input {
                (g.outputs[0], Dir::Down)
            } else {
                (g.inputs[0], Dir::Up)
            }
        }
        GeneratorKind::Cup => (g.inputs[1 - at.port], Dir::Up),
        GeneratorKind::Cap => (g.outputs[1 - at.port], Dir::Down),
        _ => unreachable!("not a two-port generator"),
    }
}

fn phase(angle: f64, k: i32) -> Complex64 {
    if k == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, angle * k as f64)
    }
}

/// The single-bit machine.
#[derive(Debug, Clone, Copy, Default)]
pub struct PureRules;

impl Rules for PureRules {
    type Token = Token;

    fn diffuse(&self, d: &Diagram, t: &Token) -> Result<Diffusion<Token>> {
        let at = entry(d, t.edge, t.dir)?;
        let kind = d.generator(at.gen).kind;
        let x = t.bit;
        let (rule, branches) = match kind {
            GeneratorKind::Z(a) => {
                let tokens = broadcast(d, at)
                    .into_iter()
                    .map(|(e, dir)| Token::new(e, dir, x))
                    .collect();
                (Rule::Green, vec![(phase(a.to_radians(), x as i32), tokens)])
            }
            GeneratorKind::H => {
                let (e, dir) = pass_through(d, at);
                let sign = if x == 1 { -1.0 } else { 1.0 };
                (
                    Rule::Hadamard,
                    vec![
                        (
                            Complex64::new(sign * FRAC_1_SQRT_2, 0.0),
                            vec![Token::new(e, dir, x)],
                        ),
                        (
                            Complex64::new(FRAC_1_SQRT_2, 0.0),
                            vec![Token::new(e, dir, 1 - x)],
                        ),
                    ],
                )
            }
            GeneratorKind::Cup | GeneratorKind::Cap => {
                let (e, dir) = pass_through(d, at);
                let rule = if kind == GeneratorKind::Cup {
                    Rule::Cup
                } else {
                    Rule::Cap
                };
                (
                    rule,
                    vec![(Complex64::new(1.0, 0.0), vec![Token::new(e, dir, x)])],
                )
            }
            GeneratorKind::Ground => return Err(Error::GroundPresent),
        };
        Ok(Diffusion {
            rule,
            gen: at.gen,
            branches,
        })
    }

    fn name(&self) -> &'static str {
        "pure"
    }
}

/// The two-bit machine for diagrams with grounds.
#[derive(Debug, Clone, Copy, Default)]
pub struct GroundRules;

impl Rules for GroundRules {
    type Token = GroundToken;

    fn diffuse(&self, d: &Diagram, t: &GroundToken) -> Result<Diffusion<GroundToken>> {
        let at = entry(d, t.edge, t.dir)?;
        let kind = d.generator(at.gen).kind;
        let (x, y) = (t.x, t.y);
        let one = Complex64::new(1.0, 0.0);
        let (rule, branches) = match kind {
            GeneratorKind::Z(a) => {
                let tokens = broadcast(d, at)
                    .into_iter()
                    .map(|(e, dir)| GroundToken::new(e, dir, x, y))
                    .collect();
                (
                    Rule::Green,
                    vec![(phase(a.to_radians(), x as i32 - y as i32), tokens)],
                )
            }
            GeneratorKind::H => {
                let (e, dir) = pass_through(d, at);
                let mut branches = Vec::with_capacity(4);
                for z in 0..2u8 {
                    for z2 in 0..2u8 {
                        let sign = if (x * z + y * z2) % 2 == 1 { -0.5 } else { 0.5 };
                        branches.push((
                            Complex64::new(sign, 0.0),
                            vec![GroundToken::new(e, dir, z, z2)],
                        ));
                    }
                }
                (Rule::Hadamard, branches)
            }
            GeneratorKind::Cup | GeneratorKind::Cap => {
                let (e, dir) = pass_through(d, at);
                let rule = if kind == GeneratorKind::Cup {
                    Rule::Cup
                } else {
                    Rule::Cap
                };
                (rule, vec![(one, vec![GroundToken::new(e, dir, x, y)])])
            }
            GeneratorKind::Ground => {
                let branches = if x == y { vec![(one, vec![])] } else { vec![] };
                (Rule::TraceOut, branches)
            }
        };
        Ok(Diffusion {
            rule,
            gen: at.gen,
            branches,
        })
    }

    fn name(&self) -> &'static str {
        "ground"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::Angle;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hadamard_on_zero() {
        let d = Diagram::h();
        let r = PureRules.diffuse(&d, &Token::down(EdgeId(0), 0)).unwrap();
        assert_eq!(r.rule, Rule::Hadamard);
        let s = FRAC_1_SQRT_2;
        assert_eq!(r.branches[0], (c(s, 0.0), vec![Token::down(EdgeId(1), 0)]));
        assert_eq!(r.branches[1], (c(s, 0.0), vec![Token::down(EdgeId(1), 1)]));
        let r = PureRules.diffuse(&d, &Token::up(EdgeId(1), 1)).unwrap();
        assert_eq!(r.branches[0], (c(-s, 0.0), vec![Token::up(EdgeId(0), 1)]));
    }

    #[test]
    fn green_broadcast() {
        let a = Angle::pi_ratio(1, 3);
        let d = Diagram::z(1, 2, a);
        let r = PureRules.diffuse(&d, &Token::down(EdgeId(0), 1)).unwrap();
        assert_eq!(r.branches.len(), 1);
        let (k, toks) = &r.branches[0];
        assert!((k - Complex64::from_polar(1.0, a.to_radians())).norm() < 1e-15);
        assert_eq!(
            toks,
            &vec![Token::down(EdgeId(1), 1), Token::down(EdgeId(2), 1)]
        );
        // entering from below
        let r = PureRules.diffuse(&d, &Token::up(EdgeId(2), 0)).unwrap();
        assert_eq!(
            r.branches[0].1,
            vec![Token::up(EdgeId(0), 0), Token::down(EdgeId(1), 0)]
        );
    }

    #[test]
    fn cup_and_cap_turn_around() {
        let cup = Diagram::cup();
        let r = PureRules.diffuse(&cup, &Token::down(EdgeId(0), 1)).unwrap();
        assert_eq!(r.branches[0].1, vec![Token::up(EdgeId(1), 1)]);
        let cap = Diagram::cap();
        let r = PureRules.diffuse(&cap, &Token::up(EdgeId(1), 0)).unwrap();
        assert_eq!(r.branches[0].1, vec![Token::down(EdgeId(0), 0)]);
        assert_eq!(
            PureRules.diffuse(&cap, &Token::down(EdgeId(1), 0)),
            Err(Error::Frozen { edge: EdgeId(1) })
        );
    }

    #[test]
    fn ground_rules() {
        let g = Diagram::ground();
        let keep = GroundRules
            .diffuse(&g, &GroundToken::new(EdgeId(0), Dir::Down, 1, 1))
            .unwrap();
        assert_eq!(keep.rule, Rule::TraceOut);
        assert_eq!(keep.branches, vec![(c(1.0, 0.0), vec![])]);
        let kill = GroundRules
            .diffuse(&g, &GroundToken::new(EdgeId(0), Dir::Down, 1, 0))
            .unwrap();
        assert!(kill.branches.is_empty());

        let a = Angle::pi_ratio(1, 2);
        let z = Diagram::z(1, 1, a);
        let r = GroundRules
            .diffuse(&z, &GroundToken::new(EdgeId(0), Dir::Down, 1, 0))
            .unwrap();
        assert!((r.branches[0].0 - c(0.0, 1.0)).norm() < 1e-15);
        let r = GroundRules
            .diffuse(&z, &GroundToken::new(EdgeId(0), Dir::Down, 0, 1))
            .unwrap();
        assert!((r.branches[0].0 - c(0.0, -1.0)).norm() < 1e-15);

        let h = Diagram::h();
        let r = GroundRules
            .diffuse(&h, &GroundToken::new(EdgeId(0), Dir::Down, 0, 0))
            .unwrap();
        assert_eq!(r.branches.len(), 4);
        assert!(r.branches.iter().all(|(k, _)| *k == c(0.5, 0.0)));
    }
}
