//! A one-line language for building diagrams.
//!
//! ```text
//! expr   := tensor (';' tensor)*
//! tensor := atom ('*' atom)*
//! atom   := '(' expr ')' | Z(n,m[,angle]) | X(n,m[,angle]) | H | cup | cap
//!         | ground | id | swap
//! ```
//!
//! `;` stacks top to bottom, `*` places side by side and binds tighter.
//! `#` starts a comment running to the end of the line. After building, edges
//! are labelled `a1..` (inputs), `b1..` (outputs) and `e1..` (the rest).

use std::fmt;

use crate::angle::Angle;
use crate::diagram::Diagram;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Atom {
    Z {
        inputs: usize,
        outputs: usize,
        angle: Angle,
    },
    X {
        inputs: usize,
        outputs: usize,
        angle: Angle,
    },
    H,
    Cup,
    Cap,
    Ground,
    Id,
    Swap,
}

impl Atom {
    pub fn arity(&self) -> (usize, usize) {
        match *self {
            Atom::Z {
                inputs, outputs, ..
            }
            | Atom::X {
                inputs, outputs, ..
            } => (inputs, outputs),
            Atom::H | Atom::Id => (1, 1),
            Atom::Cup => (2, 0),
            Atom::Cap => (0, 2),
            Atom::Ground => (1, 0),
            Atom::Swap => (2, 2),
        }
    }

    fn diagram(&self) -> Diagram {
        match *self {
            Atom::Z {
                inputs,
                outputs,
                angle,
            } => Diagram::z(inputs, outputs, angle),
            Atom::X {
                inputs,
                outputs,
                angle,
            } => Diagram::red_spider(inputs, outputs, angle),
            Atom::H => Diagram::h(),
            Atom::Cup => Diagram::cup(),
            Atom::Cap => Diagram::cap(),
            Atom::Ground => Diagram::ground(),
            Atom::Id => Diagram::identity_wire(),
            Atom::Swap => Diagram::swap_wires(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Z {
                inputs,
                outputs,
                angle,
            } => write!(f, "Z({inputs},{outputs},{angle})"),
            Atom::X {
                inputs,
                outputs,
                angle,
            } => write!(f, "X({inputs},{outputs},{angle})"),
            Atom::H => f.write_str("H"),
            Atom::Cup => f.write_str("cup"),
            Atom::Cap => f.write_str("cap"),
            Atom::Ground => f.write_str("ground"),
            Atom::Id => f.write_str("id"),
            Atom::Swap => f.write_str("swap"),
        }
    }
}

/// A parsed expression. Printing gives the canonical text: single spaces
/// around operators and only the parentheses the grammar needs.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Atom(Atom),
    Seq(Box<Expr>, Box<Expr>),
    Tensor(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn seq(a: Expr, b: Expr) -> Expr {
        Expr::Seq(Box::new(a), Box::new(b))
    }

    pub fn tensor(a: Expr, b: Expr) -> Expr {
        Expr::Tensor(Box::new(a), Box::new(b))
    }

    /// `(inputs, outputs)`, or the first composition whose sides disagree.
    pub fn arity(&self) -> Result<(usize, usize)> {
        match self {
            Expr::Atom(a) => Ok(a.arity()),
            Expr::Tensor(a, b) => {
                let (n1, m1) = a.arity()?;
                let (n2, m2) = b.arity()?;
                Ok((n1 + n2, m1 + m2))
            }
            Expr::Seq(a, b) => {
                let (n, m) = a.arity()?;
                let (n2, m2) = b.arity()?;
                if m != n2 {
                    return Err(Error::CompositionMismatch {
                        left: a.to_string(),
                        right: b.to_string(),
                        outputs: m,
                        inputs: n2,
                    });
                }
                Ok((n, m2))
            }
        }
    }

    /// Builds the diagram with standard labels.
    pub fn build(&self) -> Result<Diagram> {
        self.arity()?;
        let mut d = self.build_raw();
        d.relabel_standard();
        Ok(d)
    }

    fn build_raw(&self) -> Diagram {
        match self {
            Expr::Atom(a) => a.diagram(),
            Expr::Tensor(a, b) => a.build_raw().tensor(&b.build_raw()),
            Expr::Seq(a, b) => a
                .build_raw()
                .then(&b.build_raw())
                .expect("arity checked before building"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Atom(a) => write!(f, "{a}"),
            Expr::Seq(a, b) => {
                write!(f, "{a} ; ")?;
                match **b {
                    Expr::Seq(..) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
            Expr::Tensor(a, b) => {
                match **a {
                    Expr::Seq(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                f.write_str(" * ")?;
                match **b {
                    Expr::Atom(_) => write!(f, "{b}"),
                    _ => write!(f, "({b})"),
                }
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, at: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            offset: at,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        loop {
            let rest = &self.src[self.pos..];
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                return;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self
                .peek()
                .map_or("end of input".to_string(), |x| format!("{x:?}"));
            Err(self.error(self.pos, format!("expected {c:?}, found {found}")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut e = self.tensor()?;
        while self.eat(';') {
            e = Expr::seq(e, self.tensor()?);
        }
        Ok(e)
    }

    fn tensor(&mut self) -> Result<Expr> {
        let mut e = self.atom()?;
        while self.eat('*') {
            e = Expr::tensor(e, self.atom()?);
        }
        Ok(e)
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let n = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        self.pos += n;
        &rest[..n]
    }

    fn count(&mut self) -> Result<usize> {
        self.skip_ws();
        let at = self.pos;
        let w = self.word();
        w.parse()
            .map_err(|_| self.error(at, format!("expected a wire count, found {w:?}")))
    }

    fn spider(&mut self) -> Result<(usize, usize, Angle)> {
        self.expect('(')?;
        let n = self.count()?;
        self.expect(',')?;
        let m = self.count()?;
        let angle = if self.eat(',') {
            self.skip_ws();
            let at = self.pos;
            let rest = &self.src[at..];
            let len = rest
                .find(')')
                .ok_or_else(|| self.error(at, "unclosed spider"))?;
            self.pos += len;
            rest[..len].parse::<Angle>().map_err(|e| match e {
                Error::Parse { message, .. } => self.error(at, message),
                other => other,
            })?
        } else {
            Angle::ZERO
        };
        self.expect(')')?;
        Ok((n, m, angle))
    }

    fn atom(&mut self) -> Result<Expr> {
        if self.eat('(') {
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        self.skip_ws();
        let at = self.pos;
        let a = match self.word() {
            "Z" => {
                let (inputs, outputs, angle) = self.spider()?;
                Atom::Z {
                    inputs,
                    outputs,
                    angle,
                }
            }
            "X" => {
                let (inputs, outputs, angle) = self.spider()?;
                Atom::X {
                    inputs,
                    outputs,
                    angle,
                }
            }
            "H" => Atom::H,
            "cup" => Atom::Cup,
            "cap" => Atom::Cap,
            "ground" => Atom::Ground,
            "id" => Atom::Id,
            "swap" => Atom::Swap,
            "" => {
                let found = self
                    .peek()
                    .map_or("end of input".to_string(), |x| format!("{x:?}"));
                return Err(self.error(at, format!("expected a generator, found {found}")));
            }
            w => return Err(self.error(at, format!("unknown generator {w:?}"))),
        };
        Ok(Expr::Atom(a))
    }
}

/// Parses without building.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    if let Some(c) = p.peek() {
        return Err(p.error(p.pos, format!("unexpected {c:?}")));
    }
    Ok(e)
}

pub fn parse_dsl(text: &str) -> Result<Diagram> {
    parse_expr(text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn cnot_matches_fixture() {
        let d = parse_dsl("(Z(1,2,0) * id) ; (id * X(2,1,0))").unwrap();
        assert_eq!(d, fixtures::cnot());
    }

    #[test]
    fn hh() {
        let d = parse_dsl("H ; H").unwrap();
        assert_eq!(d.generators().len(), 2);
        assert_eq!((d.num_inputs(), d.num_outputs()), (1, 1));
        let names: Vec<_> = d.edges().iter().map(|e| e.name.as_str()).collect();
        assert!(names.contains(&"a1") && names.contains(&"b1") && names.contains(&"e1"));
    }

    #[test]
    fn arity_errors_name_both_sides() {
        match parse_dsl("cup ; H") {
            Err(Error::CompositionMismatch {
                left,
                right,
                outputs,
                inputs,
            }) => {
                assert_eq!(
                    (left.as_str(), right.as_str(), outputs, inputs),
                    ("cup", "H", 0, 1)
                );
            }
            other => panic!("{other:?}"),
        }
        // a cup has no outputs and a cap no inputs, so this one is fine
        assert_eq!(parse_dsl("cup ; cap").unwrap().num_outputs(), 2);
        match parse_dsl("Z(1,2,0) ; (id * X(1,2,0)) ; X(2,1,0)") {
            Err(Error::CompositionMismatch { left, right, .. }) => {
                assert_eq!(left, "Z(1,2,0) ; id * X(1,2,0)");
                assert_eq!(right, "X(2,1,0)");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        assert_eq!(
            parse_dsl("H ; Q"),
            Err(Error::Parse {
                offset: 4,
                message: "unknown generator \"Q\"".into()
            })
        );
        assert!(matches!(
            parse_dsl("(H ; H"),
            Err(Error::Parse { offset: 6, .. })
        ));
        assert!(matches!(
            parse_dsl("Z(1,1,pi/0)"),
            Err(Error::Parse { offset: 6, .. })
        ));
        assert!(matches!(
            parse_dsl("H H"),
            Err(Error::Parse { offset: 2, .. })
        ));
        assert!(matches!(parse_dsl(""), Err(Error::Parse { offset: 0, .. })));
    }

    #[test]
    fn canonical_printing() {
        let e = parse_expr("Z(1,2) ;( id*X(2,1,-pi/2) ) # comment\n ; (H ; H)").unwrap();
        assert_eq!(e.to_string(), "Z(1,2,0) ; id * X(2,1,-pi/2) ; (H ; H)");
        assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
        let t = parse_expr("H * (H * H)").unwrap();
        assert_eq!(t.to_string(), "H * (H * H)");
        assert_eq!(
            parse_expr("Z(0,0,0.25)").unwrap().to_string(),
            "Z(0,0,0.25)"
        );
    }
}
