//! Text form of terms.
//!
//! ```text
//! term   := factor ('*' factor)*                 left-associative
//! factor := atom ('^-1')*
//! atom   := 'x' INT | 'g' INT | '1'
//!         | '[' term ',' term ']'
//!         | 'w(' term ',' term ',' term ',' term ')'
//!         | '(' term ')'
//! ```
//!
//! Whitespace between tokens is ignored. `Display` emits the canonical form:
//! no spaces, and parentheses only around a product that is the right operand
//! of `*` or the operand of `^-1`.

use std::fmt;

use thiserror::Error;

use crate::group::Elem;

use super::{Node, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at byte {position}: expected one of {}", expected.join(", "))]
pub struct ParseError {
    pub position: usize,
    pub expected: Vec<&'static str>,
}

const ATOM_START: &[&str] = &["x<int>", "g<int>", "1", "[", "w(", "("];

pub fn parse(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let t = p.term()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error(&["*", "^-1", "end of input"]));
    }
    Ok(t)
}

impl std::str::FromStr for Term {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, expected: &[&'static str]) -> ParseError {
        ParseError { position: self.pos, expected: expected.to_vec() }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn starts_with(&mut self, token: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(token.as_bytes())
    }

    fn expect(&mut self, token: &'static str) -> Result<(), ParseError> {
        if self.starts_with(token) {
            self.pos += token.len();
            Ok(())
        } else {
            Err(self.error(&[token]))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = Term::mul(&acc, &rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Term, ParseError> {
        let mut t = self.atom()?;
        while self.starts_with("^-1") {
            self.pos += 3;
            t = Term::inv(&t);
        }
        Ok(t)
    }

    fn index(&mut self, what: &'static str) -> Result<u32, ParseError> {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok().and_then(|s| s.parse().ok()).ok_or_else(|| {
            self.pos = start;
            self.error(&[what])
        })
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok(Term::var(self.index("<int>")?))
            }
            Some(b'g') => {
                self.pos += 1;
                Ok(Term::constant(Elem::new(self.index("<int>")? as usize)))
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Term::identity())
            }
            Some(b'[') => {
                self.pos += 1;
                let a = self.term()?;
                self.expect(",")?;
                let b = self.term()?;
                self.expect("]")?;
                Ok(Term::comm(&a, &b))
            }
            Some(b'w') => {
                self.pos += 1;
                self.expect("(")?;
                let x = self.term()?;
                let mut ys = Vec::with_capacity(3);
                for _ in 0..3 {
                    self.expect(",")?;
                    ys.push(self.term()?);
                }
                self.expect(")")?;
                Ok(Term::w(&x, &ys[0], &ys[1], &ys[2]))
            }
            Some(b'(') => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(")")?;
                Ok(t)
            }
            _ => Err(self.error(ATOM_START)),
        }
    }
}

fn write_operand(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if matches!(t.node(), Node::Mul(_)) {
        write!(f, "({t})")
    } else {
        write!(f, "{t}")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Var(i) => write!(f, "x{i}"),
            Node::Const(g) => write!(f, "g{g}"),
            Node::Identity => write!(f, "1"),
            Node::Mul([a, b]) => {
                write!(f, "{a}*")?;
                write_operand(b, f)
            }
            Node::Inv(a) => {
                write_operand(a, f)?;
                write!(f, "^-1")
            }
            Node::Comm([a, b]) => write!(f, "[{a},{b}]"),
            Node::W([x, y1, y2, y3]) => write!(f, "w({x},{y1},{y2},{y3})"),
        }
    }
}
