//! Polynomial expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := ['-'] atom ['^' nat]
//! atom   := nat | 'xi' | 'h' | 'q1' | 'q2' | '(' expr ')'
//! ```
//!
//! `ξ` is accepted for `xi`. Multiplication must be written out.

use num_bigint::BigInt;
use qchern::{Polynomial, Var};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    pub fn eval(&self) -> Polynomial {
        match self {
            Expr::Int(c) => Polynomial::constant(c.clone()),
            Expr::Var(v) => Polynomial::var(*v),
            Expr::Neg(e) => -e.eval(),
            Expr::Add(a, b) => a.eval() + b.eval(),
            Expr::Sub(a, b) => a.eval() - b.eval(),
            Expr::Mul(a, b) => a.eval() * b.eval(),
            Expr::Pow(e, k) => e.eval().pow(*k),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("negative exponent at byte {offset}")]
    NegativeExponent { offset: usize },
    #[error("exponent at byte {offset} is too large")]
    ExponentTooLarge { offset: usize },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("`{n}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            let n: BigInt = text[i..end].parse().expect("digits");
            out.push((i, Tok::Int(n)));
        } else if c.is_alphabetic() || c == '_' {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if !(d.is_alphanumeric() || d == '_') {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            out.push((i, Tok::Ident(text[i..end].to_string())));
        } else if "+-*^()".contains(c) {
            out.push((i, Tok::Sym(c)));
            chars.next();
        } else {
            return Err(ParseError::Syntax {
                offset: i,
                expected: vec!["an operator", "an operand"],
                found: format!("`{c}`"),
            });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn fail<T>(&self, expected: &[&'static str]) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.offset(),
            expected: expected.to_vec(),
            found: self.peek().describe(),
        })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while self.eat('*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let negate = self.eat('-');
        let mut e = self.atom()?;
        if self.eat('^') {
            let at = self.offset();
            match self.peek().clone() {
                Tok::Int(k) => {
                    self.pos += 1;
                    let k = u32::try_from(k).map_err(|_| ParseError::ExponentTooLarge { offset: at })?;
                    e = Expr::Pow(Box::new(e), k);
                }
                Tok::Sym('-') => return Err(ParseError::NegativeExponent { offset: at }),
                _ => return self.fail(&["a non-negative integer exponent"]),
            }
        }
        Ok(if negate { Expr::Neg(Box::new(e)) } else { e })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Tok::Ident(name) => {
                self.pos += 1;
                let v = match name.as_str() {
                    "xi" | "ξ" => Var::Xi,
                    "h" => Var::H,
                    "q1" => Var::Q1,
                    "q2" => Var::Q2,
                    _ => return Err(ParseError::UnknownIdentifier { offset: at, name }),
                };
                Ok(Expr::Var(v))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.fail(&["`)`", "an operator"]);
                }
                Ok(e)
            }
            _ => self.fail(&["an integer", "a variable", "`(`"]),
        }
    }
}

pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(&["an operator", "end of input"]);
    }
    Ok(e)
}

/// Parses and expands in one go.
pub fn parse_polynomial(text: &str) -> Result<Polynomial, ParseError> {
    parse_expression(text).map(|e| e.eval())
}
