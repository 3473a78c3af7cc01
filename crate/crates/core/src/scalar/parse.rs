//! Recursive-descent parser for the scalar expression grammar.
//!
//! ```text
//! expr    := ['-'] term (('+'|'-') term)*
//! term    := factor (('*'|'/') factor)*
//! factor  := base ('^' nonneg-integer)?
//! base    := integer | identifier | '(' expr ')'
//! ```
//!
//! Whitespace is insignificant; implicit multiplication is not allowed.
//! A quotient of integer literals such as `3/2` is ordinary division, which
//! over exact rationals is the same thing as a rational literal.

use num::BigInt;
use thiserror::Error;

use super::{Poly, Rational, ScalarError, ScalarExpr, Vars};

/// Syntax or semantic error, with the byte offset where it occurred.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { position, message: message.into() })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer {
    toks: Vec<(usize, Tok)>,
    end: usize,
}

fn lex(text: &str) -> Result<Lexer, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => { toks.push((i, Tok::Plus)); i += 1 }
            '-' => { toks.push((i, Tok::Minus)); i += 1 }
            '*' => { toks.push((i, Tok::Star)); i += 1 }
            '/' => { toks.push((i, Tok::Slash)); i += 1 }
            '^' => { toks.push((i, Tok::Caret)); i += 1 }
            '(' => { toks.push((i, Tok::LParen)); i += 1 }
            ')' => { toks.push((i, Tok::RParen)); i += 1 }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..i];
                let n: BigInt = digits.parse().expect("digit run parses");
                toks.push((start, Tok::Int(n)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((start, Tok::Ident(text[start..i].to_string())));
            }
            other => return err(i, format!("unexpected character `{other}`")),
        }
    }
    Ok(Lexer { toks, end: bytes.len() })
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
    vars: &'a Vars,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t);
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut acc = if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            -&self.term()?
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = &acc * &self.factor()?;
                }
                Some(Tok::Slash) => {
                    let at = self.here();
                    self.bump();
                    let rhs = self.factor()?;
                    acc = acc.div(&rhs).map_err(|_| ParseError {
                        position: at,
                        message: "division by the zero polynomial".into(),
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<ScalarExpr, ParseError> {
        let base = self.base()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let at = self.here();
            match self.bump() {
                Some(Tok::Int(n)) => {
                    let e = u32::try_from(n).map_err(|_| ParseError {
                        position: at,
                        message: "exponent too large".into(),
                    })?;
                    Ok(base.pow(e))
                }
                _ => err(at, "expected a nonnegative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<ScalarExpr, ParseError> {
        let at = self.here();
        match self.bump().cloned() {
            Some(Tok::Int(n)) => Ok(ScalarExpr::from_poly(Poly::constant(
                self.vars,
                Rational::from_integer(n),
            ))),
            Some(Tok::Ident(name)) => match self.vars.index_of(&name) {
                Some(idx) => Ok(ScalarExpr::var(self.vars, idx)),
                None => err(at, format!("unknown variable `{name}`")),
            },
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                let at = self.here();
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => err(at, "expected `)`"),
                }
            }
            Some(t) => err(at, format!("unexpected token {t:?}")),
            None => err(at, "unexpected end of input"),
        }
    }
}

/// Parses an expression over the given variables into canonical form.
pub fn parse_expr(text: &str, vars: &Vars) -> Result<ScalarExpr, ParseError> {
    let lexer = lex(text)?;
    let mut p = Parser { toks: &lexer.toks, pos: 0, end: lexer.end, vars };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return err(p.here(), "trailing input after expression");
    }
    Ok(e)
}

/// Parses a constant expression (no variables) to an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, ParseError> {
    let vars = Vars::new(Vec::<String>::new());
    let e = parse_expr(text, &vars)?;
    e.as_constant().ok_or_else(|| ParseError {
        position: 0,
        message: "expected a constant expression".into(),
    })
}

impl From<ScalarError> for ParseError {
    fn from(e: ScalarError) -> Self {
        ParseError { position: 0, message: e.to_string() }
    }
}
