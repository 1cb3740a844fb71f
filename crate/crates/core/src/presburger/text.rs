//! Textual form of Presburger formulas.
//!
//! Atoms render as `2*v1 - v2 + 3 = 0`, `v1 - 4 <= 0` and `3 | v1 + 1`;
//! connectives as `!`, `&`, `|` with parenthesized operands.

use std::fmt;
use std::str::FromStr;

use super::{Atom, Formula, LinearTerm, Var};
use crate::error::{Error, Result};

impl fmt::Display for LinearTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "{}", self.constant);
        }
        for (i, &(v, c)) in self.coeffs.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0 { '-' } else { '+' })?;
            }
            if mag == 1 {
                write!(f, "v{v}")?;
            } else {
                write!(f, "{mag}*v{v}")?;
            }
        }
        match self.constant {
            0 => Ok(()),
            c if c > 0 => write!(f, " + {c}"),
            c => write!(f, " - {}", c.unsigned_abs()),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Eq(t) => write!(f, "{t} = 0"),
            Atom::Le(t) => write!(f, "{t} <= 0"),
            Atom::Dvd(m, t) => write!(f, "{m} | {t}"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "TRUE"),
            Formula::False => write!(f, "FALSE"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(g) => write!(f, "!({g})"),
            Formula::And(cs) | Formula::Or(cs) => {
                let sep = if matches!(self, Formula::And(_)) {
                    " & "
                } else {
                    " | "
                };
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    match c {
                        Formula::Not(_) => write!(f, "{c}")?,
                        _ => write!(f, "({c})")?,
                    }
                }
                Ok(())
            }
        }
    }
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_formula(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(i128),
    Var(Var),
    Plus,
    Minus,
    Star,
    Eq,
    Le,
    Bar,
    Amp,
    Bang,
    LParen,
    RParen,
    True,
    False,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn syntax(src: &str, offset: usize, message: impl Into<String>) -> Error {
    let (line, column) = position(src, offset);
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer {
            src,
            toks: Vec::new(),
        };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let start = i;
            let single = match c {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    i += 1;
                    continue;
                }
                b'+' => Some(Tok::Plus),
                b'-' => Some(Tok::Minus),
                b'*' => Some(Tok::Star),
                b'=' => Some(Tok::Eq),
                b'|' => Some(Tok::Bar),
                b'&' => Some(Tok::Amp),
                b'!' => Some(Tok::Bang),
                b'(' => Some(Tok::LParen),
                b')' => Some(Tok::RParen),
                _ => None,
            };
            if let Some(t) = single {
                lx.toks.push((t, start));
                i += 1;
                continue;
            }
            if c == b'<' {
                if bytes.get(i + 1) == Some(&b'=') {
                    lx.toks.push((Tok::Le, start));
                    i += 2;
                    continue;
                }
                return Err(syntax(src, start, "expected `<=`"));
            }
            if c.is_ascii_digit() {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = src[start..i]
                    .parse::<i128>()
                    .map_err(|_| syntax(src, start, "integer literal too large"))?;
                lx.toks.push((Tok::Int(n), start));
                continue;
            }
            if c.is_ascii_alphabetic() {
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let word = &src[start..i];
                let tok = match word {
                    "TRUE" => Tok::True,
                    "FALSE" => Tok::False,
                    _ => match word.strip_prefix('v').map(str::parse::<Var>) {
                        Some(Ok(v)) if v >= 1 => Tok::Var(v),
                        _ => return Err(syntax(src, start, format!("unknown word `{word}`"))),
                    },
                };
                lx.toks.push((tok, start));
                continue;
            }
            return Err(syntax(
                src,
                start,
                format!(
                    "unexpected character `{}`",
                    src[start..].chars().next().unwrap()
                ),
            ));
        }
        lx.toks.push((Tok::End, lx.src.len()));
        Ok(lx.toks)
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> Error {
        syntax(self.src, self.toks[self.pos].1, message)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn or(&mut self) -> Result<Formula> {
        let mut parts = vec![self.and()?];
        while *self.peek() == Tok::Bar {
            self.bump();
            parts.push(self.and()?);
        }
        Ok(Formula::or(parts))
    }

    fn and(&mut self) -> Result<Formula> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.or()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        if let (Tok::Int(m), Tok::Bar) = (self.peek().clone(), self.peek_at(1)) {
            if m < 1 {
                return Err(self.error("modulus must be positive"));
            }
            self.bump();
            self.bump();
            let t = self.term()?;
            return Ok(Formula::dvd(m, t));
        }
        let lhs = self.term()?;
        let op = self.bump();
        let rhs = self.term()?;
        let diff = lhs.add(&rhs.neg()?)?;
        match op {
            Tok::Eq => Ok(Formula::eq(diff)),
            Tok::Le => Ok(Formula::le(diff)),
            _ => {
                self.pos -= 1;
                Err(self.error("expected `=` or `<=`"))
            }
        }
    }

    fn term(&mut self) -> Result<LinearTerm> {
        let mut parts = Vec::new();
        let mut constant = 0i128;
        let mut sign = 1i128;
        if *self.peek() == Tok::Minus {
            self.bump();
            sign = -1;
        }
        loop {
            match self.bump() {
                Tok::Int(n) => {
                    if *self.peek() == Tok::Star {
                        self.bump();
                        match self.bump() {
                            Tok::Var(v) => parts.push((v, sign * n)),
                            _ => {
                                self.pos -= 1;
                                return Err(self.error("expected variable after `*`"));
                            }
                        }
                    } else {
                        constant += sign * n;
                    }
                }
                Tok::Var(v) => parts.push((v, sign)),
                _ => {
                    self.pos -= 1;
                    return Err(self.error("expected integer or variable"));
                }
            }
            match self.peek() {
                Tok::Plus => sign = 1,
                Tok::Minus => sign = -1,
                _ => break,
            }
            self.bump();
        }
        LinearTerm::from_parts(parts, constant)
    }
}

/// Reads a formula in the rendering produced by `Display`.
pub fn parse_formula(src: &str) -> Result<Formula> {
    let toks = Lexer::run(src)?;
    let mut p = Parser { src, toks, pos: 0 };
    let f = p.or()?;
    if *p.peek() != Tok::End {
        return Err(p.error("trailing input"));
    }
    Ok(f)
}
