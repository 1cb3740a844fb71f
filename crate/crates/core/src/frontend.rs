//! Formulas over `⟨ℕ⁺; ·, =⟩`: parsing, compilation to semiskolemian sets,
//! and the decision procedure built on top.
//!
//! Grammar (ASCII, `#` starts a line comment):
//!
//! ```text
//! formula := binder | iff
//! binder  := ("forall" | "exists") ident+ "." formula
//! iff     := imp ("<->" imp)*
//! imp     := or ("->" imp)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | "(" formula ")" | binder | atom
//! atom    := term "=" term
//! term    := ident ("*" ident)*
//! ident   := [a-z][a-z0-9_]*
//! ```
//!
//! A binder inside `unary` extends as far to the right as possible.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::membership::member_semi;
use crate::semilinear::SemilinearSet;
use crate::skolemian::{SemiskolemianSet, SkolemianSet};
use crate::Limits;

/// Product of variables, kept as a sorted multiset of names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SkolemTerm {
    factors: Vec<String>,
}

impl SkolemTerm {
    pub fn new<I, S>(factors: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut factors: Vec<String> = factors.into_iter().map(Into::into).collect();
        if factors.is_empty() {
            return Err(Error::InvariantViolation(
                "a term needs at least one factor".into(),
            ));
        }
        factors.sort();
        Ok(SkolemTerm { factors })
    }

    pub fn factors(&self) -> &[String] {
        &self.factors
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SkolemFormula {
    Atom(SkolemTerm, SkolemTerm),
    Not(Box<SkolemFormula>),
    And(Vec<SkolemFormula>),
    Or(Vec<SkolemFormula>),
    Implies(Box<SkolemFormula>, Box<SkolemFormula>),
    Iff(Box<SkolemFormula>, Box<SkolemFormula>),
    Exists(String, Box<SkolemFormula>),
    Forall(String, Box<SkolemFormula>),
}

impl SkolemFormula {
    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        fn go(f: &SkolemFormula, bound: &mut Vec<String>, out: &mut Vec<String>) {
            match f {
                SkolemFormula::Atom(l, r) => {
                    for v in l.factors.iter().chain(&r.factors) {
                        if !bound.contains(v) && !out.contains(v) {
                            out.push(v.clone());
                        }
                    }
                }
                SkolemFormula::Not(g) => go(g, bound, out),
                SkolemFormula::And(cs) | SkolemFormula::Or(cs) => {
                    cs.iter().for_each(|c| go(c, bound, out))
                }
                SkolemFormula::Implies(a, b) | SkolemFormula::Iff(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                SkolemFormula::Exists(x, g) | SkolemFormula::Forall(x, g) => {
                    bound.push(x.clone());
                    go(g, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    fn occurs_free(&self, x: &str) -> bool {
        self.free_vars().iter().any(|v| v == x)
    }
}

impl fmt::Display for SkolemTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.factors.join(" * "))
    }
}

impl fmt::Display for SkolemFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn wrapped(f: &mut fmt::Formatter<'_>, g: &SkolemFormula) -> fmt::Result {
            match g {
                SkolemFormula::Atom(..) | SkolemFormula::Not(_) => write!(f, "{g}"),
                _ => write!(f, "({g})"),
            }
        }
        match self {
            SkolemFormula::Atom(l, r) => write!(f, "{l} = {r}"),
            SkolemFormula::Not(g) => {
                f.write_str("!")?;
                wrapped(f, g)
            }
            SkolemFormula::And(cs) | SkolemFormula::Or(cs) => {
                let sep = if matches!(self, SkolemFormula::And(_)) {
                    " & "
                } else {
                    " | "
                };
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    wrapped(f, c)?;
                }
                Ok(())
            }
            SkolemFormula::Implies(a, b) | SkolemFormula::Iff(a, b) => {
                wrapped(f, a)?;
                f.write_str(if matches!(self, SkolemFormula::Implies(..)) {
                    " -> "
                } else {
                    " <-> "
                })?;
                wrapped(f, b)
            }
            SkolemFormula::Exists(x, g) => write!(f, "exists {x} . {g}"),
            SkolemFormula::Forall(x, g) => write!(f, "forall {x} . {g}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Forall,
    Exists,
    Dot,
    Star,
    Eq,
    Amp,
    Bar,
    Bang,
    Arrow,
    Iff,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Forall => f.write_str("`forall`"),
            Tok::Exists => f.write_str("`exists`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Iff => f.write_str("`<->`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

/// Token with its 1-based line and column.
type Spanned = (Tok, usize, usize);

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1, 1);
    let err = |line, column, message: String| Error::Syntax {
        line,
        column,
        message,
    };
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        let mut advance = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    advance(&mut chars);
                }
            }
            c if c.is_whitespace() => {
                advance(&mut chars);
            }
            'a'..='z' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' {
                        word.push(c);
                        advance(&mut chars);
                    } else {
                        break;
                    }
                }
                let tok = match word.as_str() {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    _ => Tok::Ident(word),
                };
                out.push((tok, l0, c0));
            }
            '-' => {
                advance(&mut chars);
                if chars.peek() == Some(&'>') {
                    advance(&mut chars);
                    out.push((Tok::Arrow, l0, c0));
                } else {
                    return Err(err(l0, c0, "expected `->`".into()));
                }
            }
            '<' => {
                advance(&mut chars);
                let ok = chars.peek() == Some(&'-') && {
                    advance(&mut chars);
                    chars.peek() == Some(&'>')
                };
                if !ok {
                    return Err(err(l0, c0, "expected `<->`".into()));
                }
                advance(&mut chars);
                out.push((Tok::Iff, l0, c0));
            }
            _ => {
                let tok = match c {
                    '.' => Tok::Dot,
                    '*' => Tok::Star,
                    '=' => Tok::Eq,
                    '&' => Tok::Amp,
                    '|' => Tok::Bar,
                    '!' => Tok::Bang,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    other => {
                        return Err(err(l0, c0, format!("unexpected character `{other}`")));
                    }
                };
                advance(&mut chars);
                out.push((tok, l0, c0));
            }
        }
    }
    out.push((Tok::End, line, col));
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> Error {
        let (tok, line, column) = &self.toks[self.pos];
        Error::Syntax {
            line: *line,
            column: *column,
            message: format!("expected {expected}, found {tok}"),
        }
    }

    fn formula(&mut self) -> Result<SkolemFormula> {
        match self.peek() {
            Tok::Forall | Tok::Exists => self.binder(),
            _ => self.iff(),
        }
    }

    fn binder(&mut self) -> Result<SkolemFormula> {
        let universal = self.bump() == Tok::Forall;
        let mut names = Vec::new();
        while let Tok::Ident(name) = self.peek().clone() {
            self.bump();
            names.push(name);
        }
        if names.is_empty() {
            return Err(self.error("a variable name"));
        }
        if *self.peek() != Tok::Dot {
            return Err(self.error("`.`"));
        }
        self.bump();
        let mut body = self.formula()?;
        for name in names.into_iter().rev() {
            body = if universal {
                SkolemFormula::Forall(name, Box::new(body))
            } else {
                SkolemFormula::Exists(name, Box::new(body))
            };
        }
        Ok(body)
    }

    fn iff(&mut self) -> Result<SkolemFormula> {
        let mut lhs = self.imp()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.imp()?;
            lhs = SkolemFormula::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<SkolemFormula> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.imp()?;
            return Ok(SkolemFormula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<SkolemFormula> {
        let mut parts = vec![self.and()?];
        while *self.peek() == Tok::Bar {
            self.bump();
            parts.push(self.and()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            SkolemFormula::Or(parts)
        })
    }

    fn and(&mut self) -> Result<SkolemFormula> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            SkolemFormula::And(parts)
        })
    }

    fn unary(&mut self) -> Result<SkolemFormula> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(SkolemFormula::Not(Box::new(self.unary()?)))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error("`)`"));
                }
                self.bump();
                Ok(f)
            }
            Tok::Forall | Tok::Exists => self.binder(),
            _ => {
                let lhs = self.term()?;
                if *self.peek() != Tok::Eq {
                    return Err(self.error("`=`"));
                }
                self.bump();
                let rhs = self.term()?;
                Ok(SkolemFormula::Atom(lhs, rhs))
            }
        }
    }

    fn term(&mut self) -> Result<SkolemTerm> {
        let mut factors = vec![self.ident()?];
        while *self.peek() == Tok::Star {
            self.bump();
            factors.push(self.ident()?);
        }
        SkolemTerm::new(factors)
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.error("a variable name")),
        }
    }
}

/// Parses a formula; errors carry line and column.
pub fn parse(text: &str) -> Result<SkolemFormula> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.error("end of input"));
    }
    Ok(f)
}

/// The semiskolemian set defined by `f`, with coordinate `i` bound to
/// `var_order[i]`.
pub fn compile(
    f: &SkolemFormula,
    var_order: &[String],
    limits: &Limits,
) -> Result<SemiskolemianSet> {
    let mut free = f.free_vars();
    free.sort();
    let mut order = var_order.to_vec();
    order.sort();
    let before = order.len();
    order.dedup();
    if order != free || before != order.len() {
        return Err(Error::InvariantViolation(format!(
            "variable order [{}] must list each free variable [{}] exactly once",
            var_order.join(", "),
            f.free_vars().join(", ")
        )));
    }
    let mut env = var_order.to_vec();
    Compiler { limits }.run(f, &mut env, false)
}

struct Compiler<'a> {
    limits: &'a Limits,
}

impl Compiler<'_> {
    /// Compiles `f`, or its negation when `negated` is set. Negations are
    /// pushed down to atoms and quantifier boundaries, so that chains of
    /// `!`, `->` and `forall` never complement a set twice.
    fn run(
        &self,
        f: &SkolemFormula,
        env: &mut Vec<String>,
        negated: bool,
    ) -> Result<SemiskolemianSet> {
        self.step(f, env, negated).map_err(|e| match e {
            Error::ResourceLimit(msg) if !msg.contains("while compiling") => {
                Error::ResourceLimit(format!("{msg} (while compiling `{f}`)"))
            }
            other => other,
        })
    }

    fn conjunction<'f>(
        &self,
        parts: impl IntoIterator<Item = (&'f SkolemFormula, bool)>,
        env: &mut Vec<String>,
    ) -> Result<SemiskolemianSet> {
        let mut acc: Option<SemiskolemianSet> = None;
        for (g, neg) in parts {
            let s = self.run(g, env, neg)?;
            acc = Some(match acc {
                None => s,
                Some(a) => a.intersect(&s, self.limits)?,
            });
            if acc.as_ref().is_some_and(|a| a.is_empty_syntactic()) {
                break;
            }
        }
        Ok(acc.expect("non-empty conjunction"))
    }

    fn disjunction<'f>(
        &self,
        parts: impl IntoIterator<Item = (&'f SkolemFormula, bool)>,
        env: &mut Vec<String>,
    ) -> Result<SemiskolemianSet> {
        let mut acc: Option<SemiskolemianSet> = None;
        for (g, neg) in parts {
            let s = self.run(g, env, neg)?;
            acc = Some(match acc {
                None => s,
                Some(a) => a.union(&s, self.limits)?,
            });
        }
        Ok(acc.expect("non-empty disjunction"))
    }

    fn step(
        &self,
        f: &SkolemFormula,
        env: &mut Vec<String>,
        negated: bool,
    ) -> Result<SemiskolemianSet> {
        let limits = self.limits;
        let dim = env.len();
        match f {
            SkolemFormula::Atom(l, r) => {
                let coords = |t: &SkolemTerm| -> Vec<(usize, u64)> {
                    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
                    for name in &t.factors {
                        let i = env
                            .iter()
                            .rposition(|v| v == name)
                            .expect("scoped variable");
                        *counts.entry(i + 1).or_default() += 1;
                    }
                    counts.into_iter().collect()
                };
                let alpha = SemilinearSet::atom_linear(dim, &coords(l), &coords(r))?;
                let def = SkolemianSet::new(Vec::new(), alpha)?;
                let set = SemiskolemianSet::new(dim, vec![def])?;
                if negated {
                    set.complement(limits)
                } else {
                    Ok(set)
                }
            }
            SkolemFormula::Not(g) => self.run(g, env, !negated),
            SkolemFormula::And(cs) => {
                let parts = cs.iter().map(|c| (c, negated));
                if negated {
                    self.disjunction(parts, env)
                } else {
                    self.conjunction(parts, env)
                }
            }
            SkolemFormula::Or(cs) => {
                let parts = cs.iter().map(|c| (c, negated));
                if negated {
                    self.conjunction(parts, env)
                } else {
                    self.disjunction(parts, env)
                }
            }
            SkolemFormula::Implies(a, b) => {
                // a -> b is !a | b; its negation is a & !b.
                let parts = [(&**a, !negated), (&**b, negated)];
                if negated {
                    self.conjunction(parts, env)
                } else {
                    self.disjunction(parts, env)
                }
            }
            SkolemFormula::Iff(a, b) => {
                let both = self.conjunction([(&**a, false), (&**b, negated)], env)?;
                let neither = self.conjunction([(&**a, true), (&**b, !negated)], env)?;
                both.union(&neither, limits)
            }
            SkolemFormula::Exists(x, g) | SkolemFormula::Forall(x, g) => {
                if !g.occurs_free(x) {
                    return self.run(g, env, negated);
                }
                // exists: project the body; forall: complement the
                // projection of the negated body.
                let universal = matches!(f, SkolemFormula::Forall(..));
                env.push(x.clone());
                let inner = self.run(g, env, universal);
                env.pop();
                let projected = inner?.project_away(dim + 1, limits)?;
                if universal != negated {
                    projected.complement(limits)
                } else {
                    Ok(projected)
                }
            }
        }
    }
}

/// Truth value of a sentence.
pub fn decide(f: &SkolemFormula, limits: &Limits) -> Result<bool> {
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(Error::InvariantViolation(format!(
            "not a sentence: free variables {}",
            free.join(", ")
        )));
    }
    compile(f, &[], limits)?.decide_dim_zero()
}

/// Truth of `f` under an assignment of positive integers to its free variables.
pub fn eval_ground(
    f: &SkolemFormula,
    assignment: &BTreeMap<String, u64>,
    limits: &Limits,
) -> Result<bool> {
    let order = f.free_vars();
    let mut assigned: Vec<&String> = assignment.keys().collect();
    assigned.sort();
    let mut wanted: Vec<&String> = order.iter().collect();
    wanted.sort();
    if assigned != wanted {
        return Err(Error::InvariantViolation(format!(
            "assignment must cover exactly the free variables [{}]",
            order.join(", ")
        )));
    }
    let tuple: Vec<u64> = order.iter().map(|v| assignment[v]).collect();
    if let Some(v) = order.iter().find(|v| assignment[*v] == 0) {
        return Err(Error::Domain(format!(
            "`{v}` is assigned 0; variables range over positive integers"
        )));
    }
    let set = compile(f, &order, limits)?;
    member_semi(&set, &tuple)
}
