//! Quantifier-free Presburger formulas over natural-valued variables.
//!
//! Variables are 1-based indices `v1, v2, ...`. Formulas are kept in a
//! light canonical form by the smart constructors on [`Formula`]: atoms are
//! gcd-reduced, closed atoms are folded to constants, and n-ary connectives
//! are flattened, sorted and deduplicated. The smart constructors are sound
//! over the integers; [`Formula::assume_natural`] additionally folds atoms
//! that are decided by nonnegativity of every variable.

mod qe;
mod text;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use qe::{decide_sentence, eliminate_exists, eliminate_exists_many, Quantifier};
pub use text::parse_formula;

/// 1-based variable index.
pub type Var = u32;

pub(crate) fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm(a: i128, b: i128) -> Result<i128> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    let g = gcd(a, b);
    (a.abs() / g)
        .checked_mul(b.abs())
        .ok_or_else(Error::overflow)
}

fn ceil_div(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    -((-a).div_euclid(b))
}

/// Residue of `a` modulo `m` in `(-m/2, m/2]`.
fn symmetric_mod(a: i128, m: i128) -> i128 {
    let r = a.rem_euclid(m);
    if r > m / 2 {
        r - m
    } else {
        r
    }
}

/// `Σ cᵢ·vᵢ + constant` with sorted variables and no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LinearTerm {
    coeffs: Vec<(Var, i128)>,
    constant: i128,
}

impl LinearTerm {
    pub fn constant(c: i128) -> Self {
        LinearTerm {
            coeffs: Vec::new(),
            constant: c,
        }
    }

    pub fn var(v: Var) -> Self {
        LinearTerm {
            coeffs: vec![(v, 1)],
            constant: 0,
        }
    }

    /// Builds a term, merging repeated variables and dropping zero coefficients.
    pub fn from_parts<I>(coeffs: I, constant: i128) -> Result<Self>
    where
        I: IntoIterator<Item = (Var, i128)>,
    {
        let mut raw: Vec<(Var, i128)> = coeffs.into_iter().collect();
        raw.sort_by_key(|&(v, _)| v);
        let mut merged: Vec<(Var, i128)> = Vec::with_capacity(raw.len());
        for (v, c) in raw {
            match merged.last_mut() {
                Some((lv, lc)) if *lv == v => {
                    *lc = lc.checked_add(c).ok_or_else(Error::overflow)?;
                }
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|&(_, c)| c != 0);
        Ok(LinearTerm {
            coeffs: merged,
            constant,
        })
    }

    pub fn coeffs(&self) -> &[(Var, i128)] {
        &self.coeffs
    }

    pub fn constant_part(&self) -> i128 {
        self.constant
    }

    pub fn coeff(&self, v: Var) -> i128 {
        self.coeffs
            .binary_search_by_key(&v, |&(w, _)| w)
            .map(|i| self.coeffs[i].1)
            .unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mentions(&self, v: Var) -> bool {
        self.coeff(v) != 0
    }

    pub fn max_var(&self) -> Option<Var> {
        self.coeffs.last().map(|&(v, _)| v)
    }

    pub fn add(&self, other: &LinearTerm) -> Result<Self> {
        let constant = self
            .constant
            .checked_add(other.constant)
            .ok_or_else(Error::overflow)?;
        LinearTerm::from_parts(
            self.coeffs.iter().chain(other.coeffs.iter()).copied(),
            constant,
        )
    }

    pub fn scale(&self, k: i128) -> Result<Self> {
        if k == 0 {
            return Ok(LinearTerm::default());
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|&(v, c)| c.checked_mul(k).map(|c| (v, c)))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(Error::overflow)?;
        let constant = self.constant.checked_mul(k).ok_or_else(Error::overflow)?;
        Ok(LinearTerm { coeffs, constant })
    }

    pub fn neg(&self) -> Result<Self> {
        self.scale(-1)
    }

    pub fn add_constant(&self, k: i128) -> Result<Self> {
        let mut t = self.clone();
        t.constant = t.constant.checked_add(k).ok_or_else(Error::overflow)?;
        Ok(t)
    }

    /// The term with variable `v` dropped.
    pub fn without(&self, v: Var) -> Self {
        LinearTerm {
            coeffs: self
                .coeffs
                .iter()
                .copied()
                .filter(|&(w, _)| w != v)
                .collect(),
            constant: self.constant,
        }
    }

    /// Replaces `v` by `replacement`.
    pub fn substitute(&self, v: Var, replacement: &LinearTerm) -> Result<Self> {
        let c = self.coeff(v);
        if c == 0 {
            return Ok(self.clone());
        }
        self.without(v).add(&replacement.scale(c)?)
    }

    pub fn rename(&self, f: &impl Fn(Var) -> Var) -> Result<Self> {
        LinearTerm::from_parts(self.coeffs.iter().map(|&(v, c)| (f(v), c)), self.constant)
    }

    pub fn eval(&self, point: &[u64]) -> Result<i128> {
        let mut acc = self.constant;
        for &(v, c) in &self.coeffs {
            let x = *point.get(v as usize - 1).ok_or(Error::DimensionMismatch {
                expected: v as usize,
                found: point.len(),
            })?;
            acc = c
                .checked_mul(x as i128)
                .and_then(|p| acc.checked_add(p))
                .ok_or_else(Error::overflow)?;
        }
        Ok(acc)
    }
}

/// Atomic constraint. `Eq(t)` is `t = 0`, `Le(t)` is `t <= 0`, `Dvd(m, t)` is `m | t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Eq(LinearTerm),
    Le(LinearTerm),
    Dvd(i128, LinearTerm),
}

impl Atom {
    pub fn term(&self) -> &LinearTerm {
        match self {
            Atom::Eq(t) | Atom::Le(t) | Atom::Dvd(_, t) => t,
        }
    }

    pub fn mentions(&self, v: Var) -> bool {
        self.term().mentions(v)
    }

    pub fn eval(&self, point: &[u64]) -> Result<bool> {
        Ok(match self {
            Atom::Eq(t) => t.eval(point)? == 0,
            Atom::Le(t) => t.eval(point)? <= 0,
            Atom::Dvd(m, t) => t.eval(point)?.rem_euclid(*m) == 0,
        })
    }

    fn with_term(&self, t: LinearTerm) -> Atom {
        match self {
            Atom::Eq(_) => Atom::Eq(t),
            Atom::Le(_) => Atom::Le(t),
            Atom::Dvd(m, _) => Atom::Dvd(*m, t),
        }
    }

    /// Canonical form: either a constant or a normalized atom.
    fn normalize(self) -> Formula {
        match self {
            Atom::Le(t) => {
                if t.is_constant() {
                    return Formula::constant(t.constant <= 0);
                }
                let g = t.coeffs.iter().fold(0, |g, &(_, c)| gcd(g, c));
                if g > 1 {
                    let coeffs = t.coeffs.iter().map(|&(v, c)| (v, c / g)).collect();
                    let constant = ceil_div(t.constant, g);
                    return Formula::Atom(Atom::Le(LinearTerm { coeffs, constant }));
                }
                Formula::Atom(Atom::Le(t))
            }
            Atom::Eq(t) => {
                if t.is_constant() {
                    return Formula::constant(t.constant == 0);
                }
                let g = t.coeffs.iter().fold(0, |g, &(_, c)| gcd(g, c));
                if t.constant % g != 0 {
                    return Formula::False;
                }
                let sign = if t.coeffs[0].1 < 0 { -1 } else { 1 };
                let k = sign * g;
                let coeffs = t.coeffs.iter().map(|&(v, c)| (v, c / k)).collect();
                Formula::Atom(Atom::Eq(LinearTerm {
                    coeffs,
                    constant: t.constant / k,
                }))
            }
            Atom::Dvd(m, t) => {
                let m = m.abs();
                if m <= 1 {
                    // 0 | t is t = 0
                    return if m == 1 {
                        Formula::True
                    } else {
                        Atom::Eq(t).normalize()
                    };
                }
                let mut coeffs: Vec<(Var, i128)> = t
                    .coeffs
                    .iter()
                    .map(|&(v, c)| (v, symmetric_mod(c, m)))
                    .filter(|&(_, c)| c != 0)
                    .collect();
                let mut constant = symmetric_mod(t.constant, m);
                if coeffs.is_empty() {
                    return Formula::constant(constant == 0);
                }
                let g = coeffs.iter().fold(gcd(m, constant), |g, &(_, c)| gcd(g, c));
                let m = m / g;
                if m == 1 {
                    return Formula::True;
                }
                for (_, c) in coeffs.iter_mut() {
                    *c /= g;
                }
                constant /= g;
                if coeffs[0].1 < 0 {
                    for (_, c) in coeffs.iter_mut() {
                        *c = symmetric_mod(-*c, m);
                    }
                    constant = symmetric_mod(-constant, m);
                    coeffs.retain(|&(_, c)| c != 0);
                }
                Formula::Atom(Atom::Dvd(m, LinearTerm { coeffs, constant }))
            }
        }
    }

    /// Folds atoms decided by every variable being nonnegative.
    fn assume_natural(&self) -> Option<bool> {
        let t = self.term();
        let all_nonneg = t.coeffs.iter().all(|&(_, c)| c >= 0);
        let all_nonpos = t.coeffs.iter().all(|&(_, c)| c <= 0);
        match self {
            Atom::Le(_) if all_nonneg && t.constant > 0 => Some(false),
            Atom::Le(_) if all_nonpos && t.constant <= 0 => Some(true),
            Atom::Eq(_) if (all_nonneg && t.constant > 0) || (all_nonpos && t.constant < 0) => {
                Some(false)
            }
            _ => None,
        }
    }
}

/// Boolean combination of [`Atom`]s, quantifier-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl From<Formula> for String {
    fn from(f: Formula) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for Formula {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        parse_formula(&s)
    }
}

impl Formula {
    pub fn constant(b: bool) -> Formula {
        if b {
            Formula::True
        } else {
            Formula::False
        }
    }

    pub fn atom(a: Atom) -> Formula {
        a.normalize()
    }

    /// `t = 0`
    pub fn eq(t: LinearTerm) -> Formula {
        Atom::Eq(t).normalize()
    }

    /// `t <= 0`
    pub fn le(t: LinearTerm) -> Formula {
        Atom::Le(t).normalize()
    }

    /// `t < 0`, stored as `t + 1 <= 0`.
    pub fn lt(t: LinearTerm) -> Result<Formula> {
        Ok(Formula::le(t.add_constant(1)?))
    }

    /// `t >= 0`, stored as `-t <= 0`.
    pub fn ge(t: LinearTerm) -> Result<Formula> {
        Ok(Formula::le(t.neg()?))
    }

    /// `t != 0`, stored as a negated equality.
    pub fn ne(t: LinearTerm) -> Formula {
        Formula::not(Formula::eq(t))
    }

    /// `m | t`
    pub fn dvd(m: i128, t: LinearTerm) -> Formula {
        Atom::Dvd(m, t).normalize()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(g) => *g,
            Formula::Atom(Atom::Le(t)) => {
                // !(t <= 0)  <=>  -t + 1 <= 0
                match t.neg().and_then(|n| n.add_constant(1)) {
                    Ok(n) => Formula::le(n),
                    Err(_) => Formula::Not(Box::new(Formula::Atom(Atom::Le(t)))),
                }
            }
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn and<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(cs) => out.extend(cs),
                other => out.push(other),
            }
        }
        Self::finish_nary(out, true)
    }

    pub fn or<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(cs) => out.extend(cs),
                other => out.push(other),
            }
        }
        Self::finish_nary(out, false)
    }

    fn finish_nary(parts: Vec<Formula>, conjunction: bool) -> Formula {
        let Some(mut parts) = Self::merge_bounds(parts, conjunction) else {
            return Formula::constant(!conjunction);
        };
        parts.sort();
        parts.dedup();
        // absorption: p & (p | q) is p, and p | (p & q) is p
        let direct: BTreeSet<Formula> = parts.iter().cloned().collect();
        parts.retain(|p| match p {
            Formula::Or(cs) if conjunction => !cs.iter().any(|c| direct.contains(c)),
            Formula::And(cs) if !conjunction => !cs.iter().any(|c| direct.contains(c)),
            _ => true,
        });
        // p together with !p
        for p in &parts {
            if let Formula::Not(inner) = p {
                if parts.binary_search(inner).is_ok() {
                    return Formula::constant(!conjunction);
                }
            }
        }
        match parts.len() {
            0 => Formula::constant(conjunction),
            1 => parts.pop().unwrap(),
            _ if conjunction => Formula::And(parts),
            _ => Formula::Or(parts),
        }
    }

    /// Keeps one `t + c <= 0` per linear part `t` (tightest under `&`,
    /// loosest under `|`) and resolves opposite pairs `t + a <= 0`,
    /// `-t + b <= 0`. `None` means the whole connective collapses
    /// (false for `&`, true for `|`).
    fn merge_bounds(parts: Vec<Formula>, conjunction: bool) -> Option<Vec<Formula>> {
        use std::collections::BTreeMap;
        let mut bounds: BTreeMap<Vec<(Var, i128)>, i128> = BTreeMap::new();
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                Formula::Atom(Atom::Le(t)) => {
                    let c = t.constant;
                    bounds
                        .entry(t.coeffs)
                        .and_modify(|old| {
                            *old = if conjunction {
                                (*old).max(c)
                            } else {
                                (*old).min(c)
                            }
                        })
                        .or_insert(c);
                }
                other => out.push(other),
            }
        }
        let mut consumed = BTreeSet::new();
        for (coeffs, &a) in &bounds {
            if consumed.contains(coeffs) {
                continue;
            }
            let opposite: Vec<(Var, i128)> = coeffs.iter().map(|&(v, c)| (v, -c)).collect();
            let Some(&b) = bounds.get(&opposite) else {
                continue;
            };
            // t <= -a and t >= b
            let sum = a.checked_add(b)?;
            if conjunction {
                if sum > 0 {
                    return None;
                }
                if sum == 0 {
                    consumed.insert(coeffs.clone());
                    consumed.insert(opposite);
                    out.push(Formula::eq(LinearTerm {
                        coeffs: coeffs.clone(),
                        constant: a,
                    }));
                }
            } else if sum <= 1 {
                return None;
            }
        }
        for (coeffs, constant) in bounds {
            if !consumed.contains(&coeffs) {
                out.push(Formula::Atom(Atom::Le(LinearTerm { coeffs, constant })));
            }
        }
        Some(out)
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or([Formula::not(a), b])
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::False)
    }

    /// Node count, used against the configured size cap.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(g) => 1 + g.size(),
            Formula::And(cs) | Formula::Or(cs) => 1 + cs.iter().map(Formula::size).sum::<usize>(),
        }
    }

    pub fn mentions(&self, v: Var) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Atom(a) => a.mentions(v),
            Formula::Not(g) => g.mentions(v),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().any(|c| c.mentions(v)),
        }
    }

    pub fn max_var(&self) -> Option<Var> {
        match self {
            Formula::True | Formula::False => None,
            Formula::Atom(a) => a.term().max_var(),
            Formula::Not(g) => g.max_var(),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().filter_map(Formula::max_var).max(),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.for_each_atom(&mut |a| out.extend(a.term().coeffs().iter().map(|&(v, _)| v)));
        out
    }

    pub fn for_each_atom(&self, f: &mut impl FnMut(&Atom)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => f(a),
            Formula::Not(g) => g.for_each_atom(f),
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.for_each_atom(f)),
        }
    }

    /// Rebuilds the formula with every atom replaced by `f(atom)`.
    pub fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Result<Formula>) -> Result<Formula> {
        Ok(match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => f(a)?,
            Formula::Not(g) => Formula::not(g.map_atoms(f)?),
            Formula::And(cs) => {
                let mut out = Vec::with_capacity(cs.len());
                for c in cs {
                    let m = c.map_atoms(f)?;
                    if m.is_false() {
                        return Ok(Formula::False);
                    }
                    out.push(m);
                }
                Formula::and(out)
            }
            Formula::Or(cs) => {
                let mut out = Vec::with_capacity(cs.len());
                for c in cs {
                    let m = c.map_atoms(f)?;
                    if m.is_true() {
                        return Ok(Formula::True);
                    }
                    out.push(m);
                }
                Formula::or(out)
            }
        })
    }

    pub fn substitute(&self, v: Var, replacement: &LinearTerm) -> Result<Formula> {
        self.map_atoms(&mut |a| {
            if a.mentions(v) {
                Ok(Formula::atom(
                    a.with_term(a.term().substitute(v, replacement)?),
                ))
            } else {
                Ok(Formula::Atom(a.clone()))
            }
        })
    }

    pub fn rename_vars(&self, f: impl Fn(Var) -> Var) -> Result<Formula> {
        self.map_atoms(&mut |a| Ok(Formula::atom(a.with_term(a.term().rename(&f)?))))
    }

    /// Simplifies under the assumption that every variable is a natural number.
    pub fn assume_natural(&self) -> Formula {
        self.map_atoms(&mut |a| {
            Ok(match (a.assume_natural(), a) {
                (Some(b), _) => Formula::constant(b),
                // A same-signed term with zero constant cannot cross zero,
                // so `t = 0` is a bound; this lets negations fold to atoms.
                (None, Atom::Eq(t)) if t.constant == 0 && t.coeffs.iter().all(|&(_, c)| c > 0) => {
                    Formula::Atom(Atom::Le(t.clone()))
                }
                (None, Atom::Eq(t)) if t.constant == 0 && t.coeffs.iter().all(|&(_, c)| c < 0) => {
                    Formula::Atom(Atom::Le(t.neg().expect("negating a normalized term")))
                }
                (None, _) => Formula::Atom(a.clone()),
            })
        })
        .expect("constant folding cannot fail")
    }

    /// Truth of the formula at a natural-valued point (`point[i]` is `v(i+1)`).
    pub fn eval(&self, point: &[u64]) -> Result<bool> {
        if let Some(m) = self.max_var() {
            if point.len() < m as usize {
                return Err(Error::DimensionMismatch {
                    expected: m as usize,
                    found: point.len(),
                });
            }
        }
        self.eval_unchecked(point)
    }

    fn eval_unchecked(&self, point: &[u64]) -> Result<bool> {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => a.eval(point)?,
            Formula::Not(g) => !g.eval_unchecked(point)?,
            Formula::And(cs) => {
                for c in cs {
                    if !c.eval_unchecked(point)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(cs) => {
                for c in cs {
                    if c.eval_unchecked(point)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    /// Negation normal form: `Not` only wraps `Eq` and `Dvd` atoms.
    pub fn nnf(&self) -> Formula {
        fn go(f: &Formula, negate: bool) -> Formula {
            match (f, negate) {
                (Formula::True, n) | (Formula::False, n) if !n => f.clone(),
                (Formula::True, _) => Formula::False,
                (Formula::False, _) => Formula::True,
                (Formula::Atom(_), false) => f.clone(),
                (Formula::Atom(_), true) => Formula::not(f.clone()),
                (Formula::Not(g), n) => go(g, !n),
                (Formula::And(cs), false) => Formula::and(cs.iter().map(|c| go(c, false))),
                (Formula::And(cs), true) => Formula::or(cs.iter().map(|c| go(c, true))),
                (Formula::Or(cs), false) => Formula::or(cs.iter().map(|c| go(c, false))),
                (Formula::Or(cs), true) => Formula::and(cs.iter().map(|c| go(c, true))),
            }
        }
        go(self, false)
    }

    pub(crate) fn check_size(&self, limits: &crate::Limits) -> Result<()> {
        let n = self.size();
        if n > limits.max_formula_nodes {
            return Err(Error::ResourceLimit(format!(
                "formula has {n} nodes, cap is {}",
                limits.max_formula_nodes
            )));
        }
        Ok(())
    }
}
