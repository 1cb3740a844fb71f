//! Existential quantifier elimination over the naturals.
//!
//! `∃x ∈ ℕ. f` is rewritten as the integer problem `∃x ∈ ℤ. x ≥ 0 ∧ f` and
//! solved with Cooper's method using lower bounds only. Because the guard
//! `-x <= 0` is a top-level conjunct, the "minus infinity" disjuncts are all
//! false and are never produced.

use std::collections::BTreeSet;

use super::{lcm, Atom, Formula, LinearTerm, Var};
use crate::error::{Error, Result};
use crate::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// Maximum product of disjunction widths that is distributed eagerly.
const DISTRIBUTE_LIMIT: usize = 32;

/// Quantifier-free `g` equivalent (over natural assignments of the other
/// variables) to `∃ var ∈ ℕ. f`. `g` never mentions `var`.
pub fn eliminate_exists(f: &Formula, var: Var, limits: &Limits) -> Result<Formula> {
    let g = exists_nat(&f.nnf(), var, limits)?.assume_natural();
    g.check_size(limits)?;
    Ok(g)
}

/// Eliminates a block of existentially quantified variables, picking the
/// cheapest variable first.
pub fn eliminate_exists_many(f: &Formula, vars: &[Var], limits: &Limits) -> Result<Formula> {
    let mut pending: BTreeSet<Var> = vars.iter().copied().collect();
    let mut g = f.clone();
    while !pending.is_empty() {
        pending.retain(|&v| g.mentions(v));
        let Some(&v) = pending.iter().min_by_key(|&&v| elimination_cost(&g, v)) else {
            break;
        };
        pending.remove(&v);
        g = eliminate_exists(&g, v, limits)?;
        if g.is_true() || g.is_false() {
            break;
        }
    }
    Ok(g)
}

/// Truth of `Q1 x1 ... Qk xk. matrix` with every quantifier ranging over ℕ.
pub fn decide_sentence(
    prefix: &[(Quantifier, Var)],
    matrix: &Formula,
    limits: &Limits,
) -> Result<bool> {
    let bound: BTreeSet<Var> = prefix.iter().map(|&(_, v)| v).collect();
    if let Some(free) = matrix.vars().into_iter().find(|v| !bound.contains(v)) {
        return Err(Error::InvariantViolation(format!(
            "variable v{free} is not bound by the quantifier prefix"
        )));
    }
    let mut f = matrix.clone();
    let mut rest = prefix;
    while let Some(&(q, _)) = rest.last() {
        // peel the innermost block of identical quantifiers
        let start = rest.iter().rposition(|&(p, _)| p != q).map_or(0, |i| i + 1);
        let block: Vec<Var> = rest[start..].iter().map(|&(_, v)| v).collect();
        f = match q {
            Quantifier::Exists => eliminate_exists_many(&f, &block, limits)?,
            Quantifier::Forall => {
                Formula::not(eliminate_exists_many(&Formula::not(f), &block, limits)?)
            }
        };
        rest = &rest[..start];
    }
    f.eval(&[])
}

fn elimination_cost(f: &Formula, v: Var) -> (usize, usize) {
    let mut unit_eq = false;
    let mut occurrences = 0;
    f.for_each_atom(&mut |a| {
        let c = a.term().coeff(v);
        if c != 0 {
            occurrences += 1;
            if matches!(a, Atom::Eq(_)) && c.abs() == 1 {
                unit_eq = true;
            }
        }
    });
    (usize::from(!unit_eq), occurrences)
}

/// `f` must be in negation normal form.
fn exists_nat(f: &Formula, x: Var, limits: &Limits) -> Result<Formula> {
    if !f.mentions(x) {
        return Ok(f.clone());
    }
    match f {
        Formula::Or(cs) => {
            let mut out = Vec::with_capacity(cs.len());
            for c in cs {
                let e = exists_nat(c, x, limits)?;
                if e.is_true() {
                    return Ok(Formula::True);
                }
                out.push(e);
            }
            let g = Formula::or(out);
            g.check_size(limits)?;
            Ok(g)
        }
        _ => exists_conjunction(f, x, limits),
    }
}

fn exists_conjunction(f: &Formula, x: Var, limits: &Limits) -> Result<Formula> {
    let conjuncts: Vec<&Formula> = match f {
        Formula::And(cs) => cs.iter().collect(),
        other => vec![other],
    };
    let (bound, free): (Vec<&Formula>, Vec<&Formula>) =
        conjuncts.into_iter().partition(|c| c.mentions(x));

    let inner = if let Some(eq) = pick_equality(&bound, x) {
        substitute_equality(&bound, eq, x)?
    } else if let Some(split) = distribution_candidate(&bound) {
        let Formula::Or(alternatives) = bound[split] else {
            unreachable!()
        };
        let others: Vec<Formula> = bound
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != split)
            .map(|(_, c)| (*c).clone())
            .collect();
        let mut out = Vec::with_capacity(alternatives.len());
        for alt in alternatives {
            let branch = Formula::and(others.iter().cloned().chain([alt.clone()]));
            let e = exists_nat(&branch, x, limits)?;
            if e.is_true() {
                out = vec![Formula::True];
                break;
            }
            out.push(e);
        }
        Formula::or(out)
    } else {
        cooper(&Formula::and(bound.into_iter().cloned()), x, limits)?
    };
    let g = Formula::and(free.into_iter().cloned().chain([inner]));
    g.check_size(limits)?;
    Ok(g)
}

fn pick_equality<'a>(bound: &[&'a Formula], x: Var) -> Option<&'a LinearTerm> {
    bound
        .iter()
        .filter_map(|c| match c {
            Formula::Atom(Atom::Eq(t)) => Some(t),
            _ => None,
        })
        .min_by_key(|t| t.coeff(x).abs())
}

fn distribution_candidate(bound: &[&Formula]) -> Option<usize> {
    let mut product = 1usize;
    let mut first = None;
    for (i, c) in bound.iter().enumerate() {
        if let Formula::Or(cs) = c {
            product = product.saturating_mul(cs.len());
            first.get_or_insert(i);
        }
    }
    if bound.len() > 1 && product <= DISTRIBUTE_LIMIT {
        first
    } else {
        None
    }
}

/// Uses `a·x + t = 0` (a > 0 after sign fix) to remove `x`: every atom
/// `c·x + s` becomes `a·s - c·t` (moduli scaled by `a`), plus `a | t` for
/// integrality and `t <= 0` for `x >= 0`.
fn substitute_equality(bound: &[&Formula], eq: &LinearTerm, x: Var) -> Result<Formula> {
    let mut a = eq.coeff(x);
    let mut t = eq.without(x);
    if a < 0 {
        a = -a;
        t = t.neg()?;
    }
    let mut parts = Vec::with_capacity(bound.len() + 2);
    for c in bound {
        let g = c.map_atoms(&mut |atom| {
            let coeff = atom.term().coeff(x);
            if coeff == 0 {
                return Ok(Formula::Atom(atom.clone()));
            }
            let s = atom.term().without(x);
            let term = s.scale(a)?.add(&t.scale(-coeff)?)?;
            Ok(match atom {
                Atom::Eq(_) => Formula::eq(term),
                Atom::Le(_) => Formula::le(term),
                Atom::Dvd(m, _) => {
                    Formula::dvd(m.checked_mul(a).ok_or_else(Error::overflow)?, term)
                }
            })
        })?;
        if g.is_false() {
            return Ok(Formula::False);
        }
        parts.push(g);
    }
    parts.push(Formula::dvd(a, t.clone()));
    parts.push(Formula::le(t));
    Ok(Formula::and(parts))
}

fn cooper(f: &Formula, x: Var, limits: &Limits) -> Result<Formula> {
    // common multiple of the coefficients of x
    let mut scale = 1i128;
    let mut err = None;
    f.for_each_atom(&mut |a| {
        let c = a.term().coeff(x);
        if c != 0 && err.is_none() {
            match lcm(scale, c) {
                Ok(l) => scale = l,
                Err(e) => err = Some(e),
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }

    // rescale so x stands for scale·x with unit coefficients
    let unit = f.map_atoms(&mut |atom| {
        let c = atom.term().coeff(x);
        if c == 0 {
            return Ok(Formula::Atom(atom.clone()));
        }
        let k = scale / c.abs();
        let rest = atom.term().without(x).scale(k)?;
        let term = rest.add(&LinearTerm::var(x).scale(c.signum())?)?;
        Ok(match atom {
            Atom::Eq(_) => Formula::eq(term),
            Atom::Le(_) => Formula::le(term),
            Atom::Dvd(m, _) => Formula::dvd(m.checked_mul(k).ok_or_else(Error::overflow)?, term),
        })
    })?;
    let guard = Formula::le(LinearTerm::var(x).neg()?);
    let body = Formula::and([unit, Formula::dvd(scale, LinearTerm::var(x)), guard]);
    let body = split_equalities(&body, x)?;
    if body.is_false() {
        return Ok(Formula::False);
    }

    let mut lower: BTreeSet<LinearTerm> = BTreeSet::new();
    let mut period = 1i128;
    let mut err = None;
    body.for_each_atom(&mut |a| match a {
        Atom::Le(t) if t.coeff(x) == -1 => {
            lower.insert(t.without(x));
        }
        // The smart constructors may fuse a pair of opposite bounds back
        // into an equality; `x = b` needs candidate b and `x != b` needs b + 1.
        Atom::Eq(t) if t.mentions(x) && err.is_none() => {
            let b = if t.coeff(x) == 1 {
                t.without(x).neg()
            } else {
                Ok(t.without(x))
            };
            match b.and_then(|b| Ok((b.add_constant(1)?, b))) {
                Ok((b1, b)) => {
                    lower.insert(b);
                    lower.insert(b1);
                }
                Err(e) => err = Some(e),
            }
        }
        Atom::Dvd(m, t) if t.mentions(x) && err.is_none() => match lcm(period, *m) {
            Ok(l) => period = l,
            Err(e) => err = Some(e),
        },
        _ => {}
    });
    if let Some(e) = err {
        return Err(e);
    }
    debug_assert!(!lower.is_empty(), "guard provides a lower bound");

    let estimate = (lower.len() as u128)
        .saturating_mul(period as u128)
        .saturating_mul(body.size() as u128);
    if estimate > (limits.max_formula_nodes as u128).saturating_mul(64) {
        return Err(Error::ResourceLimit(format!(
            "elimination of v{x} needs {} bound instances of a {}-node formula",
            lower.len() as u128 * period as u128,
            body.size()
        )));
    }

    let mut out = Vec::new();
    let mut total = 0usize;
    for b in &lower {
        for j in 0..period {
            let g = body.substitute(x, &b.add_constant(j)?)?;
            if g.is_true() {
                return Ok(Formula::True);
            }
            if !g.is_false() {
                total += g.size();
                if total > limits.max_formula_nodes {
                    return Err(Error::ResourceLimit(format!(
                        "elimination of v{x} exceeded {} formula nodes",
                        limits.max_formula_nodes
                    )));
                }
                out.push(g);
            }
        }
    }
    Ok(Formula::or(out))
}

/// Rewrites (negated) equalities on `x` into inequalities so every bound on
/// `x` is visible as an `Le` atom. Input is in NNF with unit coefficients.
fn split_equalities(f: &Formula, x: Var) -> Result<Formula> {
    Ok(match f {
        Formula::Atom(Atom::Eq(t)) if t.mentions(x) => {
            Formula::and([Formula::le(t.clone()), Formula::le(t.neg()?)])
        }
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Atom(Atom::Eq(t)) if t.mentions(x) => Formula::or([
                Formula::le(t.add_constant(1)?),
                Formula::le(t.neg()?.add_constant(1)?),
            ]),
            _ => f.clone(),
        },
        Formula::And(cs) => Formula::and(
            cs.iter()
                .map(|c| split_equalities(c, x))
                .collect::<Result<Vec<_>>>()?,
        ),
        Formula::Or(cs) => Formula::or(
            cs.iter()
                .map(|c| split_equalities(c, x))
                .collect::<Result<Vec<_>>>()?,
        ),
        _ => f.clone(),
    })
}
