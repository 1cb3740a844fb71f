//! Brute-force semantics used to cross-check the compiler.
//!
//! Nothing here shares code paths with compilation: formulas are evaluated
//! by direct multiplication with quantifiers bounded to `1..=B`, and
//! skolemian membership is checked by enumerating slot-to-prime assignments.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::frontend::{compile, parse, SkolemFormula, SkolemTerm};
use crate::membership::{member_semi, valuation_profile};
use crate::skolemian::SkolemianSet;
use crate::Limits;

/// Quantifier range `1..=bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundedModel {
    bound: u64,
}

impl BoundedModel {
    pub fn new(bound: u64) -> Result<Self> {
        if bound == 0 {
            return Err(Error::Domain("oracle bound must be at least 1".into()));
        }
        Ok(BoundedModel { bound })
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Tarskian evaluation with bounded quantifiers.
    pub fn eval(&self, f: &SkolemFormula, assignment: &BTreeMap<String, u64>) -> Result<bool> {
        let mut env: Vec<(String, u64)> = assignment.iter().map(|(k, &v)| (k.clone(), v)).collect();
        for v in f.free_vars() {
            match assignment.get(&v) {
                None => return Err(Error::Domain(format!("`{v}` is unassigned"))),
                Some(0) => return Err(Error::Domain(format!("`{v}` is assigned 0"))),
                Some(_) => {}
            }
        }
        self.go(f, &mut env)
    }

    fn term(t: &SkolemTerm, env: &[(String, u64)]) -> Result<u128> {
        t.factors().iter().try_fold(1u128, |acc, name| {
            let v = env
                .iter()
                .rev()
                .find(|(n, _)| n == name)
                .map(|&(_, v)| v)
                .ok_or_else(|| Error::Domain(format!("`{name}` is unassigned")))?;
            acc.checked_mul(v as u128).ok_or_else(|| {
                Error::ResourceLimit("product exceeds 128-bit range in bounded evaluation".into())
            })
        })
    }

    fn go(&self, f: &SkolemFormula, env: &mut Vec<(String, u64)>) -> Result<bool> {
        Ok(match f {
            SkolemFormula::Atom(l, r) => Self::term(l, env)? == Self::term(r, env)?,
            SkolemFormula::Not(g) => !self.go(g, env)?,
            SkolemFormula::And(cs) => {
                for c in cs {
                    if !self.go(c, env)? {
                        return Ok(false);
                    }
                }
                true
            }
            SkolemFormula::Or(cs) => {
                for c in cs {
                    if self.go(c, env)? {
                        return Ok(true);
                    }
                }
                false
            }
            SkolemFormula::Implies(a, b) => !self.go(a, env)? || self.go(b, env)?,
            SkolemFormula::Iff(a, b) => self.go(a, env)? == self.go(b, env)?,
            SkolemFormula::Exists(x, g) | SkolemFormula::Forall(x, g) => {
                let want = matches!(f, SkolemFormula::Exists(..));
                let mut result = !want;
                for v in 1..=self.bound {
                    env.push((x.clone(), v));
                    let r = self.go(g, env);
                    env.pop();
                    if r? == want {
                        result = want;
                        break;
                    }
                }
                result
            }
        })
    }
}

/// `bounded_eval(f, assignment, B)`: evaluation with quantifiers over `1..=B`.
pub fn bounded_eval(
    f: &SkolemFormula,
    assignment: &BTreeMap<String, u64>,
    bound: u64,
) -> Result<bool> {
    BoundedModel::new(bound)?.eval(f, assignment)
}

/// Largest instance the set-builder oracle accepts.
pub const ORACLE_MAX_PRIMES: usize = 8;
pub const ORACLE_MAX_SLOTS: usize = 4;

/// Membership straight from the definition: some injective assignment of
/// slots to primes of `w` puts every slot's valuation in its set and every
/// unassigned prime's valuation in the rest set.
pub fn skolemian_oracle_member(s: &SkolemianSet, w: &[u64]) -> Result<bool> {
    if w.len() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: w.len(),
        });
    }
    let profile = valuation_profile(w)?;
    let primes = profile.entries();
    let slots = s.exceptional();
    if primes.len() > ORACLE_MAX_PRIMES || slots.len() > ORACLE_MAX_SLOTS {
        return Err(Error::InstanceTooLarge(format!(
            "{} primes and {} slots (limits {ORACLE_MAX_PRIMES} and {ORACLE_MAX_SLOTS})",
            primes.len(),
            slots.len()
        )));
    }
    if s.dim() == 0 {
        return s.decide_dim_zero();
    }

    fn assign(
        s: &SkolemianSet,
        primes: &[(u64, Vec<u64>)],
        slot: usize,
        taken: &mut Vec<bool>,
    ) -> Result<bool> {
        if slot == s.exceptional().len() {
            for (i, (_, exps)) in primes.iter().enumerate() {
                if !taken[i] && !s.rest().member(exps)? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        for i in 0..primes.len() {
            if taken[i] || !s.exceptional()[slot].member(&primes[i].1)? {
                continue;
            }
            taken[i] = true;
            let ok = assign(s, primes, slot + 1, taken)?;
            taken[i] = false;
            if ok {
                return Ok(true);
            }
        }
        Ok(false)
    }

    assign(s, primes, 0, &mut vec![false; primes.len()])
}

/// Sentences whose bounded truth value is conclusive at the given bound.
///
/// Each entry is `(name, text, expected, bound)`. Existential witnesses and
/// universal counterexamples are all at most 2, and the universal sentences
/// are identities of multiplication, so any bound agrees with the true value.
pub const SENTENCES: &[(&str, &str, bool, u64)] = &[
    (
        "identity element",
        "exists x . forall y . x * y = y",
        true,
        64,
    ),
    ("commutativity", "forall x y . x * y = y * x", true, 64),
    (
        "every number factors",
        "forall x . exists y z . x = y * z",
        true,
        32,
    ),
    (
        "associativity",
        "forall x y z a b c . (x * y = a & a * z = b & y * z = c) -> x * c = b",
        true,
        4,
    ),
    (
        "every number is a square",
        "forall x . exists y . y * y = x",
        false,
        64,
    ),
    (
        "idempotent non-identity",
        "exists x . (x * x = x & exists y . !(x * y = y))",
        false,
        64,
    ),
];

/// Predicates checked pointwise; all quantified witnesses are bounded by the
/// largest argument, so a bound of `max(args) + 1` is conclusive.
pub const PREDICATES: &[(&str, &str)] = &[
    ("divides", "exists z . x * z = y"),
    (
        "prime",
        "!(forall y . x * y = y) & forall d . ((exists z . d * z = x) -> ((forall y . d * y = y) | d = x))",
    ),
    ("square", "exists y . y * y = x"),
    ("squarefree", "forall d . (exists z . d * d * z = x) -> forall u . d * u = u"),
    (
        "coprime",
        "forall d . ((exists a . d * a = x) & (exists b . d * b = y)) -> forall u . d * u = u",
    ),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseReport {
    pub name: String,
    pub checks: usize,
    pub failures: Vec<String>,
    pub millis: u128,
}

impl CaseReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every curated sentence and predicate against the bounded oracle.
/// Predicates are probed on all argument tuples in `1..=probe_max`.
pub fn run_battery(limits: &Limits, oracle_bound: u64, probe_max: u64) -> Vec<CaseReport> {
    let mut out = Vec::new();
    for &(name, text, expected, bound) in SENTENCES {
        let start = Instant::now();
        let mut failures = Vec::new();
        let f = parse(text).expect("curated sentence parses");
        let bound = bound.min(oracle_bound.max(1));
        match crate::frontend::decide(&f, limits) {
            Ok(got) => {
                if got != expected {
                    failures.push(format!("decide returned {got}, expected {expected}"));
                }
                match bounded_eval(&f, &BTreeMap::new(), bound) {
                    Ok(b) if b != expected => {
                        failures.push(format!("bounded oracle (B = {bound}) returned {b}"))
                    }
                    Err(e) => failures.push(format!("oracle error: {e}")),
                    _ => {}
                }
            }
            Err(e) => failures.push(format!("decide failed: {e}")),
        }
        out.push(CaseReport {
            name: format!("sentence: {name}"),
            checks: 1,
            failures,
            millis: start.elapsed().as_millis(),
        });
    }

    for &(name, text) in PREDICATES {
        let start = Instant::now();
        let mut failures = Vec::new();
        let f = parse(text).expect("curated predicate parses");
        let order = f.free_vars();
        let mut checks = 0;
        match compile(&f, &order, limits) {
            Ok(set) => {
                let mut tuple = vec![1u64; order.len()];
                'grid: loop {
                    let assignment: BTreeMap<String, u64> =
                        order.iter().cloned().zip(tuple.iter().copied()).collect();
                    let bound = tuple.iter().copied().max().unwrap_or(1) + 1;
                    checks += 1;
                    let got = member_semi(&set, &tuple);
                    let want = bounded_eval(&f, &assignment, bound);
                    match (got, want) {
                        (Ok(g), Ok(w)) if g == w => {}
                        (g, w) => failures.push(format!("{tuple:?}: compiled {g:?}, oracle {w:?}")),
                    }
                    for x in tuple.iter_mut() {
                        *x += 1;
                        if *x <= probe_max {
                            continue 'grid;
                        }
                        *x = 1;
                    }
                    break;
                }
            }
            Err(e) => failures.push(format!("compile failed: {e}")),
        }
        out.push(CaseReport {
            name: format!("predicate: {name}"),
            checks,
            failures,
            millis: start.elapsed().as_millis(),
        });
    }
    out
}
