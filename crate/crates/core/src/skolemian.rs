//! Skolemian sets `Def(α₁, …, αₙ; α)` and finite unions of them.
//!
//! `w ∈ Def(α₁, …, αₙ; α)` iff there are pairwise distinct primes
//! `p₁, …, pₙ` with `v_{pᵢ}(w) ∈ αᵢ`, and `v_q(w) ∈ α` for every other prime
//! `q` dividing some component of `w`. The representation invariant is
//! `0 ∈ α` and `0 ∉ αᵢ` (waived at dimension 0).
//!
//! The closure constructions below (intersection, complement, projection)
//! are exact. Disjuncts with an empty exceptional slot denote `∅` and are
//! dropped; exceptional slots are kept sorted and disjunct lists sorted and
//! deduplicated, so every result is deterministic.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::presburger::Formula;
use crate::semilinear::SemilinearSet;
use crate::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SkolemianSet {
    dim: usize,
    exceptional: Vec<SemilinearSet>,
    rest: SemilinearSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SemiskolemianSet {
    dim: usize,
    disjuncts: Vec<SkolemianSet>,
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn check_count(what: &str, count: usize, limits: &Limits) -> Result<()> {
    if count > limits.max_disjuncts {
        return Err(Error::ResourceLimit(format!(
            "{what}: {count} exceeds the cap of {}",
            limits.max_disjuncts
        )));
    }
    Ok(())
}

/// All subsets of `0..n` as sorted index lists, smallest first.
fn subsets(n: usize, limits: &Limits) -> Result<Vec<Vec<usize>>> {
    if n >= usize::BITS as usize - 1 || (1usize << n) > limits.max_disjuncts {
        return Err(Error::ResourceLimit(format!(
            "enumerating the 2^{n} subsets of exceptional slots exceeds the cap of {}",
            limits.max_disjuncts
        )));
    }
    let mut out: Vec<Vec<usize>> = (0..1usize << n)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    out.sort_by_key(|s: &Vec<usize>| s.len());
    Ok(out)
}

impl SkolemianSet {
    /// Validated `Def(exceptional; rest)`.
    pub fn new(exceptional: Vec<SemilinearSet>, rest: SemilinearSet) -> Result<Self> {
        let dim = rest.dim();
        for (i, a) in exceptional.iter().enumerate() {
            check_dim(dim, a.dim())?;
            if dim > 0 && a.contains_zero() {
                return Err(Error::InvariantViolation(format!(
                    "exceptional set {} contains the zero vector: {a}",
                    i + 1
                )));
            }
        }
        if dim > 0 && !rest.contains_zero() {
            return Err(Error::InvariantViolation(format!(
                "rest set does not contain the zero vector: {rest}"
            )));
        }
        Ok(Self::assemble(dim, exceptional, rest))
    }

    fn assemble(dim: usize, mut exceptional: Vec<SemilinearSet>, rest: SemilinearSet) -> Self {
        exceptional.sort();
        SkolemianSet {
            dim,
            exceptional,
            rest,
        }
    }

    /// `Def(; ℕ^dim)`, the set of all tuples.
    pub fn full(dim: usize) -> Self {
        Self::assemble(dim, Vec::new(), SemilinearSet::full(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exceptional(&self) -> &[SemilinearSet] {
        &self.exceptional
    }

    pub fn rest(&self) -> &SemilinearSet {
        &self.rest
    }

    /// `None` when some exceptional slot is empty (the disjunct denotes `∅`).
    fn pruned(
        dim: usize,
        exceptional: Vec<SemilinearSet>,
        rest: SemilinearSet,
        limits: &Limits,
    ) -> Result<Option<Self>> {
        for slot in &exceptional {
            slot.check_size(limits)?;
            if slot.is_empty(limits)? {
                return Ok(None);
            }
        }
        rest.check_size(limits)?;
        Ok(Some(Self::assemble(dim, exceptional, rest)))
    }

    /// Truth of a dimension-0 set: every exceptional slot must be `TOP`.
    pub fn decide_dim_zero(&self) -> Result<bool> {
        check_dim(0, self.dim)?;
        Ok(self
            .exceptional
            .iter()
            .all(SemilinearSet::is_full_syntactic))
    }

    /// `self ∩ other` as a union over all correct pairings of slots.
    pub fn intersect(&self, other: &SkolemianSet, limits: &Limits) -> Result<SemiskolemianSet> {
        check_dim(self.dim, other.dim)?;
        let dim = self.dim;
        if dim == 0 {
            let truth = self.decide_dim_zero()? && other.decide_dim_zero()?;
            return Ok(SemiskolemianSet::constant(truth));
        }
        let (n, m) = (self.exceptional.len(), other.exceptional.len());
        let rest = self.rest.intersect(&other.rest)?;

        // candidate slot sets; None marks an empty one
        let nonempty = |s: SemilinearSet| -> Result<Option<SemilinearSet>> {
            Ok(if s.is_empty(limits)? { None } else { Some(s) })
        };
        let mut paired = vec![vec![None; m]; n];
        for (i, a) in self.exceptional.iter().enumerate() {
            for (j, b) in other.exceptional.iter().enumerate() {
                paired[i][j] = nonempty(a.intersect(b)?)?;
            }
        }
        let left_alone = self
            .exceptional
            .iter()
            .map(|a| nonempty(a.intersect(&other.rest)?))
            .collect::<Result<Vec<_>>>()?;
        let right_alone = other
            .exceptional
            .iter()
            .map(|b| nonempty(self.rest.intersect(b)?))
            .collect::<Result<Vec<_>>>()?;

        struct Search<'a> {
            paired: &'a [Vec<Option<SemilinearSet>>],
            left_alone: &'a [Option<SemilinearSet>],
            right_alone: &'a [Option<SemilinearSet>],
            used: Vec<bool>,
            slots: Vec<SemilinearSet>,
            out: Vec<Vec<SemilinearSet>>,
            cap: usize,
        }

        impl Search<'_> {
            fn go(&mut self, i: usize) -> bool {
                if i == self.paired.len() {
                    let mut slots = self.slots.clone();
                    for (j, used) in self.used.iter().enumerate() {
                        if !used {
                            match &self.right_alone[j] {
                                Some(s) => slots.push(s.clone()),
                                None => return true,
                            }
                        }
                    }
                    self.out.push(slots);
                    return self.out.len() <= self.cap;
                }
                if let Some(s) = &self.left_alone[i] {
                    self.slots.push(s.clone());
                    let ok = self.go(i + 1);
                    self.slots.pop();
                    if !ok {
                        return false;
                    }
                }
                for j in 0..self.used.len() {
                    if self.used[j] {
                        continue;
                    }
                    if let Some(s) = &self.paired[i][j] {
                        self.used[j] = true;
                        self.slots.push(s.clone());
                        let ok = self.go(i + 1);
                        self.slots.pop();
                        self.used[j] = false;
                        if !ok {
                            return false;
                        }
                    }
                }
                true
            }
        }

        let mut search = Search {
            paired: &paired,
            left_alone: &left_alone,
            right_alone: &right_alone,
            used: vec![false; m],
            slots: Vec::new(),
            out: Vec::new(),
            cap: limits.max_disjuncts,
        };
        if !search.go(0) {
            return Err(Error::ResourceLimit(format!(
                "intersection needs more than {} correct pairings",
                limits.max_disjuncts
            )));
        }
        let disjuncts = search
            .out
            .into_iter()
            .map(|slots| {
                rest.check_size(limits)?;
                Ok(Self::assemble(dim, slots, rest.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        SemiskolemianSet::normalized(dim, disjuncts, limits)
    }

    /// Complement, as the union of the tuples failing either matching condition.
    pub fn complement(&self, limits: &Limits) -> Result<SemiskolemianSet> {
        let dim = self.dim;
        if dim == 0 {
            return Ok(SemiskolemianSet::constant(!self.decide_dim_zero()?));
        }
        let n = self.exceptional.len();
        let full = SemilinearSet::full(dim);
        let outside_rest = self.rest.complement();
        let index_sets = subsets(n, limits)?;
        let mut out = Vec::new();

        // more than n primes with exponents outside α
        if let Some(d) = Self::pruned(dim, vec![outside_rest.clone(); n + 1], full.clone(), limits)?
        {
            out.push(d);
        }

        // Hall violation on the primes outside α: n' such primes avoid
        // n - n' + 1 of the exceptional sets
        for picked in &index_sets {
            if picked.is_empty() {
                continue;
            }
            let count = n + 1 - picked.len();
            if count == 0 {
                continue;
            }
            let missed: Vec<SemilinearSet> = picked
                .iter()
                .map(|&i| self.exceptional[i].complement())
                .collect();
            let avoid =
                SemilinearSet::intersect_all(dim, std::iter::once(&outside_rest).chain(&missed))?;
            if let Some(d) = Self::pruned(dim, vec![avoid; count], full.clone(), limits)? {
                out.push(d);
            }
        }

        // Hall violation on the exceptional slots: fewer than |I| primes
        // land in the union of the slots in I
        for picked in &index_sets {
            if picked.is_empty() {
                continue;
            }
            let hit = SemilinearSet::union_all(dim, picked.iter().map(|&i| &self.exceptional[i]))?;
            let miss = hit.complement();
            for count in 0..picked.len() {
                if let Some(d) = Self::pruned(dim, vec![hit.clone(); count], miss.clone(), limits)?
                {
                    out.push(d);
                }
            }
            check_count("complement disjuncts", out.len(), limits)?;
        }
        SemiskolemianSet::normalized(dim, out, limits)
    }

    /// Projects away `coord` (1-based) from every component, then splits
    /// slots that came to contain the zero vector.
    pub fn project_away(&self, coord: usize, limits: &Limits) -> Result<SemiskolemianSet> {
        if coord == 0 || coord > self.dim {
            return Err(Error::IndexOutOfRange {
                index: coord,
                limit: self.dim,
            });
        }
        let dim = self.dim - 1;
        let rest = self.rest.project_away(coord, limits)?;
        let mut partial: Vec<Vec<SemilinearSet>> = vec![Vec::new()];
        for slot in &self.exceptional {
            let projected = slot.project_away(coord, limits)?;
            if projected.is_empty(limits)? {
                return SemiskolemianSet::normalized(dim, Vec::new(), limits);
            }
            if dim == 0 || !projected.contains_zero() {
                partial.iter_mut().for_each(|p| p.push(projected.clone()));
                continue;
            }
            // a slot valued 0 can be served by a fresh prime, so drop it;
            // otherwise the slot's prime divides the tuple
            let nonzero = projected.remove_zero();
            let keep_nonzero = !nonzero.is_empty(limits)?;
            let mut next = Vec::with_capacity(partial.len() * 2);
            for p in partial {
                if keep_nonzero {
                    let mut with = p.clone();
                    with.push(nonzero.clone());
                    next.push(with);
                }
                next.push(p);
            }
            check_count("projection disjuncts", next.len(), limits)?;
            partial = next;
        }
        let disjuncts = partial
            .into_iter()
            .map(|slots| Self::assemble(dim, slots, rest.clone()))
            .collect();
        SemiskolemianSet::normalized(dim, disjuncts, limits)
    }
}

impl SemilinearSet {
    fn check_size(&self, limits: &Limits) -> Result<()> {
        self.formula().check_size(limits)
    }
}

impl SemiskolemianSet {
    pub fn new(dim: usize, disjuncts: Vec<SkolemianSet>) -> Result<Self> {
        for d in &disjuncts {
            check_dim(dim, d.dim)?;
        }
        Ok(SemiskolemianSet { dim, disjuncts })
    }

    pub fn empty(dim: usize) -> Self {
        SemiskolemianSet {
            dim,
            disjuncts: Vec::new(),
        }
    }

    pub fn full(dim: usize) -> Self {
        SemiskolemianSet {
            dim,
            disjuncts: vec![SkolemianSet::full(dim)],
        }
    }

    fn constant(truth: bool) -> Self {
        if truth {
            Self::full(0)
        } else {
            Self::empty(0)
        }
    }

    /// Sorts, deduplicates, collapses when some disjunct is everything, and
    /// enforces the disjunct cap.
    fn normalized(dim: usize, mut disjuncts: Vec<SkolemianSet>, limits: &Limits) -> Result<Self> {
        if dim == 0 {
            let truth = disjuncts
                .iter()
                .map(SkolemianSet::decide_dim_zero)
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .any(|b| b);
            return Ok(Self::constant(truth));
        }
        let everything = SkolemianSet::full(dim);
        if disjuncts.contains(&everything) {
            return Ok(Self::full(dim));
        }
        disjuncts.sort();
        disjuncts.dedup();
        check_count("disjuncts", disjuncts.len(), limits)?;
        Ok(SemiskolemianSet { dim, disjuncts })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn disjuncts(&self) -> &[SkolemianSet] {
        &self.disjuncts
    }

    pub fn is_empty_syntactic(&self) -> bool {
        self.disjuncts.is_empty()
    }

    /// Truth of a dimension-0 set.
    pub fn decide_dim_zero(&self) -> Result<bool> {
        check_dim(0, self.dim)?;
        for d in &self.disjuncts {
            if d.decide_dim_zero()? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn union(&self, other: &SemiskolemianSet, limits: &Limits) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let all = self
            .disjuncts
            .iter()
            .chain(&other.disjuncts)
            .cloned()
            .collect();
        Self::normalized(self.dim, all, limits)
    }

    pub fn intersect(&self, other: &SemiskolemianSet, limits: &Limits) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        if self.dim == 0 {
            return Ok(Self::constant(
                self.decide_dim_zero()? && other.decide_dim_zero()?,
            ));
        }
        let mut out = Vec::new();
        for a in &self.disjuncts {
            for b in &other.disjuncts {
                out.extend(a.intersect(b, limits)?.disjuncts);
                check_count("intersection disjuncts", out.len(), limits)?;
            }
        }
        Self::normalized(self.dim, out, limits)
    }

    /// De Morgan over the disjuncts; the complement of `∅` is everything.
    pub fn complement(&self, limits: &Limits) -> Result<Self> {
        if self.dim == 0 {
            return Ok(Self::constant(!self.decide_dim_zero()?));
        }
        let mut acc = Self::full(self.dim);
        for d in &self.disjuncts {
            let c = d.complement(limits)?;
            acc = if acc == Self::full(self.dim) {
                c
            } else {
                acc.intersect(&c, limits)?
            };
            if acc.is_empty_syntactic() {
                break;
            }
        }
        Ok(acc)
    }

    pub fn project_away(&self, coord: usize, limits: &Limits) -> Result<Self> {
        if coord == 0 || coord > self.dim {
            return Err(Error::IndexOutOfRange {
                index: coord,
                limit: self.dim,
            });
        }
        let mut out = Vec::new();
        for d in &self.disjuncts {
            out.extend(d.project_away(coord, limits)?.disjuncts);
            check_count("projection disjuncts", out.len(), limits)?;
        }
        Self::normalized(self.dim - 1, out, limits)
    }

    /// JSON form `{"dim":d,"disjuncts":[{"exceptional":[..],"rest":".."}]}`.
    pub fn to_json(&self) -> String {
        let doc = JsonSemi {
            dim: self.dim,
            disjuncts: self
                .disjuncts
                .iter()
                .map(|d| JsonDef {
                    exceptional: d.exceptional.iter().map(|s| s.formula().clone()).collect(),
                    rest: d.rest.formula().clone(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("plain data serializes")
    }

    /// Reads the JSON form, re-validating every disjunct.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: JsonSemi = serde_json::from_str(text).map_err(|e| Error::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut disjuncts = Vec::with_capacity(doc.disjuncts.len());
        for d in doc.disjuncts {
            let exceptional = d
                .exceptional
                .into_iter()
                .map(|f| SemilinearSet::new(doc.dim, f))
                .collect::<Result<Vec<_>>>()?;
            let rest = SemilinearSet::new(doc.dim, d.rest)?;
            disjuncts.push(SkolemianSet::new(exceptional, rest)?);
        }
        SemiskolemianSet::new(doc.dim, disjuncts)
    }
}

#[derive(Serialize, Deserialize)]
struct JsonDef {
    exceptional: Vec<Formula>,
    rest: Formula,
}

#[derive(Serialize, Deserialize)]
struct JsonSemi {
    dim: usize,
    disjuncts: Vec<JsonDef>,
}

impl fmt::Display for SkolemianSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Def(")?;
        for (i, a) in self.exceptional.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        if !self.exceptional.is_empty() {
            f.write_str(" ; ")?;
        }
        write!(f, "{})", self.rest)
    }
}

impl fmt::Display for SemiskolemianSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.disjuncts.is_empty() {
            return f.write_str("∅");
        }
        for (i, d) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}
