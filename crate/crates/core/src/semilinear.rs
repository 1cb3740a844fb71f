//! Semilinear subsets of `ℕ^dim`, carried by a Presburger formula over
//! `v1..v_dim`.
//!
//! Dimension 0 follows the convention `ℕ⁰ = {ε}`: the only sets are
//! `TOP = {ε}` and `BOT = ∅`, and their formulas are always folded to
//! `TRUE`/`FALSE`.

use std::fmt;

use crate::error::{Error, Result};
use crate::presburger::{self, Formula, LinearTerm, Var};
use crate::Limits;

/// Points per emptiness probe before falling back to quantifier elimination.
const PROBE_POINTS: usize = 729;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SemilinearSet {
    dim: usize,
    formula: Formula,
}

impl SemilinearSet {
    /// Wraps `formula` as a subset of `ℕ^dim`.
    pub fn new(dim: usize, formula: Formula) -> Result<Self> {
        if let Some(v) = formula.max_var() {
            if v as usize > dim {
                return Err(Error::IndexOutOfRange {
                    index: v as usize,
                    limit: dim,
                });
            }
        }
        let mut formula = formula.nnf().assume_natural();
        if dim == 0 && !(formula.is_true() || formula.is_false()) {
            formula = Formula::constant(formula.eval(&[])?);
        }
        Ok(SemilinearSet { dim, formula })
    }

    pub fn full(dim: usize) -> Self {
        SemilinearSet {
            dim,
            formula: Formula::True,
        }
    }

    pub fn empty(dim: usize) -> Self {
        SemilinearSet {
            dim,
            formula: Formula::False,
        }
    }

    /// `{v ∈ ℕ^dim : Σ lhsᵢ·vᵢ = Σ rhsᵢ·vᵢ}` with 1-based indices.
    pub fn atom_linear(dim: usize, lhs: &[(usize, u64)], rhs: &[(usize, u64)]) -> Result<Self> {
        let mut parts = Vec::with_capacity(lhs.len() + rhs.len());
        for (side, sign) in [(lhs, 1i128), (rhs, -1i128)] {
            for &(i, k) in side {
                if i == 0 || i > dim {
                    return Err(Error::IndexOutOfRange {
                        index: i,
                        limit: dim,
                    });
                }
                parts.push((i as Var, sign * k as i128));
            }
        }
        let term = LinearTerm::from_parts(parts, 0)?;
        SemilinearSet::new(dim, Formula::eq(term))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    /// Syntactically the whole space.
    pub fn is_full_syntactic(&self) -> bool {
        self.formula.is_true()
    }

    /// Syntactically empty.
    pub fn is_empty_syntactic(&self) -> bool {
        self.formula.is_false()
    }

    fn same_dim(&self, other: &SemilinearSet) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn intersect(&self, other: &SemilinearSet) -> Result<Self> {
        self.same_dim(other)?;
        SemilinearSet::new(
            self.dim,
            Formula::and([self.formula.clone(), other.formula.clone()]),
        )
    }

    pub fn union(&self, other: &SemilinearSet) -> Result<Self> {
        self.same_dim(other)?;
        SemilinearSet::new(
            self.dim,
            Formula::or([self.formula.clone(), other.formula.clone()]),
        )
    }

    pub fn complement(&self) -> Self {
        SemilinearSet {
            dim: self.dim,
            formula: Formula::not(self.formula.clone()).assume_natural(),
        }
    }

    /// Intersection of all `sets`; `full(dim)` when there are none.
    pub fn intersect_all<'a, I>(dim: usize, sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a SemilinearSet>,
    {
        sets.into_iter()
            .try_fold(SemilinearSet::full(dim), |acc, s| acc.intersect(s))
    }

    /// Union of all `sets`; `empty(dim)` when there are none.
    pub fn union_all<'a, I>(dim: usize, sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a SemilinearSet>,
    {
        sets.into_iter()
            .try_fold(SemilinearSet::empty(dim), |acc, s| acc.union(s))
    }

    /// `{π_coord(v) : v ∈ self}`, coordinates above `coord` shift down by one.
    pub fn project_away(&self, coord: usize, limits: &Limits) -> Result<Self> {
        if coord == 0 || coord > self.dim {
            return Err(Error::IndexOutOfRange {
                index: coord,
                limit: self.dim,
            });
        }
        let x = coord as Var;
        let g = presburger::eliminate_exists(&self.formula, x, limits)?;
        let g = g.rename_vars(|v| if v > x { v - 1 } else { v })?;
        SemilinearSet::new(self.dim - 1, g)
    }

    pub fn member(&self, point: &[u64]) -> Result<bool> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: point.len(),
            });
        }
        self.formula.eval(point)
    }

    pub fn contains_zero(&self) -> bool {
        self.formula
            .eval(&vec![0; self.dim])
            .expect("formula variables are within dim")
    }

    /// `self ∖ {0}`.
    pub fn remove_zero(&self) -> Self {
        let zero = Formula::and((1..=self.dim as Var).map(|v| Formula::eq(LinearTerm::var(v))));
        SemilinearSet {
            dim: self.dim,
            formula: Formula::and([self.formula.clone(), Formula::not(zero)]).assume_natural(),
        }
    }

    /// Exact emptiness check.
    pub fn is_empty(&self, limits: &Limits) -> Result<bool> {
        match &self.formula {
            Formula::True => return Ok(false),
            Formula::False => return Ok(true),
            _ => {}
        }
        if self.probe_nonempty()? {
            return Ok(false);
        }
        let vars: Vec<Var> = (1..=self.dim as Var).collect();
        let g = presburger::eliminate_exists_many(&self.formula, &vars, limits)?;
        Ok(!g.eval(&[])?)
    }

    /// Looks for a member among small points.
    fn probe_nonempty(&self) -> Result<bool> {
        let mut point = vec![0u64; self.dim];
        for _ in 0..PROBE_POINTS {
            if self.formula.eval(&point)? {
                return Ok(true);
            }
            // odometer over {0,1,2}^dim
            let mut i = 0;
            loop {
                if i == point.len() {
                    return Ok(false);
                }
                point[i] += 1;
                if point[i] <= 2 {
                    break;
                }
                point[i] = 0;
                i += 1;
            }
        }
        Ok(false)
    }
}

impl fmt::Display for SemilinearSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim == 0 {
            return f.write_str(if self.formula.is_true() { "TOP" } else { "BOT" });
        }
        f.write_str("{ ")?;
        for i in 1..=self.dim {
            if i > 1 {
                f.write_str(",")?;
            }
            write!(f, "v{i}")?;
        }
        write!(f, " | {} }}", self.formula)
    }
}
