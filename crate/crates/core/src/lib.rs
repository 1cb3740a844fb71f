//! Definable sets of multiplicative arithmetic over the positive integers.
//!
//! A formula built from products, equality, boolean connectives and
//! quantifiers is compiled into a finite union of sets of the form
//! `Def(α₁, …, αₙ; α)`: tuples whose prime-exponent vectors land in the
//! semilinear sets `αᵢ` at `n` pairwise distinct primes and in `α` at every
//! other prime. Membership of ground tuples is then decided by factoring
//! and two bipartite matching checks.
//!
//! Module map:
//! - [`presburger`]: quantifier-free linear formulas and their quantifier elimination.
//! - [`semilinear`]: dimension-tagged exponent sets.
//! - [`matching`]: bipartite matchings.
//! - [`skolemian`]: the `Def` sets and their closure constructions.
//! - [`membership`]: prime valuations and ground-tuple membership.
//! - [`frontend`]: formula parser and compiler.
//! - [`oracle`]: brute-force semantics used to cross-check everything else.

pub mod error;
pub mod frontend;
mod limits;
pub mod matching;
pub mod membership;
pub mod oracle;
pub mod presburger;
pub mod semilinear;
pub mod skolemian;

pub use error::{Error, Result};
pub use frontend::{compile, decide, eval_ground, parse, SkolemFormula, SkolemTerm};
pub use limits::Limits;
pub use matching::{BipartiteGraph, Side};
pub use membership::{member_semi, member_skolemian, valuation_profile, ValuationProfile};
pub use presburger::{Atom, Formula, LinearTerm, Quantifier, Var};
pub use semilinear::SemilinearSet;
pub use skolemian::{SemiskolemianSet, SkolemianSet};
