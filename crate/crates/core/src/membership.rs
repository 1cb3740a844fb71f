//! Ground-tuple membership via prime valuations.
//!
//! For `w` and `S = Def(α₁, …, αₙ; α)`, let `P` be the primes dividing some
//! component of `w` and `P₀ ⊆ P` those whose valuation vector lies outside
//! `α`. In the bipartite graph joining `p ∈ P` to slot `i` when
//! `v_p(w) ∈ αᵢ`, `w ∈ S` iff some matching covers `P₀` and some matching
//! covers all slots; the two matchings combine into one covering both.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matching::{BipartiteGraph, Side};
use crate::skolemian::{SemiskolemianSet, SkolemianSet};

/// Primes dividing a tuple, each with its nonzero valuation vector.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValuationProfile {
    entries: Vec<(u64, Vec<u64>)>,
}

impl ValuationProfile {
    /// `(prime, exponents)` pairs with strictly increasing primes.
    pub fn entries(&self) -> &[(u64, Vec<u64>)] {
        &self.entries
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|(p, _)| *p)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Componentwise product of `p^exponents`; `None` on overflow.
    pub fn reconstruct(&self, dim: usize) -> Option<Vec<u64>> {
        let mut out = vec![1u64; dim];
        for (p, exps) in &self.entries {
            for (slot, &e) in out.iter_mut().zip(exps) {
                let pow = p.checked_pow(u32::try_from(e).ok()?)?;
                *slot = slot.checked_mul(pow)?;
            }
        }
        Some(out)
    }
}

/// Factors `n >= 1` by trial division.
fn factor(mut n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while n.is_multiple_of(p) {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    // 6k ± 1
    let mut d = 5u64;
    while d.checked_mul(d).is_some_and(|sq| sq <= n) {
        push(d, &mut n);
        push(d + 2, &mut n);
        d += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Complete valuation profile of a tuple of positive integers.
pub fn valuation_profile(w: &[u64]) -> Result<ValuationProfile> {
    let mut table: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for (i, &x) in w.iter().enumerate() {
        if x == 0 {
            return Err(Error::Domain(format!(
                "component {} is 0; tuples range over positive integers",
                i + 1
            )));
        }
        if x > i64::MAX as u64 {
            return Err(Error::Domain(format!(
                "component {} exceeds the supported bound 2^63",
                i + 1
            )));
        }
        for (p, e) in factor(x) {
            table.entry(p).or_insert_with(|| vec![0; w.len()])[i] = e;
        }
    }
    Ok(ValuationProfile {
        entries: table.into_iter().collect(),
    })
}

/// Membership of `w` in a single skolemian set.
pub fn member_skolemian(s: &SkolemianSet, w: &[u64]) -> Result<bool> {
    if w.len() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: w.len(),
        });
    }
    if s.dim() == 0 {
        return s.decide_dim_zero();
    }
    let profile = valuation_profile(w)?;
    member_with_profile(s, &profile)
}

fn member_with_profile(s: &SkolemianSet, profile: &ValuationProfile) -> Result<bool> {
    let slots = s.exceptional();
    if profile.len() < slots.len() {
        return Ok(false);
    }
    let mut graph = BipartiteGraph::new(profile.len(), slots.len());
    let mut outside_rest = Vec::new();
    for (p, (_, exps)) in profile.entries().iter().enumerate() {
        if !s.rest().member(exps)? {
            outside_rest.push(p);
        }
        for (i, slot) in slots.iter().enumerate() {
            if slot.member(exps)? {
                graph.add_edge(p, i)?;
            }
        }
    }
    let all_slots: Vec<usize> = (0..slots.len()).collect();
    Ok(graph.has_matching_covering(Side::Left, &outside_rest)?
        && graph.has_matching_covering(Side::Right, &all_slots)?)
}

/// Membership of `w` in a finite union of skolemian sets.
pub fn member_semi(s: &SemiskolemianSet, w: &[u64]) -> Result<bool> {
    if w.len() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: w.len(),
        });
    }
    if s.dim() == 0 {
        return s.decide_dim_zero();
    }
    let profile = valuation_profile(w)?;
    for d in s.disjuncts() {
        if member_with_profile(d, &profile)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presburger::parse_formula;
    use crate::semilinear::SemilinearSet;

    fn set(dim: usize, src: &str) -> SemilinearSet {
        SemilinearSet::new(dim, parse_formula(src).unwrap()).unwrap()
    }

    /// Def({v = 1}; {v = 0 ∨ v = 2})
    fn one_prime_rest_squares() -> SkolemianSet {
        SkolemianSet::new(vec![set(1, "v1 = 1")], set(1, "(v1 = 0) | (v1 = 2)")).unwrap()
    }

    #[test]
    fn profile_examples() {
        let p = valuation_profile(&[12, 30]).unwrap();
        assert_eq!(
            p.entries(),
            &[(2, vec![2, 1]), (3, vec![1, 1]), (5, vec![0, 1])]
        );
        assert!(valuation_profile(&[1, 1]).unwrap().is_empty());
        assert_eq!(valuation_profile(&[7]).unwrap().entries(), &[(7, vec![1])]);
        assert!(matches!(valuation_profile(&[3, 0]), Err(Error::Domain(_))));
    }

    #[test]
    fn profile_reconstructs() {
        for w in [[360u64, 1], [97, 2 * 97 * 97], [1 << 40, 999_983]] {
            let p = valuation_profile(&w).unwrap();
            assert_eq!(p.reconstruct(2).unwrap(), w.to_vec());
            assert!(p.entries().windows(2).all(|e| e[0].0 < e[1].0));
            assert!(p.entries().iter().all(|(_, e)| e.iter().any(|&x| x > 0)));
        }
    }

    #[test]
    fn prime_times_square_examples() {
        let s = one_prime_rest_squares();
        assert!(member_skolemian(&s, &[12]).unwrap());
        assert!(!member_skolemian(&s, &[8]).unwrap());
        assert!(!member_skolemian(&s, &[1]).unwrap());
        assert!(member_skolemian(&s, &[3 * 4 * 25]).unwrap());
        assert!(member_skolemian(&s, &[2]).unwrap());
        assert!(!member_skolemian(&s, &[6]).unwrap());
    }

    #[test]
    fn semi_examples() {
        let s = one_prime_rest_squares();
        assert!(!member_semi(&SemiskolemianSet::empty(1), &[5]).unwrap());
        let single = SemiskolemianSet::new(1, vec![s.clone()]).unwrap();
        for w in 1..=60 {
            assert_eq!(
                member_semi(&single, &[w]).unwrap(),
                member_skolemian(&s, &[w]).unwrap()
            );
        }
        assert!(member_semi(&single, &[1, 2]).is_err());
    }
}
