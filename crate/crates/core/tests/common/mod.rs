//! Shared generators and number-theoretic ground truth for integration tests.
//!
//! Nothing here calls into the library's evaluators: formulas are generated
//! as a local AST that evaluates itself, and arithmetic facts are computed
//! directly.

#![allow(dead_code)]

use rand::Rng;
use skolem_core::{Formula, LinearTerm, SemilinearSet, SkolemianSet};

// ---------------------------------------------------------------------------
// number theory

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Sieve of Eratosthenes on `0..=n`.
pub fn sieve(n: usize) -> Vec<bool> {
    let mut is_prime = vec![true; n + 1];
    is_prime[0] = false;
    if n >= 1 {
        is_prime[1] = false;
    }
    let mut p = 2;
    while p * p <= n {
        if is_prime[p] {
            let mut k = p * p;
            while k <= n {
                is_prime[k] = false;
                k += p;
            }
        }
        p += 1;
    }
    is_prime
}

pub fn is_square(n: u64) -> bool {
    (1..=n).take_while(|r| r * r <= n).any(|r| r * r == n)
}

pub fn is_squarefree(n: u64) -> bool {
    (2..=n)
        .take_while(|d| d * d <= n)
        .all(|d| !n.is_multiple_of(d * d))
}

/// Prime factorization as `(prime, exponent)` pairs, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Primes of a tuple with their exponent vectors.
pub fn exponent_vectors(w: &[u64]) -> Vec<(u64, Vec<u64>)> {
    let mut primes: Vec<u64> = w
        .iter()
        .flat_map(|&x| factorize(x).into_iter().map(|(p, _)| p))
        .collect();
    primes.sort_unstable();
    primes.dedup();
    primes
        .into_iter()
        .map(|p| {
            let exps = w
                .iter()
                .map(|&x| {
                    factorize(x)
                        .iter()
                        .find(|&&(q, _)| q == p)
                        .map_or(0, |&(_, e)| e)
                })
                .collect();
            (p, exps)
        })
        .collect()
}

pub const SMALL_PRIMES: &[u64] = &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

// ---------------------------------------------------------------------------
// Presburger formulas that evaluate themselves

/// Quantifier-free formula over `v1..v_dim` with its own evaluator.
#[derive(Debug, Clone)]
pub enum Lin {
    /// `Σ coeffs[i]·v(i+1) + c <= 0`
    Le(Vec<i64>, i64),
    /// `... = 0`
    Eq(Vec<i64>, i64),
    /// `m | Σ ... + c`
    Dvd(i64, Vec<i64>, i64),
    Not(Box<Lin>),
    And(Vec<Lin>),
    Or(Vec<Lin>),
}

fn term_value(coeffs: &[i64], c: i64, point: &[i64]) -> i64 {
    coeffs.iter().zip(point).map(|(a, x)| a * x).sum::<i64>() + c
}

impl Lin {
    pub fn eval(&self, point: &[i64]) -> bool {
        match self {
            Lin::Le(a, c) => term_value(a, *c, point) <= 0,
            Lin::Eq(a, c) => term_value(a, *c, point) == 0,
            Lin::Dvd(m, a, c) => term_value(a, *c, point).rem_euclid(*m) == 0,
            Lin::Not(g) => !g.eval(point),
            Lin::And(cs) => cs.iter().all(|g| g.eval(point)),
            Lin::Or(cs) => cs.iter().any(|g| g.eval(point)),
        }
    }

    pub fn eval_u(&self, point: &[u64]) -> bool {
        let p: Vec<i64> = point.iter().map(|&x| x as i64).collect();
        self.eval(&p)
    }

    fn term(coeffs: &[i64], c: i64) -> LinearTerm {
        LinearTerm::from_parts(
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &a)| (i as u32 + 1, a as i128)),
            c as i128,
        )
        .expect("small coefficients")
    }

    pub fn to_formula(&self) -> Formula {
        match self {
            Lin::Le(a, c) => Formula::le(Self::term(a, *c)),
            Lin::Eq(a, c) => Formula::eq(Self::term(a, *c)),
            Lin::Dvd(m, a, c) => Formula::dvd(*m as i128, Self::term(a, *c)),
            Lin::Not(g) => Formula::not(g.to_formula()),
            Lin::And(cs) => Formula::and(cs.iter().map(Lin::to_formula)),
            Lin::Or(cs) => Formula::or(cs.iter().map(Lin::to_formula)),
        }
    }

    /// Every atom as `(coeffs, constant, modulus)`; modulus 0 for (in)equalities.
    pub fn atoms(&self) -> Vec<(&[i64], i64, i64)> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<(&'a [i64], i64, i64)>) {
        match self {
            Lin::Le(a, c) | Lin::Eq(a, c) => out.push((a, *c, 0)),
            Lin::Dvd(m, a, c) => out.push((a, *c, *m)),
            Lin::Not(g) => g.collect_atoms(out),
            Lin::And(cs) | Lin::Or(cs) => cs.iter().for_each(|g| g.collect_atoms(out)),
        }
    }

    /// Smallest `B` such that if some natural `x` satisfies the formula at
    /// `point` with coordinate `var` (0-based) replaced by `x`, then one
    /// does with `x <= B`.
    ///
    /// Past `R = max |rest of term|`, every (in)equality atom with a nonzero
    /// coefficient on `var` has a fixed truth value, and divisibility atoms
    /// repeat with period `lcm(moduli)`.
    pub fn witness_bound(&self, point: &[i64], var: usize) -> i64 {
        let mut r = 0i64;
        let mut period = 1u64;
        for (a, c, m) in self.atoms() {
            let rest = term_value(a, c, point) - a[var] * point[var];
            r = r.max(rest.abs());
            if m > 0 {
                period = lcm(period, m as u64);
            }
        }
        r + period as i64
    }

    pub fn moduli_lcm(&self) -> u64 {
        self.atoms()
            .iter()
            .filter(|a| a.2 > 0)
            .fold(1, |l, a| lcm(l, a.2 as u64))
    }
}

pub struct LinGen {
    pub dim: usize,
    pub max_coeff: i64,
    pub max_const: i64,
    pub max_modulus: i64,
    pub max_atoms: usize,
}

impl LinGen {
    pub fn atom<R: Rng>(&self, rng: &mut R) -> Lin {
        let coeffs: Vec<i64> = loop {
            let c: Vec<i64> = (0..self.dim)
                .map(|_| rng.gen_range(-self.max_coeff..=self.max_coeff))
                .collect();
            if c.iter().any(|&a| a != 0) {
                break c;
            }
        };
        let c = rng.gen_range(-self.max_const..=self.max_const);
        match rng.gen_range(0..3) {
            0 => Lin::Le(coeffs, c),
            1 => Lin::Eq(coeffs, c),
            _ => Lin::Dvd(rng.gen_range(2..=self.max_modulus), coeffs, c),
        }
    }

    /// Random boolean combination of `1..=max_atoms` atoms.
    pub fn formula<R: Rng>(&self, rng: &mut R) -> Lin {
        let n = rng.gen_range(1..=self.max_atoms);
        self.combine(rng, n)
    }

    fn combine<R: Rng>(&self, rng: &mut R, atoms: usize) -> Lin {
        let f = if atoms <= 1 {
            self.atom(rng)
        } else {
            let left = rng.gen_range(1..atoms);
            let a = self.combine(rng, left);
            let b = self.combine(rng, atoms - left);
            if rng.gen_bool(0.5) {
                Lin::And(vec![a, b])
            } else {
                Lin::Or(vec![a, b])
            }
        };
        if rng.gen_bool(0.2) {
            Lin::Not(Box::new(f))
        } else {
            f
        }
    }
}

// ---------------------------------------------------------------------------
// skolemian sets

/// The zero vector of dimension `dim` as a formula (`Σ v_i <= 0` over ℕ).
fn zero(dim: usize) -> Lin {
    Lin::Le(vec![1; dim], 0)
}

/// A random skolemian set in dimension `dim >= 1` with `n` exceptional slots,
/// together with local evaluators for its slots and rest set.
#[derive(Debug, Clone)]
pub struct RandomSkolemian {
    pub set: SkolemianSet,
    pub slots: Vec<Lin>,
    pub rest: Lin,
}

pub fn small_gen(dim: usize) -> LinGen {
    LinGen {
        dim,
        max_coeff: 2,
        max_const: 3,
        max_modulus: 3,
        max_atoms: 2,
    }
}

pub fn random_skolemian<R: Rng>(rng: &mut R, dim: usize, n: usize) -> RandomSkolemian {
    let gen = small_gen(dim);
    let slots: Vec<Lin> = (0..n)
        .map(|_| Lin::And(vec![gen.formula(rng), Lin::Not(Box::new(zero(dim)))]))
        .collect();
    let rest = Lin::Or(vec![gen.formula(rng), zero(dim)]);
    let set = SkolemianSet::new(
        slots
            .iter()
            .map(|s| SemilinearSet::new(dim, s.to_formula()).unwrap())
            .collect(),
        SemilinearSet::new(dim, rest.to_formula()).unwrap(),
    )
    .expect("generated sets satisfy the zero conditions");
    RandomSkolemian { set, slots, rest }
}

impl RandomSkolemian {
    /// Membership by enumerating injective slot-to-prime assignments, using
    /// only local factorization and local formula evaluation.
    pub fn contains(&self, w: &[u64]) -> bool {
        let primes = exponent_vectors(w);
        fn go(
            s: &RandomSkolemian,
            primes: &[(u64, Vec<u64>)],
            slot: usize,
            used: &mut [bool],
        ) -> bool {
            if slot == s.slots.len() {
                return primes
                    .iter()
                    .zip(used.iter())
                    .all(|((_, e), &u)| u || s.rest.eval_u(e));
            }
            for i in 0..primes.len() {
                if !used[i] && s.slots[slot].eval_u(&primes[i].1) {
                    used[i] = true;
                    let ok = go(s, primes, slot + 1, used);
                    used[i] = false;
                    if ok {
                        return true;
                    }
                }
            }
            false
        }
        go(self, &primes, 0, &mut vec![false; primes.len()])
    }
}

/// Every tuple in `{lo..=hi}^dim`, in lexicographic order.
pub fn grid(dim: usize, lo: u64, hi: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// A random tuple whose components are products of small primes, each at
/// most `cap`.
pub fn structured_tuple<R: Rng>(rng: &mut R, dim: usize, cap: u64) -> Vec<u64> {
    let k = rng.gen_range(1..=4);
    let primes: Vec<u64> = (0..k).map(|_| SMALL_PRIMES[rng.gen_range(0..6)]).collect();
    (0..dim)
        .map(|_| {
            let mut x = 1u64;
            for &p in &primes {
                for _ in 0..rng.gen_range(0..=3) {
                    if x * p <= cap {
                        x *= p;
                    }
                }
            }
            x
        })
        .collect()
}

// ---------------------------------------------------------------------------
// bipartite matchings

/// Whether some matching of `edges` covers all of `left_nodes` and
/// `right_nodes`, by enumerating matchings edge by edge.
pub fn brute_matching_covers(
    edges: &[(usize, usize)],
    left_nodes: &[usize],
    right_nodes: &[usize],
) -> bool {
    fn go(
        edges: &[(usize, usize)],
        i: usize,
        used_l: &mut Vec<usize>,
        used_r: &mut Vec<usize>,
        left_nodes: &[usize],
        right_nodes: &[usize],
    ) -> bool {
        if left_nodes.iter().all(|l| used_l.contains(l))
            && right_nodes.iter().all(|r| used_r.contains(r))
        {
            return true;
        }
        if i == edges.len() {
            return false;
        }
        let (l, r) = edges[i];
        if !used_l.contains(&l) && !used_r.contains(&r) {
            used_l.push(l);
            used_r.push(r);
            let ok = go(edges, i + 1, used_l, used_r, left_nodes, right_nodes);
            used_l.pop();
            used_r.pop();
            if ok {
                return true;
            }
        }
        go(edges, i + 1, used_l, used_r, left_nodes, right_nodes)
    }
    go(
        edges,
        0,
        &mut Vec::new(),
        &mut Vec::new(),
        left_nodes,
        right_nodes,
    )
}

pub fn random_subset<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    (0..n).filter(|_| rng.gen_bool(0.5)).collect()
}
