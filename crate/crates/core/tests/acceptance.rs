//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.
//!
//! Ground truth comes from `common` (local factorization, sieve, a
//! self-evaluating formula AST, brute-force matching) rather than from the
//! library's own evaluators. All randomness is seeded.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skolem_core::oracle::skolemian_oracle_member;
use skolem_core::presburger::eliminate_exists;
use skolem_core::{
    decide, eval_ground, member_semi, member_skolemian, parse, BipartiteGraph, Error, Limits, Side,
};

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn limits() -> Limits {
    Limits::default()
}

// --- 1 -------------------------------------------------------------------

const SENTENCE_LIMIT: Duration = Duration::from_secs(30);

const SENTENCES: &[(&str, bool)] = &[
    ("exists x . forall y . x*y = y", true),
    ("forall x y . x*y = y*x", true),
    ("forall x . exists y z . x = y*z", true),
    (
        "forall x y z a b c . (x*y = a & a*z = b & y*z = c) -> x*c = b",
        true,
    ),
    ("forall x . exists y . y*y = x", false),
    ("exists x . (x*x = x & (exists y . !(x*y = y)))", false),
];

fn sentence_battery() -> Outcome {
    let mut slowest = Duration::ZERO;
    for &(text, expected) in SENTENCES {
        let start = Instant::now();
        let got = parse(text)
            .and_then(|f| decide(&f, &limits()))
            .map_err(|e| format!("`{text}`: {e}"))?;
        let took = start.elapsed();
        slowest = slowest.max(took);
        if got != expected {
            return Err(format!("`{text}`: got {got}, expected {expected}"));
        }
        if took > SENTENCE_LIMIT {
            return Err(format!("`{text}` took {took:?}"));
        }
    }
    Ok(format!(
        "{} sentences, slowest {slowest:?}",
        SENTENCES.len()
    ))
}

// --- 2 -------------------------------------------------------------------

const BATTERY_LIMIT: Duration = Duration::from_secs(300);

fn check_predicate(
    text: &str,
    args: &[&str],
    cases: impl Iterator<Item = Vec<u64>>,
    truth: impl Fn(&[u64]) -> bool,
) -> std::result::Result<usize, String> {
    let f = parse(text).map_err(|e| e.to_string())?;
    let mut n = 0;
    for w in cases {
        let assignment: BTreeMap<String, u64> = args
            .iter()
            .map(|a| a.to_string())
            .zip(w.iter().copied())
            .collect();
        let got = eval_ground(&f, &assignment, &limits()).map_err(|e| format!("{w:?}: {e}"))?;
        if got != truth(&w) {
            return Err(format!("`{text}` at {w:?}: got {got}"));
        }
        n += 1;
    }
    Ok(n)
}

fn predicate_battery() -> Outcome {
    let start = Instant::now();
    let primes = sieve(200);
    let mut total = 0;
    total += check_predicate(
        "exists z . x*z = y",
        &["x", "y"],
        grid(2, 1, 50).into_iter(),
        |w| w[1] % w[0] == 0,
    )?;
    total += check_predicate(
        "!(forall y . x*y = y) & forall d . ((exists z . d*z = x) -> ((forall u . d*u = u) | d = x))",
        &["x"],
        (2..=200).map(|x| vec![x]),
        |w| primes[w[0] as usize],
    )?;
    total += check_predicate(
        "exists y . y*y = x",
        &["x"],
        (1..=100).map(|x| vec![x]),
        |w| is_square(w[0]),
    )?;
    total += check_predicate(
        "forall d . (exists z . d*d*z = x) -> forall u . d*u = u",
        &["x"],
        (1..=100).map(|x| vec![x]),
        |w| is_squarefree(w[0]),
    )?;
    total += check_predicate(
        "forall d . ((exists a . d*a = x) & (exists b . d*b = y)) -> forall u . d*u = u",
        &["x", "y"],
        grid(2, 1, 30).into_iter(),
        |w| gcd(w[0], w[1]) == 1,
    )?;
    let took = start.elapsed();
    if took > BATTERY_LIMIT {
        return Err(format!("battery took {took:?}"));
    }
    Ok(format!("{total} evaluations agree, {took:?}"))
}

// --- 3 -------------------------------------------------------------------

fn membership_matches_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut decided, mut skipped, mut members) = (0, 0, 0);
    while decided < 1000 {
        let dim = rng.gen_range(1..=2);
        let n = rng.gen_range(0..=3);
        let s = random_skolemian(&mut rng, dim, n);
        for _ in 0..4 {
            let w = if rng.gen_bool(0.5) {
                (0..dim).map(|_| rng.gen_range(1..=10_000u64)).collect()
            } else {
                structured_tuple(&mut rng, dim, 10_000)
            };
            let oracle = match skolemian_oracle_member(&s.set, &w) {
                Ok(b) => b,
                Err(Error::InstanceTooLarge(_)) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(format!("oracle on {w:?}: {e}")),
            };
            let fast = member_skolemian(&s.set, &w).map_err(|e| e.to_string())?;
            let local = s.contains(&w);
            if fast != oracle || local != oracle {
                return Err(format!(
                    "{} at {w:?}: matching {fast}, oracle {oracle}, local {local}",
                    s.set
                ));
            }
            decided += 1;
            members += fast as usize;
        }
    }
    Ok(format!(
        "{decided} instances agree ({members} members, {skipped} over oracle size skipped)"
    ))
}

// --- 4, 5 ----------------------------------------------------------------

const GRID_MAX: u64 = 40;

fn complement_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut points = 0;
    for _ in 0..200 {
        let dim = rng.gen_range(1..=2);
        let n = rng.gen_range(0..=2);
        let s = random_skolemian(&mut rng, dim, n);
        let c = s
            .set
            .complement(&limits())
            .map_err(|e| format!("{}: {e}", s.set))?;
        for w in grid(dim, 1, GRID_MAX) {
            let inside = s.contains(&w);
            let in_c = member_semi(&c, &w).map_err(|e| e.to_string())?;
            if inside == in_c {
                return Err(format!(
                    "{} at {w:?}: in S {inside}, in complement {in_c}",
                    s.set
                ));
            }
            points += 1;
        }
    }
    Ok(format!("200 sets, {points} grid points"))
}

fn intersection_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut points = 0;
    for _ in 0..200 {
        let dim = rng.gen_range(1..=2);
        let (n, m) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
        let s = random_skolemian(&mut rng, dim, n);
        let t = random_skolemian(&mut rng, dim, m);
        let both = s
            .set
            .intersect(&t.set, &limits())
            .map_err(|e| format!("{} ∩ {}: {e}", s.set, t.set))?;
        for w in grid(dim, 1, GRID_MAX) {
            let expected = s.contains(&w) && t.contains(&w);
            let got = member_semi(&both, &w).map_err(|e| e.to_string())?;
            if got != expected {
                return Err(format!("{} ∩ {} at {w:?}: got {got}", s.set, t.set));
            }
            points += 1;
        }
    }
    Ok(format!("200 pairs, {points} grid points"))
}

// --- 6 -------------------------------------------------------------------

const QE_COORD_MAX: i64 = 30;

fn qe_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut checks, mut max_bound) = (0usize, 0i64);
    for k in 0..500 {
        let dim = rng.gen_range(1..=3);
        let gen = LinGen {
            dim,
            max_coeff: 3,
            max_const: 5,
            max_modulus: 5,
            max_atoms: 3,
        };
        let f = gen.formula(&mut rng);
        let core = f.to_formula();
        // the generator's own bound: lcm(moduli)·(1 + Σ|coeff|·30 + max|const|)
        let coeff_sum: i64 = f
            .atoms()
            .iter()
            .map(|a| a.0.iter().map(|c| c.abs()).sum::<i64>())
            .sum();
        let const_max = f.atoms().iter().map(|a| a.1.abs()).max().unwrap_or(0);
        let generator_bound = f.moduli_lcm() as i64 * (1 + coeff_sum * QE_COORD_MAX + const_max);
        for var in 0..dim {
            let g = eliminate_exists(&core, var as u32 + 1, &limits())
                .map_err(|e| format!("formula {k} `{core}`: {e}"))?;
            if g.mentions(var as u32 + 1) {
                return Err(format!("`{g}` still mentions v{}", var + 1));
            }
            for base in grid(dim, 0, QE_COORD_MAX as u64) {
                if base[var] != 0 {
                    continue;
                }
                let mut p: Vec<i64> = base.iter().map(|&x| x as i64).collect();
                let bound = f.witness_bound(&p, var);
                if bound > generator_bound {
                    return Err(format!("witness bound {bound} exceeds {generator_bound}"));
                }
                max_bound = max_bound.max(bound);
                let expected = (0..=bound).any(|x| {
                    p[var] = x;
                    f.eval(&p)
                });
                let got = g.eval(&base).map_err(|e| e.to_string())?;
                if got != expected {
                    return Err(format!(
                        "∃v{} `{core}` → `{g}` at {base:?}: got {got}, witness search {expected}",
                        var + 1
                    ));
                }
                checks += 1;
            }
        }
    }
    Ok(format!(
        "500 formulas, {checks} point checks, largest witness bound {max_bound}"
    ))
}

// --- 7 -------------------------------------------------------------------

fn joint_matchings() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut both = 0;
    for _ in 0..1000 {
        let (nl, nr) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let density = rng.gen_range(0.1..0.7);
        let edges: Vec<(usize, usize)> = grid(2, 0, 5)
            .into_iter()
            .map(|e| (e[0] as usize, e[1] as usize))
            .filter(|&(l, r)| l < nl && r < nr)
            .filter(|_| rng.gen_bool(density))
            .collect();
        let g =
            BipartiteGraph::with_edges(nl, nr, edges.iter().copied()).map_err(|e| e.to_string())?;
        let (lp, rp) = (random_subset(&mut rng, nl), random_subset(&mut rng, nr));
        let covers_l = g
            .has_matching_covering(Side::Left, &lp)
            .map_err(|e| e.to_string())?;
        let covers_r = g
            .has_matching_covering(Side::Right, &rp)
            .map_err(|e| e.to_string())?;
        if covers_l != brute_matching_covers(&edges, &lp, &[])
            || covers_r != brute_matching_covers(&edges, &[], &rp)
        {
            return Err(format!(
                "coverage disagrees with brute force on {edges:?}, L′={lp:?}, R′={rp:?}"
            ));
        }
        if covers_l && covers_r {
            both += 1;
            if !brute_matching_covers(&edges, &lp, &rp) {
                return Err(format!(
                    "no joint matching on {edges:?}, L′={lp:?}, R′={rp:?}"
                ));
            }
        }
    }
    Ok(format!("1000 graphs, {both} with both sides coverable"))
}

// --- 8 -------------------------------------------------------------------

fn projection_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checks = 0;
    for _ in 0..100 {
        let n = rng.gen_range(0..=2);
        let s = random_skolemian(&mut rng, 2, n);
        let coord = rng.gen_range(1..=2);
        let p = s
            .set
            .project_away(coord, &limits())
            .map_err(|e| format!("{}: {e}", s.set))?;
        for w in grid(2, 1, GRID_MAX) {
            if !s.contains(&w) {
                continue;
            }
            let mut projected = w.clone();
            projected.remove(coord - 1);
            if !member_semi(&p, &projected).map_err(|e| e.to_string())? {
                return Err(format!("{} ∋ {w:?} but {p} ∌ {projected:?}", s.set));
            }
            checks += 1;
        }
    }
    Ok(format!("100 sets, {checks} projected members"))
}

fn main() {
    let criteria: &[Criterion] = &[
        ("sentence battery", sentence_battery),
        ("predicate battery", predicate_battery),
        (
            "matching membership = set-builder oracle",
            membership_matches_oracle,
        ),
        ("complement", complement_correctness),
        ("intersection", intersection_correctness),
        ("quantifier elimination", qe_soundness),
        ("joint matchings", joint_matchings),
        ("projection soundness", projection_soundness),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail} [{took:.1?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why} [{took:.1?}]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
