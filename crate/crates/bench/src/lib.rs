//! Shared inputs for the criterion benchmarks.

/// Sentences timed by the `decide` benchmark, with their truth values.
pub const SENTENCES: &[(&str, &str, bool)] = &[
    ("identity", "exists x . forall y . x * y = y", true),
    ("commutativity", "forall x y . x * y = y * x", true),
    ("factor", "forall x . exists y z . x = y * z", true),
    (
        "associativity",
        "forall x y z a b c . (x * y = a & a * z = b & y * z = c) -> x * c = b",
        true,
    ),
    ("squares", "forall x . exists y . y * y = x", false),
];

/// Unary predicates (free variable `x`) compiled and probed by the benchmarks.
pub const PREDICATES: &[(&str, &str)] = &[
    ("square", "exists y . y * y = x"),
    ("squarefree", "forall d . (exists z . d * d * z = x) -> forall y . d * y = y"),
    (
        "prime",
        "!(forall y . x * y = y) & forall d . ((exists z . d * z = x) -> ((forall y . d * y = y) | d = x))",
    ),
];
