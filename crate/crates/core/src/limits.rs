/// Caps that turn runaway constructions into reported errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum node count of any single Presburger formula.
    pub max_formula_nodes: usize,
    /// Maximum number of disjuncts (and of enumerated index subsets) per operation.
    pub max_disjuncts: usize,
}

impl Limits {
    pub const DEFAULT_MAX_FORMULA_NODES: usize = 100_000;
    pub const DEFAULT_MAX_DISJUNCTS: usize = 100_000;
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_formula_nodes: Self::DEFAULT_MAX_FORMULA_NODES,
            max_disjuncts: Self::DEFAULT_MAX_DISJUNCTS,
        }
    }
}
