//! Small reference inputs shared by tests, benchmarks and examples.

use crate::stepdist::MultipleTestingProblem;
use crate::testgen::{fisher_supports, poisson_supports};
use crate::testgen::{Alternative, ContingencyTable, PoissonTestSpec};

/// Nine 2×2 tables `(x1, y1, x2, y2)`: two groups of 148 and 132 subjects.
pub const TOY_TABLES: [(u64, u64, u64, u64); 9] = [
    (4, 144, 0, 132),
    (2, 146, 0, 132),
    (2, 146, 1, 131),
    (14, 134, 3, 129),
    (6, 142, 2, 130),
    (9, 139, 1, 131),
    (4, 144, 2, 130),
    (0, 148, 2, 130),
    (1, 147, 2, 130),
];

/// Observed counts of nine one-sided Poisson tests.
pub const POISSON_COUNTS: [u64; 9] = [3, 3, 1, 2, 3, 3, 1, 2, 4];
/// Null means of the nine Poisson tests.
pub const POISSON_MEANS: [f64; 9] = [0.6, 1.2, 0.7, 1.3, 1.0, 0.2, 0.8, 1.3, 0.9];

pub fn toy_tables() -> Vec<ContingencyTable> {
    TOY_TABLES
        .iter()
        .map(|&(a, b, c, d)| ContingencyTable::new(a, b, c, d))
        .collect()
}

/// The nine tables under two-sided Fisher tests.
pub fn toy_problem() -> MultipleTestingProblem<f64> {
    let (raw, supports) = fisher_supports(&toy_tables(), Alternative::TwoSided);
    MultipleTestingProblem::new(raw, supports).expect("fixture is well formed")
}

pub fn poisson_specs() -> Vec<PoissonTestSpec> {
    POISSON_COUNTS
        .iter()
        .zip(POISSON_MEANS)
        .map(|(&n, l)| PoissonTestSpec::new(n, l).expect("positive mean"))
        .collect()
}

/// The nine Poisson tests with supports truncated for level `alpha`.
pub fn poisson_problem(alpha: f64) -> MultipleTestingProblem<f64> {
    let (raw, supports, _) = poisson_supports(&poisson_specs(), alpha);
    MultipleTestingProblem::new(raw, supports).expect("fixture is well formed")
}
