//! Random problem generators.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson as PoissonDist};
use serde::{Deserialize, Serialize};

use crate::procedures::{Procedure, ProcedureConfig};
use crate::stepdist::{MultipleTestingProblem, PValueSupport};
use crate::testgen::{fisher_support, fisher_supports, poisson_supports};
use crate::testgen::{Alternative, ContingencyTable, PoissonTestSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFamily {
    /// One-sided (greater) Fisher tests on binomial 2×2 tables.
    Fisher,
    /// One-sided Poisson mean tests with truncated supports.
    Poisson,
}

/// Inclusive range of the per-group sample sizes of generated tables.
pub const DEFAULT_ROW_TOTALS: (u64, u64) = (20, 200);

/// Draws `m` independent tests, the first `round(pi0·m)` of them true nulls.
///
/// Fisher tables have group sizes uniform in `row_totals` and a baseline
/// response rate `p0` uniform in `[0.01, 0.3]`; alternatives raise the first
/// group's rate to `p0 + effect_size`. Poisson tests have null means uniform
/// in `[0.2, 2]` and alternatives scaled by `1 + effect_size`; their supports
/// are truncated for level `alpha`.
pub fn generate_problem<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    family: TestFamily,
    pi0: f64,
    effect_size: f64,
    alpha: f64,
    row_totals: (u64, u64),
) -> (MultipleTestingProblem<f64>, Vec<bool>) {
    let m0 = ((pi0 * m as f64).round() as usize).min(m);
    let nulls: Vec<bool> = (0..m).map(|i| i < m0).collect();
    let (raw, supports) = match family {
        TestFamily::Fisher => {
            let tables: Vec<ContingencyTable> = nulls
                .iter()
                .map(|&null| {
                    let n1 = rng.random_range(row_totals.0..=row_totals.1);
                    let n2 = rng.random_range(row_totals.0..=row_totals.1);
                    let p0 = rng.random_range(0.01..=0.3);
                    let p1 = if null {
                        p0
                    } else {
                        (p0 + effect_size).min(1.0)
                    };
                    let x1 = Binomial::new(n1, p1).expect("valid rate").sample(rng);
                    let x2 = Binomial::new(n2, p0).expect("valid rate").sample(rng);
                    ContingencyTable::new(x1, n1 - x1, x2, n2 - x2)
                })
                .collect();
            fisher_supports(&tables, Alternative::Greater)
        }
        TestFamily::Poisson => {
            let specs: Vec<PoissonTestSpec> = nulls
                .iter()
                .map(|&null| {
                    let lambda0 = rng.random_range(0.2..=2.0);
                    let rate = if null {
                        lambda0
                    } else {
                        lambda0 * (1.0 + effect_size)
                    };
                    let n = PoissonDist::new(rate).expect("positive rate").sample(rng) as u64;
                    PoissonTestSpec::new(n, lambda0).expect("positive mean")
                })
                .collect();
            let (raw, supports, _) = poisson_supports(&specs, alpha);
            (raw, supports)
        }
    };
    let problem = MultipleTestingProblem::new(raw, supports).expect("generated problem");
    (problem, nulls)
}

/// A random small problem together with a random configuration.
#[derive(Debug, Clone)]
pub struct CorpusCase {
    pub problem: MultipleTestingProblem<f64>,
    pub alpha: f64,
    pub lambda: f64,
}

impl CorpusCase {
    pub fn config(&self, procedure: Procedure) -> ProcedureConfig<f64> {
        ProcedureConfig::for_procedure(procedure)
            .with_alpha(self.alpha)
            .with_lambda(self.lambda)
    }
}

/// Random problem with `m <= max_m` and supports of at most `max_atoms`
/// atoms, mixing Fisher supports with small margins, log-uniform random
/// atoms and atoms from a shared grid (to create cross-test ties). Raw
/// p-values are either atoms or arbitrary values that need matching.
pub fn random_case<R: Rng + ?Sized>(rng: &mut R, max_m: usize, max_atoms: usize) -> CorpusCase {
    let m = rng.random_range(1..=max_m);
    let grid: Vec<f64> = (1..=40).map(|j| (j as f64 / 40.0).powi(3)).collect();
    let mut raw = Vec::with_capacity(m);
    let mut supports = Vec::with_capacity(m);
    for _ in 0..m {
        let support = match rng.random_range(0..3) {
            0 => {
                let cap = (max_atoms as u64).saturating_sub(1).max(1);
                let n1 = rng.random_range(1..=cap);
                let n2 = rng.random_range(1..=40);
                let x1 = rng.random_range(0..=n1);
                let x2 = rng.random_range(0..=n2);
                let alt = *[
                    Alternative::Greater,
                    Alternative::Less,
                    Alternative::TwoSided,
                ]
                .choose(rng)
                .expect("non-empty");
                fisher_support::<f64>(&ContingencyTable::new(x1, n1 - x1, x2, n2 - x2), alt).1
            }
            1 => {
                let n = rng.random_range(1..=max_atoms);
                let mut atoms: Vec<f64> = (0..n)
                    .map(|_| 10f64.powf(rng.random_range(-4.0..0.0)))
                    .collect();
                if rng.random_bool(0.8) {
                    atoms[0] = 1.0;
                }
                PValueSupport::new(atoms).expect("atoms in (0,1]")
            }
            _ => {
                let n = rng.random_range(1..=max_atoms.min(grid.len()));
                let mut atoms: Vec<f64> = grid.choose_multiple(rng, n).copied().collect();
                if rng.random_bool(0.8) {
                    atoms[0] = 1.0;
                }
                PValueSupport::new(atoms).expect("atoms in (0,1]")
            }
        };
        let p = if rng.random_bool(0.8) {
            support.atoms()[rng.random_range(0..support.len())]
        } else {
            rng.random_range(0.0..=1.0)
        };
        raw.push(p);
        supports.push(support);
    }
    CorpusCase {
        problem: MultipleTestingProblem::new(raw, supports).expect("generated problem"),
        alpha: rng.random_range(0.01..0.5),
        lambda: rng.random_range(0.01..0.5),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fisher_null_problem_is_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (p, nulls) = generate_problem(
            &mut rng,
            9,
            TestFamily::Fisher,
            1.0,
            0.2,
            0.05,
            DEFAULT_ROW_TOTALS,
        );
        assert_eq!(p.len(), 9);
        assert!(nulls.iter().all(|&n| n));
        assert!(p.is_matched());
        for s in p.supports() {
            assert!(s.atoms().windows(2).all(|w| w[0] < w[1]));
            assert!(s.min_atom() > 0.0 && s.max_atom() <= 1.0);
        }
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        for family in [TestFamily::Fisher, TestFamily::Poisson] {
            let draw = || {
                let mut rng = ChaCha8Rng::seed_from_u64(99);
                generate_problem(&mut rng, 30, family, 0.8, 0.3, 0.05, DEFAULT_ROW_TOTALS)
            };
            let (a, na) = draw();
            let (b, nb) = draw();
            assert_eq!(a.raw_pvalues(), b.raw_pvalues());
            assert_eq!(a.supports(), b.supports());
            assert_eq!(na, nb);
            assert_eq!(na.iter().filter(|&&n| n).count(), 24);
        }
    }

    #[test]
    fn merged_support_covers_every_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (p, _) = generate_problem(
            &mut rng,
            100,
            TestFamily::Fisher,
            0.8,
            0.2,
            0.05,
            DEFAULT_ROW_TOTALS,
        );
        let merged = p.merged_support();
        let largest = p.supports().iter().map(|s| s.len()).max().unwrap();
        assert!(merged.len() >= largest);
    }

    #[test]
    fn corpus_respects_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let case = random_case(&mut rng, 50, 20);
            assert!(case.problem.len() <= 50);
            assert!(case.problem.supports().iter().all(|s| s.len() <= 20));
        }
    }
}
