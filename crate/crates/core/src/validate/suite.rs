//! Property suites run by the acceptance tests and the command-line tool.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::generate::{random_case, CorpusCase, TestFamily};
use super::oracle::{oracle_critical_values, oracle_rejections};
use super::simulate::{simulate_fdr_many, SimulationSpec};
use crate::error::Result;
use crate::procedures::{
    analyze, critical_values, step_down_cross, tau_min_threshold, Direction, Procedure,
    ProcedureConfig, SortPermutation,
};

/// Deliberate defects, used to confirm that the suites catch them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Step-up procedures stop at the first crossing instead of the last.
    StepUpFirstCrossing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// First failure, or a summary of the measured quantity.
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            cases: 0,
            failures: 0,
            detail: String::new(),
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            if self.failures == 0 {
                self.detail = describe();
            }
            self.failures += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl std::fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:<34} {:>8} {:>8}  detail", "check", "cases", "failed")?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<34} {:>8} {:>8}  {}",
                c.name, c.cases, c.failures, c.detail
            )?;
        }
        Ok(())
    }
}

pub const ORACLE_CRITICAL: &str = "critical values = oracle";
pub const ORACLE_REJECTIONS: &str = "rejections = oracle";
pub const FAST_EQUALS_CRIT: &str = "fast path = critical value path";
pub const ADJUSTED_THRESHOLDING: &str = "adjusted p-value thresholding";
pub const DOMINANCE: &str = "adaptive dominance";
pub const MONOTONE: &str = "critical values nondecreasing";
pub const LOWER_BOUNDS: &str = "lower bounds";

/// Rejections as reported by the library, possibly with a defect injected.
fn implementation_rejections(
    case: &CorpusCase,
    config: &ProcedureConfig<f64>,
    mutation: Option<Mutation>,
) -> Result<Vec<usize>> {
    match mutation {
        Some(Mutation::StepUpFirstCrossing)
            if config.procedure().direction() == Direction::StepUp =>
        {
            let matched = case.problem.match_pvalues();
            let tau = critical_values(&matched, config)?;
            let perm = SortPermutation::from_values(matched.raw_pvalues());
            let k = step_down_cross(&perm.apply(matched.raw_pvalues()), &tau);
            let mut rejected = perm.order()[..k].to_vec();
            rejected.sort_unstable();
            Ok(rejected)
        }
        _ => Ok(analyze(&case.problem, config)?.rejected_indices),
    }
}

/// Oracle and structural properties on `cases` random problems with
/// `m <= 50` and at most 20 atoms per support.
pub fn oracle_suite(cases: usize, seed: u64, mutation: Option<Mutation>) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut oracle = Check::new(ORACLE_CRITICAL);
    let mut rejections = Check::new(ORACLE_REJECTIONS);
    let mut fast_crit = Check::new(FAST_EQUALS_CRIT);
    let mut adjusted = Check::new(ADJUSTED_THRESHOLDING);
    let mut dominance = Check::new(DOMINANCE);
    let mut monotone = Check::new(MONOTONE);
    let mut bounds = Check::new(LOWER_BOUNDS);
    let grid: Vec<f64> = (1..=99).map(|j| j as f64 / 100.0).collect();

    for case_no in 0..cases {
        let case = random_case(&mut rng, 50, 20);
        let matched = case.problem.match_pvalues();
        let merged = matched.merged_support();
        let m = matched.len();
        let mut k_hats = std::collections::HashMap::new();

        for procedure in Procedure::ALL {
            let config = case.config(procedure);
            let tag = || format!("case {case_no}, {procedure}, m={m}");

            let tau = critical_values(&matched, &config)?;
            let expected = oracle_critical_values(&matched, &config)?;
            oracle.record(tau == expected, || {
                format!("{}: {tau:?} vs {expected:?}", tag())
            });

            let fast = analyze(&case.problem, &config)?;
            let crit = analyze(&case.problem, &config.with_critical_values(true))?;
            fast_crit.record(fast.rejected_indices == crit.rejected_indices, || {
                format!("{}: fast {} vs crit {}", tag(), fast.k_hat, crit.k_hat)
            });

            let reported = implementation_rejections(&case, &config, mutation)?;
            let truth = oracle_rejections(&case.problem, &config)?;
            rejections.record(reported == truth, || {
                format!(
                    "{}: {} vs {} rejections",
                    tag(),
                    reported.len(),
                    truth.len()
                )
            });
            k_hats.insert(procedure, fast.k_hat);

            monotone.record(tau.windows(2).all(|w| w[0] <= w[1]), tag);

            let floor = |threshold: f64| merged.atoms()[merged.floor_index(threshold)];
            let tau_m = tau[m - 1];
            let bounds_ok = tau.iter().enumerate().all(|(i, &t)| {
                let k = i + 1;
                let threshold = match procedure.direction() {
                    Direction::StepUp if k < m => {
                        tau_min_threshold(procedure, 1, m, case.alpha, case.lambda, tau_m)
                    }
                    _ => tau_min_threshold(procedure, k, m, case.alpha, case.lambda, tau_m),
                };
                t == 0.0 || t >= floor(threshold)
            });
            bounds.record(bounds_ok, tag);

            if let Some(adj) = &fast.adjusted_pvalues {
                for &alpha in &grid {
                    let at_alpha = analyze(&case.problem, &config.with_alpha(alpha))?;
                    let by_adjusted: Vec<usize> = (0..m).filter(|&i| adj[i] <= alpha).collect();
                    adjusted.record(by_adjusted == at_alpha.rejected_indices, || {
                        format!(
                            "{} at α={alpha}: {} vs {}",
                            tag(),
                            by_adjusted.len(),
                            at_alpha.k_hat
                        )
                    });
                }
            }
        }
        for (adaptive, plain) in [
            (Procedure::AdbhSu, Procedure::DbhSu),
            (Procedure::AdbhSd, Procedure::DbhSd),
        ] {
            dominance.record(k_hats[&adaptive] >= k_hats[&plain], || {
                format!(
                    "case {case_no}: {adaptive} {} < {plain} {}",
                    k_hats[&adaptive], k_hats[&plain]
                )
            });
        }
    }
    Ok(SuiteReport {
        checks: vec![
            oracle, rejections, fast_crit, adjusted, dominance, monotone, bounds,
        ],
    })
}

/// Monte Carlo FDR control at level `alpha` for every procedure, one check
/// per procedure and null proportion.
pub fn fdr_suite(
    m: usize,
    pi0s: &[f64],
    replications: usize,
    seed: u64,
    family: TestFamily,
    alpha: f64,
) -> Result<SuiteReport> {
    let configs: Vec<ProcedureConfig<f64>> = Procedure::ALL
        .iter()
        .map(|&p| ProcedureConfig::for_procedure(p).with_alpha(alpha))
        .collect();
    let mut checks = Vec::new();
    for &pi0 in pi0s {
        let spec = SimulationSpec::new(m, pi0, family, replications, seed);
        let estimates = simulate_fdr_many(&spec, &configs)?;
        for (config, est) in configs.iter().zip(estimates) {
            let mut check = Check::new(format!("FDR {} pi0={pi0}", config.procedure()));
            let bound = alpha + 3.0 * est.std_error;
            check.record(est.mean_fdp <= bound, String::new);
            check.cases = replications;
            check.detail = format!(
                "FDR {:.5} ± {:.5} (bound {:.5}), power {:.4}",
                est.mean_fdp, est.std_error, bound, est.mean_power
            );
            checks.push(check);
        }
    }
    Ok(SuiteReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_oracle_suite_passes() {
        let report = oracle_suite(40, 42, None).unwrap();
        assert!(report.passed(), "{report}");
        assert!(report.check(ADJUSTED_THRESHOLDING).unwrap().cases > 0);
    }

    #[test]
    fn first_crossing_mutation_is_caught() {
        let report = oracle_suite(200, 42, Some(Mutation::StepUpFirstCrossing)).unwrap();
        assert!(
            !report.check(ORACLE_REJECTIONS).unwrap().passed(),
            "{report}"
        );
    }

    #[test]
    fn fdr_suite_shape() {
        let report = fdr_suite(10, &[1.0], 20, 1, TestFamily::Fisher, 0.05).unwrap();
        assert_eq!(report.checks.len(), 5);
        assert!(report.checks.iter().all(|c| c.cases == 20));
    }
}
