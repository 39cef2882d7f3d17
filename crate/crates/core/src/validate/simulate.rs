//! Monte Carlo estimates of the false discovery rate and power.
//!
//! Replication `r` draws from `ChaCha8Rng::seed_from_u64(seed)` with its
//! stream set to `r`, so results do not depend on scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{generate_problem, TestFamily, DEFAULT_ROW_TOTALS};
use crate::error::{FdrError, Result};
use crate::procedures::{analyze, ProcedureConfig};
use crate::stepdist::MultipleTestingProblem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub m: usize,
    /// Proportion of true nulls.
    pub pi0: f64,
    pub test_family: TestFamily,
    pub effect_size: f64,
    pub replications: usize,
    pub seed: u64,
    /// Group size range of Fisher tables; small totals mean strong
    /// discreteness.
    pub row_totals: (u64, u64),
}

impl SimulationSpec {
    pub fn new(
        m: usize,
        pi0: f64,
        test_family: TestFamily,
        replications: usize,
        seed: u64,
    ) -> Self {
        Self {
            m,
            pi0,
            test_family,
            effect_size: 0.2,
            replications,
            seed,
            row_totals: DEFAULT_ROW_TOTALS,
        }
    }

    pub fn with_effect_size(mut self, effect_size: f64) -> Self {
        self.effect_size = effect_size;
        self
    }

    pub fn with_row_totals(mut self, lo: u64, hi: u64) -> Self {
        self.row_totals = (lo, hi);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(FdrError::InvalidSimulation(msg.into()));
        if self.m == 0 {
            return fail("m must be at least 1");
        }
        if self.replications == 0 {
            return fail("at least one replication is required");
        }
        if !(0.0..=1.0).contains(&self.pi0) {
            return fail("pi0 must lie in [0, 1]");
        }
        if !(self.effect_size >= 0.0) {
            return fail("effect size must be non-negative");
        }
        if self.row_totals.0 == 0 || self.row_totals.0 > self.row_totals.1 {
            return fail("row totals must be a non-empty range of positive sizes");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdrEstimate {
    pub mean_fdp: f64,
    pub std_error: f64,
    /// Mean share of false nulls rejected; zero when there are none.
    pub mean_power: f64,
}

impl FdrEstimate {
    fn from_samples(samples: &[(f64, f64)]) -> Self {
        let n = samples.len() as f64;
        let mean_fdp = samples.iter().map(|s| s.0).sum::<f64>() / n;
        let mean_power = samples.iter().map(|s| s.1).sum::<f64>() / n;
        let std_error = if samples.len() > 1 {
            let var = samples
                .iter()
                .map(|s| (s.0 - mean_fdp).powi(2))
                .sum::<f64>()
                / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Self {
            mean_fdp,
            std_error,
            mean_power,
        }
    }
}

/// False discovery proportion and power of one rejection set.
fn score(rejected: &[usize], nulls: &[bool]) -> (f64, f64) {
    let false_rejections = rejected.iter().filter(|&&i| nulls[i]).count();
    let fdp = false_rejections as f64 / rejected.len().max(1) as f64;
    let alternatives = nulls.iter().filter(|&&n| !n).count();
    let power = if alternatives == 0 {
        0.0
    } else {
        (rejected.len() - false_rejections) as f64 / alternatives as f64
    };
    (fdp, power)
}

/// Runs several rejection rules on the same simulated data sets. `alpha` is
/// used for the truncation of Poisson supports.
pub fn simulate_rules<F>(spec: &SimulationSpec, alpha: f64, rules: &[F]) -> Result<Vec<FdrEstimate>>
where
    F: Fn(&MultipleTestingProblem<f64>) -> Result<Vec<usize>> + Sync,
{
    spec.validate()?;
    let samples: Vec<Vec<(f64, f64)>> = (0..spec.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(rep as u64);
            let (problem, nulls) = generate_problem(
                &mut rng,
                spec.m,
                spec.test_family,
                spec.pi0,
                spec.effect_size,
                alpha,
                spec.row_totals,
            );
            rules
                .iter()
                .map(|rule| Ok(score(&rule(&problem)?, &nulls)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok((0..rules.len())
        .map(|j| {
            let column: Vec<(f64, f64)> = samples.iter().map(|s| s[j]).collect();
            FdrEstimate::from_samples(&column)
        })
        .collect())
}

/// Estimates for several configurations on shared data sets.
pub fn simulate_fdr_many(
    spec: &SimulationSpec,
    configs: &[ProcedureConfig<f64>],
) -> Result<Vec<FdrEstimate>> {
    for c in configs {
        c.validate()?;
    }
    let alpha = configs.first().map_or(0.05, |c| c.alpha);
    let rules: Vec<_> = configs
        .iter()
        .map(|c| move |p: &MultipleTestingProblem<f64>| Ok(analyze(p, c)?.rejected_indices))
        .collect();
    simulate_rules(spec, alpha, &rules)
}

pub fn simulate_fdr(spec: &SimulationSpec, config: &ProcedureConfig<f64>) -> Result<FdrEstimate> {
    Ok(simulate_fdr_many(spec, std::slice::from_ref(config))?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procedures::{bh_rejections, Direction};

    #[test]
    fn full_null_has_zero_power() {
        let spec = SimulationSpec::new(20, 1.0, TestFamily::Fisher, 50, 1);
        let est = simulate_fdr(&spec, &ProcedureConfig::dbh(Direction::StepDown)).unwrap();
        assert_eq!(est.mean_power, 0.0);
        assert!(est.mean_fdp <= 0.05 + 3.0 * est.std_error + 1e-12);
    }

    #[test]
    fn reproducible_from_seed() {
        let spec = SimulationSpec::new(30, 0.8, TestFamily::Poisson, 40, 17).with_effect_size(2.0);
        let config = ProcedureConfig::adbh(Direction::StepUp);
        let a = simulate_fdr(&spec, &config).unwrap();
        let b = simulate_fdr(&spec, &config).unwrap();
        assert_eq!(a, b);
        let c = simulate_fdr(&SimulationSpec { seed: 18, ..spec }, &config).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_effect_behaves_like_null() {
        let spec = SimulationSpec::new(40, 0.5, TestFamily::Fisher, 200, 3).with_effect_size(0.0);
        let est = simulate_fdr(&spec, &ProcedureConfig::dbh(Direction::StepDown)).unwrap();
        assert!(est.mean_fdp <= 0.05 + 3.0 * est.std_error);
    }

    #[test]
    fn custom_rules_share_the_data() {
        let spec = SimulationSpec::new(25, 0.6, TestFamily::Fisher, 30, 8).with_effect_size(0.4);
        let bh = |p: &MultipleTestingProblem<f64>| Ok(bh_rejections(p.raw_pvalues(), 0.05));
        let est = simulate_rules(&spec, 0.05, &[bh, bh]).unwrap();
        assert_eq!(est[0], est[1]);
    }

    #[test]
    fn invalid_specs() {
        let bad = SimulationSpec::new(0, 1.0, TestFamily::Fisher, 1, 0);
        assert!(simulate_fdr(&bad, &ProcedureConfig::default()).is_err());
        let bad = SimulationSpec::new(5, 1.0, TestFamily::Fisher, 0, 0);
        assert!(bad.validate().is_err());
    }
}
