//! Brute-force critical values: every condition at every atom of the
//! unrestricted merged support, order statistics by full sorting.

use crate::error::{FdrError, Result};
use crate::procedures::{step_down_cross, step_up_cross};
use crate::procedures::{Direction, Procedure, ProcedureConfig, SortPermutation};
use crate::scalar::Scalar;
use crate::stepdist::MultipleTestingProblem;

/// Largest number of hypotheses the oracle accepts.
pub const ORACLE_MAX_M: usize = 200;
/// Largest merged support the oracle accepts.
pub const ORACLE_MAX_SUPPORT: usize = 5000;

fn term<T: Scalar>(f: T, complement: T) -> T {
    if complement <= T::zero() {
        T::infinity()
    } else {
        f / complement
    }
}

/// Sum of the `r` largest values, added from the largest down.
fn top_sum<T: Scalar>(mut values: Vec<T>, r: usize) -> T {
    values.sort_by(|a, b| b.partial_cmp(a).expect("NaN term"));
    values.iter().take(r).fold(T::zero(), |acc, &v| acc + v)
}

struct Oracle<'a, T: Scalar> {
    problem: &'a MultipleTestingProblem<T>,
    procedure: Procedure,
    m: usize,
    alpha: T,
    lambda: T,
}

impl<T: Scalar> Oracle<'_, T> {
    fn level(&self, k: usize) -> T {
        self.alpha * T::count(k) / T::count(self.m)
    }

    fn cdfs(&self, t: T) -> impl Iterator<Item = T> + '_ {
        self.problem.supports().iter().map(move |s| s.cdf(t))
    }

    fn sd_sum(&self, t: T) -> T {
        self.cdfs(t)
            .fold(T::zero(), |acc, f| acc + term(f, T::one() - f))
            / T::count(self.m)
    }

    fn xi(&self, t: T, k: usize, tau_m: Option<T>) -> T {
        let m = self.m;
        let mt = T::count(m);
        let r = m - k + 1;
        match self.procedure {
            Procedure::DbhSd => self.sd_sum(t),
            Procedure::AdbhSd => {
                let terms = self.cdfs(t).map(|f| term(f, T::one() - f)).collect();
                top_sum(terms, r) / mt
            }
            Procedure::Dbr => {
                let values: Vec<T> = self.cdfs(t).collect();
                let max = values.iter().fold(T::zero(), |a, &b| a.max(b));
                if max > self.lambda {
                    T::one()
                } else {
                    top_sum(values, r) / (mt * (T::one() - self.lambda))
                }
            }
            Procedure::DbhSu | Procedure::AdbhSu if k == m => self.sd_sum(t),
            Procedure::DbhSu | Procedure::AdbhSu => {
                let Some(tau_m) = tau_m.filter(|&tm| t <= tm) else {
                    return T::one();
                };
                let terms: Vec<T> = self
                    .problem
                    .supports()
                    .iter()
                    .map(|s| term(s.cdf(t), T::one() - s.cdf(tau_m)))
                    .collect();
                if self.procedure == Procedure::DbhSu {
                    terms.iter().fold(T::zero(), |acc, &v| acc + v) / mt
                } else {
                    top_sum(terms, r) / mt
                }
            }
        }
    }
}

/// `τ_k = max { t ∈ A : ξ_k(t) <= α·k/m }`, or zero, for every `k`.
pub fn oracle_critical_values<T: Scalar>(
    problem: &MultipleTestingProblem<T>,
    config: &ProcedureConfig<T>,
) -> Result<Vec<T>> {
    config.validate()?;
    let merged = problem.merged_support();
    let m = problem.len();
    if m > ORACLE_MAX_M || merged.len() > ORACLE_MAX_SUPPORT {
        return Err(FdrError::OracleScaleExceeded {
            m,
            support: merged.len(),
        });
    }
    let oracle = Oracle {
        problem,
        procedure: config.procedure(),
        m,
        alpha: config.alpha,
        lambda: config.lambda_or_default(),
    };
    let last_passing = |k: usize, tau_m: Option<T>| {
        merged
            .atoms()
            .iter()
            .copied()
            .filter(|&t| oracle.xi(t, k, tau_m) <= oracle.level(k))
            .last()
            .unwrap_or_else(T::zero)
    };
    let tau_m = match oracle.procedure.direction() {
        Direction::StepUp => Some(last_passing(m, None)).filter(|&t| t > T::zero()),
        Direction::StepDown => None,
    };
    Ok((1..=m).map(|k| last_passing(k, tau_m)).collect())
}

/// Rejected original indices, ascending, obtained by crossing the sorted
/// matched p-values against the oracle's critical values.
pub fn oracle_rejections<T: Scalar>(
    problem: &MultipleTestingProblem<T>,
    config: &ProcedureConfig<T>,
) -> Result<Vec<usize>> {
    let matched = problem.match_pvalues();
    let tau = oracle_critical_values(&matched, config)?;
    let perm = SortPermutation::from_values(matched.raw_pvalues());
    let sorted = perm.apply(matched.raw_pvalues());
    let k_hat = match config.procedure().direction() {
        Direction::StepUp => step_up_cross(&sorted, &tau),
        Direction::StepDown => step_down_cross(&sorted, &tau),
    };
    let mut rejected = perm.order()[..k_hat].to_vec();
    rejected.sort_unstable();
    Ok(rejected)
}
