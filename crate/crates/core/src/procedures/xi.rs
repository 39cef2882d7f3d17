//! The `ξ` transformations, evaluated on arbitrary grids for diagnostics and
//! plotting.

use serde::{Deserialize, Serialize};

use super::config::ProcedureConfig;
use super::kernel::Kernel;
use crate::error::{FdrError, Result};
use crate::scalar::Scalar;
use crate::stepdist::MultipleTestingProblem;

/// Which transformation to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum XiVariant<T> {
    /// `(1/m) Σ F_i(t)`
    Plain,
    /// `(1/m) Σ F_i(t) / (1 - F_i(t))`
    Sd,
    /// `(1/m) Σ F_i(t) / (1 - F_i(τ_m))`
    Su(T),
}

/// Evaluates a transformation at every point of the sorted grid `ts`.
///
/// Terms with a vanishing denominator are `+∞`, and so is any sum
/// containing one.
pub fn xi_diagnostic<T: Scalar>(
    problem: &MultipleTestingProblem<T>,
    ts: &[T],
    variant: XiVariant<T>,
) -> Result<Vec<T>> {
    if ts.windows(2).any(|w| w[0] > w[1]) {
        return Err(FdrError::UnsortedBatch);
    }
    let mut acc = vec![T::zero(); ts.len()];
    for support in problem.supports() {
        let fixed = match variant {
            XiVariant::Su(tau_m) => T::one() - support.cdf(tau_m),
            _ => T::one(),
        };
        for (slot, f) in acc.iter_mut().zip(support.cdf_batch(ts)?) {
            let denom = match variant {
                XiVariant::Plain => T::one(),
                XiVariant::Sd => T::one() - f,
                XiVariant::Su(_) => fixed,
            };
            let term = if denom <= T::zero() {
                T::infinity()
            } else {
                f / denom
            };
            *slot = *slot + term;
        }
    }
    let mt = T::count(problem.len());
    Ok(acc.into_iter().map(|s| s / mt).collect())
}

/// `τ_m` of DBH-SU at level `alpha`: the largest atom of the merged support
/// with `ξ_SD(t) <= α`, or `None` if there is none.
pub fn dbh_tau_m<T: Scalar>(problem: &MultipleTestingProblem<T>, alpha: T) -> Option<T> {
    let config = ProcedureConfig::dbh(super::Direction::StepUp).with_alpha(alpha);
    let merged = problem.merged_support();
    Kernel::new(problem.supports(), &config)
        .step_up_context(&merged)
        .map(|ctx| ctx.tau_m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stepdist::PValueSupport;

    fn grid_problem(n: usize) -> MultipleTestingProblem<f64> {
        let grid = PValueSupport::new((1..=n).map(|j| j as f64 / n as f64)).unwrap();
        MultipleTestingProblem::new(vec![1.0], vec![grid]).unwrap()
    }

    #[test]
    fn zero_everywhere_at_zero() {
        let p = grid_problem(100);
        for v in [XiVariant::Plain, XiVariant::Sd, XiVariant::Su(0.5)] {
            assert_eq!(xi_diagnostic(&p, &[0.0], v).unwrap(), vec![0.0]);
        }
    }

    #[test]
    fn identity_cdf_closed_form() {
        let p = grid_problem(1000);
        let ts: Vec<f64> = (1..999).map(|j| j as f64 / 1000.0).collect();
        let sd = xi_diagnostic(&p, &ts, XiVariant::Sd).unwrap();
        for (t, v) in ts.iter().zip(sd) {
            assert!((v - t / (1.0 - t)).abs() < 1e-12);
        }
        let at_one = xi_diagnostic(&p, &[1.0], XiVariant::Sd).unwrap();
        assert_eq!(at_one, vec![f64::INFINITY]);
    }

    #[test]
    fn plain_below_sd() {
        let s = PValueSupport::new([0.1, 0.4, 1.0]).unwrap();
        let u = PValueSupport::new([0.05, 0.3, 0.7, 1.0]).unwrap();
        let p = MultipleTestingProblem::new(vec![0.4, 0.3], vec![s, u]).unwrap();
        let ts = [0.05, 0.1, 0.3, 0.4, 0.7];
        let plain = xi_diagnostic(&p, &ts, XiVariant::Plain).unwrap();
        let sd = xi_diagnostic(&p, &ts, XiVariant::Sd).unwrap();
        assert!(plain.iter().zip(&sd).all(|(a, b)| a <= b));
        assert!(xi_diagnostic(&p, &[0.3, 0.1], XiVariant::Plain).is_err());
    }
}
