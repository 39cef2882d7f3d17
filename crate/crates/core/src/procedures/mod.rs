//! The discrete FDR procedures.
//!
//! | procedure | crossing  | terms                              |
//! |-----------|-----------|------------------------------------|
//! | DBH-SU    | step-up   | `F_i(t) / (1 - F_i(τ_m))`          |
//! | DBH-SD    | step-down | `F_i(t) / (1 - F_i(t))`            |
//! | A-DBH-SU  | step-up   | largest `m-k+1` of the DBH-SU terms|
//! | A-DBH-SD  | step-down | largest `m-k+1` of the DBH-SD terms|
//! | DBR-λ     | step-down | largest `m-k+1` of `F_i(t)`        |
//!
//! [`analyze`] runs the whole pipeline. By default it compares transformed
//! p-values against `α·k/m`; with critical values requested it computes
//! `τ_1..τ_m` on the merged support and crosses the sorted p-values against
//! them instead. Both routes reject the same hypotheses.

mod bh;
mod bounds;
mod config;
mod kernel;
mod stepping;
mod xi;

use serde::{Deserialize, Serialize};

pub use bh::{bh_adjust, bh_rejections};
pub use bounds::tau_min_threshold;
pub use config::{Direction, Method, Procedure, ProcedureConfig, DEFAULT_CHUNK_BUDGET};
pub use stepping::{adjust_sd, bh_thresholds, step_down_cross, step_up_cross, SortPermutation};
pub use xi::{dbh_tau_m, xi_diagnostic, XiVariant};

use crate::error::Result;
use crate::scalar::Scalar;
use crate::stepdist::MultipleTestingProblem;
use kernel::Kernel;

/// Outcome of one procedure run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ProcedureResult<T> {
    pub procedure: Procedure,
    pub alpha: T,
    /// Set for DBR only.
    pub lambda: Option<T>,
    pub m: usize,
    pub k_hat: usize,
    /// `α·k_hat/m`
    pub threshold: T,
    /// Zero-based original indices, ascending.
    pub rejected_indices: Vec<usize>,
    /// Matched p-values of the rejected hypotheses, in the same order.
    pub rejected_pvalues: Vec<T>,
    /// `τ_1..τ_m` when requested.
    #[serde(with = "float_serde::opt_vec")]
    pub critical_values: Option<Vec<T>>,
    /// In original order; step-down procedures and DBR only.
    #[serde(with = "float_serde::opt_vec")]
    pub adjusted_pvalues: Option<Vec<T>>,
    /// `p'_1..p'_m` in rank order.
    #[serde(with = "float_serde::vec")]
    pub transformed_pvalues: Vec<T>,
    /// Matched p-values in original order.
    pub pvalues: Vec<T>,
    pub permutation: SortPermutation,
}

impl<T: Scalar> ProcedureResult<T> {
    /// `true` at every rejected original index.
    pub fn rejection_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.m];
        for &i in &self.rejected_indices {
            mask[i] = true;
        }
        mask
    }

    /// Matched p-values in rank order.
    pub fn sorted_pvalues(&self) -> Vec<T> {
        self.permutation.apply(&self.pvalues)
    }
}

struct Prepared<T: Scalar> {
    problem: MultipleTestingProblem<T>,
    permutation: SortPermutation,
    sorted: Vec<T>,
}

fn prepare<T: Scalar>(
    problem: &MultipleTestingProblem<T>,
    config: &ProcedureConfig<T>,
) -> Result<Prepared<T>> {
    config.validate()?;
    let problem = problem.match_pvalues();
    let permutation = SortPermutation::from_values(problem.raw_pvalues());
    let sorted = permutation.apply(problem.raw_pvalues());
    Ok(Prepared {
        problem,
        permutation,
        sorted,
    })
}

/// Transformed p-values `p'_k = ξ_k(p_(k))` in rank order.
pub fn transform_pvalues_fast<T: Scalar>(
    problem: &MultipleTestingProblem<T>,
    config: &ProcedureConfig<T>,
) -> Result<Vec<T>> {
    let prep = prepare(problem, config)?;
    let kernel = Kernel::new(prep.problem.supports(), config);
    let su = match config.procedure().direction() {
        Direction::StepUp => kernel.step_up_context(&prep.problem.merged_support()),
        Direction::StepDown => None,
    };
    Ok(kernel.transformed(&prep.sorted, su.as_ref()))
}

/// Critical values `τ_1..τ_m`; `τ_k = 0` where no atom qualifies.
pub fn critical_values<T: Scalar>(
    problem: &MultipleTestingProblem<T>,
    config: &ProcedureConfig<T>,
) -> Result<Vec<T>> {
    config.validate()?;
    let merged = problem.merged_support();
    let kernel = Kernel::new(problem.supports(), config);
    let su = match config.procedure().direction() {
        Direction::StepUp => kernel.step_up_context(&merged),
        Direction::StepDown => None,
    };
    Ok(kernel.critical_values(&merged, su.as_ref()))
}

/// Runs a procedure end to end: match, sort, transform or compute critical
/// values, cross, and adjust.
pub fn analyze<T: Scalar>(
    problem: &MultipleTestingProblem<T>,
    config: &ProcedureConfig<T>,
) -> Result<ProcedureResult<T>> {
    let prep = prepare(problem, config)?;
    let procedure = config.procedure();
    let m = prep.problem.len();
    let kernel = Kernel::new(prep.problem.supports(), config);
    let cross = match procedure.direction() {
        Direction::StepUp => step_up_cross::<T>,
        Direction::StepDown => step_down_cross::<T>,
    };

    // The merged support is only needed for τ_m and the critical values.
    let merged = (procedure.direction() == Direction::StepUp || config.want_critical_values)
        .then(|| prep.problem.merged_support());
    let su = match (procedure.direction(), &merged) {
        (Direction::StepUp, Some(merged)) => kernel.step_up_context(merged),
        _ => None,
    };

    let transformed = kernel.transformed(&prep.sorted, su.as_ref());
    let (k_hat, critical) = match &merged {
        Some(merged) if config.want_critical_values => {
            let tau = kernel.critical_values(merged, su.as_ref());
            (cross(&prep.sorted, &tau), Some(tau))
        }
        _ => (cross(&transformed, &bh_thresholds(config.alpha, m)), None),
    };

    let adjusted = procedure
        .reports_adjusted()
        .then(|| prep.permutation.scatter(&adjust_sd(&transformed)));

    let mut rejected_indices = prep.permutation.order()[..k_hat].to_vec();
    rejected_indices.sort_unstable();
    let pvalues = prep.problem.raw_pvalues().to_vec();
    let rejected_pvalues = rejected_indices.iter().map(|&i| pvalues[i]).collect();

    Ok(ProcedureResult {
        procedure,
        alpha: config.alpha,
        lambda: (procedure == Procedure::Dbr).then(|| config.lambda_or_default()),
        m,
        k_hat,
        threshold: config.alpha * T::count(k_hat) / T::count(m),
        rejected_indices,
        rejected_pvalues,
        critical_values: critical,
        adjusted_pvalues: adjusted,
        transformed_pvalues: transformed,
        pvalues,
        permutation: prep.permutation,
    })
}

/// Non-finite values travel as the strings `"inf"`, `"-inf"` and `"nan"`.
mod float_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::scalar::Scalar;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    fn encode<T: Scalar>(v: T) -> Repr {
        let x = v.to_f64().unwrap_or(f64::NAN);
        if x.is_finite() {
            Repr::Number(x)
        } else if x.is_nan() {
            Repr::Text("nan".into())
        } else if x > 0.0 {
            Repr::Text("inf".into())
        } else {
            Repr::Text("-inf".into())
        }
    }

    fn decode<T: Scalar, E: serde::de::Error>(r: Repr) -> Result<T, E> {
        match r {
            Repr::Number(x) => Ok(T::lit(x)),
            Repr::Text(s) => match s.as_str() {
                "inf" => Ok(T::infinity()),
                "-inf" => Ok(T::neg_infinity()),
                "nan" => Ok(T::nan()),
                _ => Err(E::custom(format!("invalid number '{s}'"))),
            },
        }
    }

    pub mod vec {
        use super::*;

        pub fn serialize<T: Scalar, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|&x| encode(x)))
        }

        pub fn deserialize<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> Result<Vec<T>, D::Error> {
            Vec::<Repr>::deserialize(d)?
                .into_iter()
                .map(decode)
                .collect()
        }
    }

    pub mod opt_vec {
        use super::*;

        pub fn serialize<T: Scalar, S: Serializer>(
            v: &Option<Vec<T>>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            match v {
                Some(v) => s.serialize_some(&v.iter().map(|&x| encode(x)).collect::<Vec<_>>()),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, T: Scalar, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<Vec<T>>, D::Error> {
            Option::<Vec<Repr>>::deserialize(d)?
                .map(|v| v.into_iter().map(decode).collect())
                .transpose()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stepdist::PValueSupport;

    fn single(atoms: &[f64], raw: f64) -> MultipleTestingProblem<f64> {
        MultipleTestingProblem::new(vec![raw], vec![PValueSupport::new(atoms.to_vec()).unwrap()])
            .unwrap()
    }

    #[test]
    fn single_hypothesis_transform() {
        let p = single(&[0.5, 1.0], 0.5);
        for proc in [Procedure::DbhSd, Procedure::AdbhSd] {
            let c = ProcedureConfig::for_procedure(proc);
            assert_eq!(transform_pvalues_fast(&p, &c).unwrap(), vec![1.0]);
        }
    }

    #[test]
    fn single_hypothesis_critical_value() {
        let p = single(&[0.02, 0.5, 1.0], 0.02);
        let c = ProcedureConfig::dbh(Direction::StepDown);
        assert_eq!(critical_values(&p, &c).unwrap(), vec![0.02]);
        let r = analyze(&p, &c.with_critical_values(true)).unwrap();
        assert_eq!(r.k_hat, 1);
        assert_eq!(r.rejected_indices, vec![0]);
    }

    #[test]
    fn empty_feasible_set() {
        let p = single(&[0.5, 1.0], 0.5);
        for proc in Procedure::ALL {
            let c = ProcedureConfig::for_procedure(proc).with_critical_values(true);
            let r = analyze(&p, &c).unwrap();
            assert_eq!(r.critical_values, Some(vec![0.0]), "{proc}");
            assert_eq!(r.k_hat, 0);
            assert_eq!(r.threshold, 0.0);
            assert_eq!(r.adjusted_pvalues.is_some(), proc.reports_adjusted());
        }
    }

    #[test]
    fn dense_grid_inverts_in_closed_form() {
        let n = 1_000_000usize;
        let grid: Vec<f64> = (1..=n).map(|j| j as f64 / n as f64).collect();
        let m = 3;
        let support = PValueSupport::new(grid).unwrap();
        let p = MultipleTestingProblem::new(vec![0.5; m], vec![support; m]).unwrap();
        let tau = critical_values(&p, &ProcedureConfig::dbh(Direction::StepDown)).unwrap();
        for (k, t) in tau.iter().enumerate() {
            let level = 0.05 * (k + 1) as f64 / m as f64;
            let bound = level / (1.0 + level);
            let expected = (bound * n as f64).floor() / n as f64;
            assert!(
                (t - expected).abs() <= 1.0 / n as f64,
                "k={k}: {t} vs {expected}"
            );
        }
    }

    #[test]
    fn invalid_configuration_is_rejected() {
        let p = single(&[0.5, 1.0], 0.5);
        let c = ProcedureConfig::<f64>::default().with_alpha(1.5);
        assert!(analyze(&p, &c).is_err());
    }

    #[test]
    fn json_round_trip_keeps_infinities() {
        let p = MultipleTestingProblem::new(
            vec![1.0, 0.5],
            vec![
                PValueSupport::new([1.0]).unwrap(),
                PValueSupport::new([0.5, 1.0]).unwrap(),
            ],
        )
        .unwrap();
        let r = analyze(&p, &ProcedureConfig::dbh(Direction::StepDown)).unwrap();
        assert!(r.transformed_pvalues.iter().any(|v: &f64| v.is_infinite()));
        let text = serde_json::to_string(&r).unwrap();
        let back: ProcedureResult<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
