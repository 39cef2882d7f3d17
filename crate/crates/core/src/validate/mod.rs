//! Ground truth and statistical checks.
//!
//! * [`oracle_critical_values`]: a deliberately naive re-implementation of
//!   every critical value condition, used to test the optimised kernels.
//! * [`generate_problem`] and [`random_case`]: random Fisher, Poisson and
//!   synthetic problems.
//! * [`simulate_fdr`]: Monte Carlo estimates of FDR and power.
//! * [`oracle_suite`] and [`fdr_suite`]: the property suites behind the
//!   `validate` subcommand.

mod bench;
pub mod fixtures;
mod generate;
mod oracle;
mod simulate;
mod suite;

pub use bench::{bench_problem, median_time, run_bench, BenchRow};
pub use generate::{generate_problem, random_case, CorpusCase, TestFamily, DEFAULT_ROW_TOTALS};
pub use oracle::{oracle_critical_values, oracle_rejections, ORACLE_MAX_M, ORACLE_MAX_SUPPORT};
pub use simulate::{simulate_fdr, simulate_fdr_many, simulate_rules, FdrEstimate, SimulationSpec};
pub use suite::{fdr_suite, oracle_suite, Check, Mutation, SuiteReport};
pub use suite::{
    ADJUSTED_THRESHOLDING, DOMINANCE, FAST_EQUALS_CRIT, LOWER_BOUNDS, MONOTONE, ORACLE_CRITICAL,
    ORACLE_REJECTIONS,
};
