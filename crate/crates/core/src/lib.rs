//! Multiple testing with false discovery rate control for discrete,
//! non-identically distributed p-values.
//!
//! The crate is organised bottom-up:
//!
//! * [`stepdist`]: p-value supports and their step CDFs.
//! * [`testgen`]: raw p-values and supports for Fisher's exact test and
//!   one-sided Poisson tests.
//! * [`procedures`]: the discrete BH family (DBH, A-DBH, DBR) with both the
//!   transformed p-value path and the critical value path, plus the classical
//!   BH baseline and the `xi` diagnostics.
//! * [`validate`]: a brute-force oracle, random problem generators and a
//!   Monte Carlo FDR harness.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! command-line tool uses.

// `!(a <= b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod procedures;
pub mod scalar;
pub mod stepdist;
pub mod testgen;
pub mod validate;

pub use error::{FdrError, Result};
pub use procedures::{
    analyze, Direction, Method, ProcedureConfig, ProcedureResult, SortPermutation, XiVariant,
};
pub use scalar::Scalar;
pub use stepdist::{MergedSupport, MultipleTestingProblem, PValueSupport};
pub use testgen::{Alternative, ContingencyTable, PoissonTestSpec};

/// Support of a discrete `f64` p-value.
pub type Support = PValueSupport<f64>;
/// Union of `f64` supports.
pub type Merged = MergedSupport<f64>;
/// A multiple testing problem over `f64` p-values.
pub type Problem = MultipleTestingProblem<f64>;
/// An `f64` procedure configuration.
pub type Config = ProcedureConfig<f64>;
/// Output of [`analyze`] on `f64` data.
pub type Outcome = ProcedureResult<f64>;

/// Single precision variants, mostly useful for memory-constrained runs.
pub mod f32 {
    pub type Support = super::PValueSupport<f32>;
    pub type Problem = super::MultipleTestingProblem<f32>;
    pub type Config = super::ProcedureConfig<f32>;
    pub type Outcome = super::ProcedureResult<f32>;
}
