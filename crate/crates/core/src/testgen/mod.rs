//! Raw p-values and their supports for concrete discrete tests.

mod fisher;
mod hypergeom;
mod poisson;

use serde::{Deserialize, Serialize};

pub use fisher::{fisher_support, fisher_supports, hg2011_to_tables};
pub use hypergeom::{hypergeom_log_pmf, Hypergeometric};
pub use poisson::{
    poisson_support, poisson_supports, poisson_truncation, Poisson, PoissonTruncation,
};

/// One 2×2 table: responders `x` and non-responders `y` under two treatments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub x1: u64,
    pub y1: u64,
    pub x2: u64,
    pub y2: u64,
}

impl ContingencyTable {
    pub fn new(x1: u64, y1: u64, x2: u64, y2: u64) -> Self {
        Self { x1, y1, x2, y2 }
    }

    pub fn n1(&self) -> u64 {
        self.x1 + self.y1
    }

    pub fn n2(&self) -> u64 {
        self.x2 + self.y2
    }

    pub fn total(&self) -> u64 {
        self.n1() + self.n2()
    }

    /// Responders over both treatments.
    pub fn responders(&self) -> u64 {
        self.x1 + self.x2
    }
}

/// Alternative hypothesis of Fisher's exact test, as seen from `x1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    Less,
    Greater,
    TwoSided,
}

/// Observed count and null mean of a one-sided test `H0: λ = λ0` vs `λ > λ0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonTestSpec {
    pub n_obs: u64,
    pub lambda0: f64,
}

impl PoissonTestSpec {
    pub fn new(n_obs: u64, lambda0: f64) -> crate::Result<Self> {
        if !(lambda0 > 0.0 && lambda0.is_finite()) {
            return Err(crate::FdrError::InvalidPoisson(format!(
                "lambda0 must be positive, got {lambda0}"
            )));
        }
        Ok(Self { n_obs, lambda0 })
    }
}
