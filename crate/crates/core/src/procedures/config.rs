use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FdrError, Result};
use crate::scalar::Scalar;

/// 256 MiB, the default size of one materialised column block.
pub const DEFAULT_CHUNK_BUDGET: usize = 256 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Discrete Benjamini-Hochberg.
    Dbh,
    /// Adaptive discrete Benjamini-Hochberg.
    Adbh,
    /// Discrete Blanchard-Roquain with parameter lambda.
    Dbr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "su")]
    StepUp,
    #[serde(rename = "sd")]
    StepDown,
}

/// The five concrete procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Procedure {
    DbhSu,
    DbhSd,
    AdbhSu,
    AdbhSd,
    Dbr,
}

impl Procedure {
    pub const ALL: [Procedure; 5] = [
        Procedure::DbhSu,
        Procedure::DbhSd,
        Procedure::AdbhSu,
        Procedure::AdbhSd,
        Procedure::Dbr,
    ];

    pub fn method(self) -> Method {
        match self {
            Procedure::DbhSu | Procedure::DbhSd => Method::Dbh,
            Procedure::AdbhSu | Procedure::AdbhSd => Method::Adbh,
            Procedure::Dbr => Method::Dbr,
        }
    }

    /// Crossing rule. DBR has no direction of its own and crosses step-down.
    pub fn direction(self) -> Direction {
        match self {
            Procedure::DbhSu | Procedure::AdbhSu => Direction::StepUp,
            _ => Direction::StepDown,
        }
    }

    pub fn is_adaptive(self) -> bool {
        matches!(self, Procedure::AdbhSu | Procedure::AdbhSd)
    }

    /// Whether adjusted p-values are reported.
    pub fn reports_adjusted(self) -> bool {
        self.direction() == Direction::StepDown
    }

    pub fn label(self) -> &'static str {
        match self {
            Procedure::DbhSu => "DBH-SU",
            Procedure::DbhSd => "DBH-SD",
            Procedure::AdbhSu => "A-DBH-SU",
            Procedure::AdbhSd => "A-DBH-SD",
            Procedure::Dbr => "DBR",
        }
    }

    /// Lower-case identifier used in file headers.
    pub fn slug(self) -> &'static str {
        match self {
            Procedure::DbhSu => "dbh_su",
            Procedure::DbhSd => "dbh_sd",
            Procedure::AdbhSu => "adbh_su",
            Procedure::AdbhSd => "adbh_sd",
            Procedure::Dbr => "dbr",
        }
    }
}

impl fmt::Display for Procedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Procedure {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let norm = s.to_ascii_lowercase().replace(['_', ' '], "-");
        Ok(match norm.as_str() {
            "dbh-su" => Procedure::DbhSu,
            "dbh-sd" => Procedure::DbhSd,
            "adbh-su" | "a-dbh-su" => Procedure::AdbhSu,
            "adbh-sd" | "a-dbh-sd" => Procedure::AdbhSd,
            "dbr" => Procedure::Dbr,
            _ => return Err(format!("unknown procedure '{s}'")),
        })
    }
}

/// Everything a run needs besides the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcedureConfig<T> {
    pub method: Method,
    /// Ignored for DBR.
    pub direction: Direction,
    pub alpha: T,
    /// Only read by DBR.
    pub lambda: Option<T>,
    pub want_critical_values: bool,
    /// Upper bound for one materialised block of the adaptive kernels.
    pub chunk_budget_bytes: usize,
}

impl<T: Scalar> Default for ProcedureConfig<T> {
    fn default() -> Self {
        Self {
            method: Method::Dbh,
            direction: Direction::StepDown,
            alpha: T::lit(0.05),
            lambda: Some(T::lit(0.05)),
            want_critical_values: false,
            chunk_budget_bytes: DEFAULT_CHUNK_BUDGET,
        }
    }
}

impl<T: Scalar> ProcedureConfig<T> {
    pub fn new(method: Method, direction: Direction) -> Self {
        Self {
            method,
            direction,
            ..Self::default()
        }
    }

    pub fn for_procedure(procedure: Procedure) -> Self {
        Self::new(procedure.method(), procedure.direction())
    }

    pub fn dbh(direction: Direction) -> Self {
        Self::new(Method::Dbh, direction)
    }

    pub fn adbh(direction: Direction) -> Self {
        Self::new(Method::Adbh, direction)
    }

    pub fn dbr(lambda: T) -> Self {
        Self {
            lambda: Some(lambda),
            ..Self::new(Method::Dbr, Direction::StepDown)
        }
    }

    pub fn with_alpha(mut self, alpha: T) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_lambda(mut self, lambda: T) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_critical_values(mut self, on: bool) -> Self {
        self.want_critical_values = on;
        self
    }

    pub fn with_chunk_budget(mut self, bytes: usize) -> Self {
        self.chunk_budget_bytes = bytes;
        self
    }

    pub fn procedure(&self) -> Procedure {
        match (self.method, self.direction) {
            (Method::Dbh, Direction::StepUp) => Procedure::DbhSu,
            (Method::Dbh, Direction::StepDown) => Procedure::DbhSd,
            (Method::Adbh, Direction::StepUp) => Procedure::AdbhSu,
            (Method::Adbh, Direction::StepDown) => Procedure::AdbhSd,
            (Method::Dbr, _) => Procedure::Dbr,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |name: &'static str, v: T| {
            if v > T::zero() && v < T::one() {
                Ok(())
            } else {
                Err(FdrError::InvalidLevel {
                    name,
                    value: v.to_f64().unwrap_or(f64::NAN),
                })
            }
        };
        open_unit("alpha", self.alpha)?;
        if self.method == Method::Dbr {
            open_unit("lambda", self.lambda.ok_or(FdrError::MissingLambda)?)?;
        }
        if self.chunk_budget_bytes == 0 {
            return Err(FdrError::InvalidBudget);
        }
        Ok(())
    }

    /// DBR's lambda; callers validate first.
    pub(crate) fn lambda_or_default(&self) -> T {
        self.lambda.unwrap_or_else(|| T::lit(0.05))
    }
}
