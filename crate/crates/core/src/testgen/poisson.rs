use rayon::prelude::*;
use serde::Serialize;

use super::PoissonTestSpec;
use crate::scalar::{KahanSum, Scalar};
use crate::stepdist::PValueSupport;

/// Poisson law with mean `lambda`. Computations are carried out in `f64`
/// log space.
#[derive(Debug, Clone, Copy)]
pub struct Poisson {
    lambda: f64,
}

impl Poisson {
    pub fn new(lambda: f64) -> Self {
        assert!(lambda > 0.0, "Poisson mean must be positive");
        Self { lambda }
    }

    /// `log P(N = j)`.
    pub fn log_pmf(&self, j: u64) -> f64 {
        let mut log_fact = 0.0;
        for i in 2..=j {
            log_fact += (i as f64).ln();
        }
        -self.lambda + j as f64 * self.lambda.ln() - log_fact
    }

    /// Point masses `P(N = 0..=last)`, by the log-space recurrence.
    fn pmf_upto(&self, last: u64) -> Vec<f64> {
        let ln_lambda = self.lambda.ln();
        let mut log_p = -self.lambda;
        let mut out = Vec::with_capacity(last as usize + 1);
        out.push(log_p.exp());
        for j in 1..=last {
            log_p += ln_lambda - (j as f64).ln();
            out.push(log_p.exp());
        }
        out
    }

    /// Survival function `P(N > n)`; equals one for `n < 0`.
    pub fn sf(&self, n: i64) -> f64 {
        if n < 0 {
            return 1.0;
        }
        let n = n as u64;
        if (n as f64) + 1.0 <= self.lambda {
            // Below the mean the lower tail is the smaller one.
            let mut sum = KahanSum::new();
            for p in self.pmf_upto(n) {
                sum.add(p);
            }
            return (1.0 - sum.value()).max(0.0);
        }
        // Collect upper-tail terms until they stop mattering, then add them
        // smallest first.
        let ln_lambda = self.lambda.ln();
        let mut log_p = self.log_pmf(n + 1);
        let mut terms = vec![log_p.exp()];
        let mut j = n + 1;
        let mut running = terms[0];
        loop {
            j += 1;
            log_p += ln_lambda - (j as f64).ln();
            let term = log_p.exp();
            if term <= running * 1e-20 || term == 0.0 {
                break;
            }
            running += term;
            terms.push(term);
        }
        let mut sum = KahanSum::new();
        for &t in terms.iter().rev() {
            sum.add(t);
        }
        sum.value()
    }

    /// Generalised inverse of the survival function:
    /// `min { n >= 0 : P(N > n) <= p }`.
    pub fn isf(&self, p: f64) -> u64 {
        let mut n = 0u64;
        while self.sf(n as i64) > p {
            n += 1;
        }
        n
    }
}

/// Truncation point for infinite Poisson supports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonTruncation {
    /// `(α/m) / (1 + α/m)`
    pub y_min: f64,
    /// Per test: survival quantile of `y_min`, plus one.
    pub n_max: Vec<u64>,
    /// Smallest retained atom over all tests.
    pub s_min: f64,
}

/// Chooses per-test truncation points so that every atom at or below the
/// smallest possible first critical value is retained.
pub fn poisson_truncation(specs: &[PoissonTestSpec], alpha: f64) -> PoissonTruncation {
    let m = specs.len().max(1) as f64;
    let y_min = (alpha / m) / (1.0 + alpha / m);
    let n_max: Vec<u64> = specs
        .iter()
        .map(|s| Poisson::new(s.lambda0).isf(y_min) + 1)
        .collect();
    let s_min = specs
        .iter()
        .zip(&n_max)
        .map(|(s, &n)| Poisson::new(s.lambda0).sf(n as i64 - 1))
        .fold(f64::INFINITY, f64::min);
    PoissonTruncation {
        y_min,
        n_max,
        s_min,
    }
}

/// Raw p-value `P(N >= n_obs)` and the truncated support
/// `{ P(N >= n) : n = 0..=n_max }`.
pub fn poisson_support<T: Scalar>(spec: &PoissonTestSpec, n_max: u64) -> (T, PValueSupport<T>) {
    let dist = Poisson::new(spec.lambda0);
    let raw = T::lit(dist.sf(spec.n_obs as i64 - 1));
    let atoms = (0..=n_max).map(|n| T::lit(dist.sf(n as i64 - 1)));
    let support = PValueSupport::new(atoms).expect("survival probabilities lie in (0,1]");
    (raw, support)
}

/// Truncates at level `alpha` and builds every test's support.
pub fn poisson_supports<T: Scalar>(
    specs: &[PoissonTestSpec],
    alpha: f64,
) -> (Vec<T>, Vec<PValueSupport<T>>, PoissonTruncation) {
    let trunc = poisson_truncation(specs, alpha);
    let (raw, supports) = specs
        .par_iter()
        .zip(trunc.n_max.par_iter())
        .map(|(s, &n)| poisson_support(s, n))
        .unzip();
    (raw, supports, trunc)
}
