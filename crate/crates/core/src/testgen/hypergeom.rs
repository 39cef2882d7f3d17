use crate::scalar::Scalar;

/// Hypergeometric law of the number of successes among `draws` items taken
/// without replacement from `population` items of which `successes` are
/// successes.
///
/// Point probabilities are built from the mode outwards with the ratio
/// recurrence `P(k+1)/P(k) = (K-k)(n-k) / ((k+1)(N-K-n+k+1))`, then
/// normalised, so the relative error stays at a few ulps per step. Log
/// weights are tracked alongside for masses that underflow.
#[derive(Debug, Clone)]
pub struct Hypergeometric<T> {
    lo: u64,
    hi: u64,
    weights: Vec<T>,
    log_weights: Vec<T>,
    total: T,
}

impl<T: Scalar> Hypergeometric<T> {
    /// Panics if `successes > population` or `draws > population`.
    pub fn new(population: u64, successes: u64, draws: u64) -> Self {
        assert!(successes <= population && draws <= population);
        let failures = population - successes;
        let lo = draws.saturating_sub(failures);
        let hi = draws.min(successes);
        let mode = (((draws + 1) as f64 * (successes + 1) as f64) / (population + 2) as f64).floor()
            as u64;
        let mode = mode.clamp(lo, hi);

        let len = (hi - lo + 1) as usize;
        let mut log_weights = vec![T::zero(); len];
        // P(k+1) / P(k) as (numerator, denominator), both exact integers
        let ratio = |k: u64| -> (f64, f64) {
            let num = (successes - k) as f64 * (draws - k) as f64;
            let den = (k + 1) as f64 * (failures + k + 1 - draws) as f64;
            (num, den)
        };
        let m = (mode - lo) as usize;
        let mut weights = vec![T::one(); len];
        for j in m + 1..len {
            let k = lo + j as u64 - 1;
            let (num, den) = ratio(k);
            weights[j] = weights[j - 1] * T::lit(num) / T::lit(den);
            log_weights[j] = log_weights[j - 1] + T::lit(num / den).ln();
        }
        for j in (0..m).rev() {
            let k = lo + j as u64;
            let (num, den) = ratio(k);
            weights[j] = weights[j + 1] * T::lit(den) / T::lit(num);
            log_weights[j] = log_weights[j + 1] - T::lit(num / den).ln();
        }
        // Products are more accurate than summed logs; logs only cover
        // weights whose product underflowed.
        let floor = T::min_positive_value() * T::lit(1e30);
        for (w, lw) in weights.iter().zip(log_weights.iter_mut()) {
            if *w > floor {
                *lw = w.ln();
            }
        }

        let mut sorted = weights.clone();
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let total = sorted.into_iter().fold(T::zero(), |acc, w| acc + w);

        Self {
            lo,
            hi,
            weights,
            log_weights,
            total,
        }
    }

    /// Smallest attainable value.
    pub fn lo(&self) -> u64 {
        self.lo
    }

    /// Largest attainable value.
    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn log_pmf(&self, k: u64) -> T {
        if k < self.lo || k > self.hi {
            return T::neg_infinity();
        }
        self.log_weights[(k - self.lo) as usize] - self.total.ln()
    }

    /// Unnormalised point masses, mode scaled to 1, indexed from `lo`.
    pub(crate) fn relative_weights(&self) -> &[T] {
        &self.weights
    }

    /// Normalised point masses indexed from `lo`.
    pub fn pmf_vec(&self) -> Vec<T> {
        self.weights.iter().map(|&w| w / self.total).collect()
    }
}

/// `log P(X = k)`, or `-inf` outside the support.
pub fn hypergeom_log_pmf<T: Scalar>(population: u64, successes: u64, draws: u64, k: u64) -> T {
    if successes > population || draws > population {
        return T::neg_infinity();
    }
    Hypergeometric::<T>::new(population, successes, draws).log_pmf(k)
}
