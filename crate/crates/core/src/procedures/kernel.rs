//! Transformation and critical value kernels.
//!
//! Every procedure is driven by the values `ξ_k(t)` and the comparison
//! `ξ_k(t) <= α·k/m`. Both the transformed p-value path and the critical
//! value path evaluate `ξ_k` through the same arithmetic, so the two paths
//! agree bit for bit:
//!
//! * non-adaptive sums run over the hypotheses in ascending index order,
//! * order-statistic sums sort a column in descending order and accumulate
//!   from the largest term,
//! * for fixed `k` the comparison is monotone in `t`, and for fixed `t` it is
//!   monotone in `k`, so the feasible sets are searched by bisection.
//!
//! Non-adaptive kernels stream a running sum per evaluation point and never
//! materialise the `m × |A|` matrix. Adaptive kernels materialise column
//! blocks bounded by the configured byte budget.

use rayon::prelude::*;

use super::bounds::tau_min_threshold;
use super::config::{Direction, Procedure, ProcedureConfig};
use crate::scalar::Scalar;
use crate::stepdist::{MergedSupport, PValueSupport};

/// Evaluation points handled by one streaming task.
const STREAM_CHUNK: usize = 2048;

#[derive(Clone, Copy)]
enum Terms<'a, T> {
    /// `F_i(t) / (1 - F_i(t))`
    Ratio,
    /// `F_i(t) / c_i` with `c_i = 1 - F_i(τ_m)`
    RatioFixed(&'a [T]),
    /// `F_i(t)`
    Plain,
}

#[inline]
fn ratio<T: Scalar>(f: T, complement: T) -> T {
    if complement <= T::zero() {
        T::infinity()
    } else {
        f / complement
    }
}

/// Sorts descending and replaces the column by its prefix sums, so that
/// `col[r - 1]` is the sum of the `r` largest terms and `col[0]` the maximum.
fn prefix_desc<T: Scalar>(col: &mut [T]) {
    col.sort_unstable_by(|a, b| b.partial_cmp(a).expect("NaN term"));
    for r in 1..col.len() {
        col[r] = col[r - 1] + col[r];
    }
}

/// Index of the largest element satisfying a predicate that holds on a
/// prefix of `atoms`. The search starts at `start` and falls back to the
/// atoms below it when `start` itself fails.
pub(crate) fn max_satisfying<T: Scalar>(
    atoms: &[T],
    start: usize,
    pred: impl Fn(T) -> bool,
) -> Option<usize> {
    if atoms.is_empty() {
        return None;
    }
    let start = start.min(atoms.len() - 1);
    let (base, slice) = if pred(atoms[start]) {
        (start, &atoms[start..])
    } else {
        (0, &atoms[..start])
    };
    match slice.partition_point(|&t| pred(t)) {
        0 => None,
        n => Some(base + n - 1),
    }
}

/// `τ_m` of the step-up procedures together with the fixed denominators.
pub(crate) struct StepUpContext<T> {
    pub tau_m: T,
    index: usize,
    complements: Vec<T>,
}

pub(crate) struct Kernel<'a, T: Scalar> {
    supports: &'a [PValueSupport<T>],
    procedure: Procedure,
    m: usize,
    mt: T,
    alpha: T,
    lambda: T,
    budget: usize,
}

impl<'a, T: Scalar> Kernel<'a, T> {
    pub(crate) fn new(supports: &'a [PValueSupport<T>], config: &ProcedureConfig<T>) -> Self {
        let m = supports.len();
        Self {
            supports,
            procedure: config.procedure(),
            m,
            mt: T::count(m),
            alpha: config.alpha,
            lambda: config.lambda_or_default(),
            budget: config.chunk_budget_bytes,
        }
    }

    #[inline]
    pub(crate) fn bh(&self, k: usize) -> T {
        self.alpha * T::count(k) / self.mt
    }

    fn threshold(&self, k: usize, tau_m: T) -> T {
        tau_min_threshold(self.procedure, k, self.m, self.alpha, self.lambda, tau_m)
    }

    #[inline]
    fn term(&self, f: T, i: usize, terms: Terms<'_, T>) -> T {
        match terms {
            Terms::Ratio => ratio(f, T::one() - f),
            Terms::RatioFixed(c) => ratio(f, c[i]),
            Terms::Plain => f,
        }
    }

    fn column(&self, t: T, terms: Terms<'_, T>, out: &mut [T]) {
        for (i, (slot, s)) in out.iter_mut().zip(self.supports).enumerate() {
            *slot = self.term(s.cdf(t), i, terms);
        }
    }

    fn sum_at(&self, t: T, terms: Terms<'_, T>) -> T {
        self.supports
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, s)| acc + self.term(s.cdf(t), i, terms))
    }

    fn max_at(&self, t: T, terms: Terms<'_, T>) -> T {
        self.supports
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, s)| {
                acc.max(self.term(s.cdf(t), i, terms))
            })
    }

    /// `ξ_k` read off a column of descending prefix sums.
    #[inline]
    fn xi_top(&self, prefix: &[T], k: usize) -> T {
        let partial = prefix[self.m - k];
        match self.procedure {
            Procedure::Dbr => {
                if prefix[0] > self.lambda {
                    T::one()
                } else {
                    partial / (self.mt * (T::one() - self.lambda))
                }
            }
            _ => partial / self.mt,
        }
    }

    fn xi_top_at(&self, t: T, k: usize, terms: Terms<'_, T>) -> T {
        if k == self.m {
            // a single order statistic: the maximum
            let max = self.max_at(t, terms);
            return match self.procedure {
                Procedure::Dbr if max > self.lambda => T::one(),
                Procedure::Dbr => max / (self.mt * (T::one() - self.lambda)),
                _ => max / self.mt,
            };
        }
        let mut col = vec![T::zero(); self.m];
        self.column(t, terms, &mut col);
        prefix_desc(&mut col);
        self.xi_top(&col, k)
    }

    /// `ξ_k(t)` for `k` in `1..=m`. Step-up procedures need their context.
    pub(crate) fn xi_at(&self, t: T, k: usize, su: Option<&StepUpContext<T>>) -> T {
        let mt = self.mt;
        match self.procedure {
            Procedure::DbhSd => self.sum_at(t, Terms::Ratio) / mt,
            Procedure::AdbhSd => self.xi_top_at(t, k, Terms::Ratio),
            Procedure::Dbr => self.xi_top_at(t, k, Terms::Plain),
            Procedure::DbhSu | Procedure::AdbhSu if k == self.m => {
                self.sum_at(t, Terms::Ratio) / mt
            }
            Procedure::DbhSu | Procedure::AdbhSu => match su {
                Some(ctx) if t <= ctx.tau_m => {
                    let terms = Terms::RatioFixed(&ctx.complements);
                    if self.procedure == Procedure::DbhSu {
                        self.sum_at(t, terms) / mt
                    } else {
                        self.xi_top_at(t, k, terms)
                    }
                }
                _ => T::one(),
            },
        }
    }

    /// Finds `τ_m` of the step-up procedures on `A ∩ [τ_m^min, 1]`.
    pub(crate) fn step_up_context(&self, merged: &MergedSupport<T>) -> Option<StepUpContext<T>> {
        let atoms = merged.atoms();
        let start = merged.floor_index(self.threshold(self.m, T::zero()));
        let bound = self.bh(self.m);
        let index = max_satisfying(atoms, start, |t| {
            self.sum_at(t, Terms::Ratio) / self.mt <= bound
        })?;
        let tau_m = atoms[index];
        let complements = self
            .supports
            .iter()
            .map(|s| T::one() - s.cdf(tau_m))
            .collect();
        Some(StepUpContext {
            tau_m,
            index,
            complements,
        })
    }

    /// Sweeps column blocks of at most `budget` bytes. Each column is filled,
    /// turned into descending prefix sums and handed to `eval`; results reach
    /// `sink` in column order.
    fn sweep<R: Send>(
        &self,
        ts: &[T],
        terms: Terms<'_, T>,
        eval: impl Fn(usize, &[T]) -> R + Sync,
        mut sink: impl FnMut(usize, R),
    ) {
        if ts.is_empty() {
            return;
        }
        let column_bytes = self.m * std::mem::size_of::<T>();
        let cols = (self.budget / column_bytes).max(1).min(ts.len());
        let mut block = vec![T::zero(); cols * self.m];
        for (b, chunk) in ts.chunks(cols).enumerate() {
            let offset = b * cols;
            let used = &mut block[..chunk.len() * self.m];
            let results: Vec<R> = used
                .par_chunks_mut(self.m)
                .zip(chunk.par_iter())
                .enumerate()
                .map(|(j, (col, &t))| {
                    self.column(t, terms, col);
                    prefix_desc(col);
                    eval(offset + j, col)
                })
                .collect();
            for (j, r) in results.into_iter().enumerate() {
                sink(offset + j, r);
            }
        }
    }

    /// Running sums `Σ_i term_i(t)` at ascending points, accumulated over `i`
    /// in index order. Each support is merged against a chunk of points.
    fn stream_sums(&self, ts: &[T], terms: Terms<'_, T>) -> Vec<T> {
        if ts.is_empty() {
            return Vec::new();
        }
        let mut acc = vec![T::zero(); ts.len()];
        acc.par_chunks_mut(STREAM_CHUNK)
            .zip(ts.par_chunks(STREAM_CHUNK))
            .for_each(|(acc, points)| {
                for (i, s) in self.supports.iter().enumerate() {
                    let atoms = s.atoms();
                    let mut idx = atoms.partition_point(|&a| a <= points[0]);
                    let mut f = if idx == 0 { T::zero() } else { atoms[idx - 1] };
                    for (slot, &t) in acc.iter_mut().zip(points) {
                        while idx < atoms.len() && atoms[idx] <= t {
                            f = atoms[idx];
                            idx += 1;
                        }
                        *slot = *slot + self.term(f, i, terms);
                    }
                }
            });
        acc
    }

    /// Smallest `k` in `1..=kmax` passing its condition at a prefix column,
    /// or `kmax + 1`.
    fn first_passing_k(&self, prefix: &[T], kmax: usize) -> usize {
        let (mut lo, mut hi) = (1, kmax + 1);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.xi_top(prefix, mid) <= self.bh(mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    }

    /// Transformed p-values `p'_k = ξ_k(p_(k))` in rank order.
    pub(crate) fn transformed(&self, sorted: &[T], su: Option<&StepUpContext<T>>) -> Vec<T> {
        let m = self.m;
        let mt = self.mt;
        match self.procedure {
            Procedure::DbhSd => self
                .stream_sums(sorted, Terms::Ratio)
                .into_iter()
                .map(|s| s / mt)
                .collect(),
            Procedure::AdbhSd => self.transformed_top(sorted, Terms::Ratio),
            Procedure::Dbr => self.transformed_top(sorted, Terms::Plain),
            Procedure::DbhSu | Procedure::AdbhSu => {
                let mut out = vec![T::one(); m];
                out[m - 1] = self.sum_at(sorted[m - 1], Terms::Ratio) / mt;
                let Some(ctx) = su else { return out };
                let gated = sorted[..m - 1].partition_point(|&t| t <= ctx.tau_m);
                let terms = Terms::RatioFixed(&ctx.complements);
                if self.procedure == Procedure::DbhSu {
                    let sums = self.stream_sums(&sorted[..gated], terms);
                    for (slot, s) in out.iter_mut().zip(sums) {
                        *slot = s / mt;
                    }
                } else {
                    self.sweep(
                        &sorted[..gated],
                        terms,
                        |j, prefix| self.xi_top(prefix, j + 1),
                        |j, v| out[j] = v,
                    );
                }
                out
            }
        }
    }

    fn transformed_top(&self, sorted: &[T], terms: Terms<'_, T>) -> Vec<T> {
        let mut out = vec![T::zero(); self.m];
        self.sweep(
            sorted,
            terms,
            |j, prefix| self.xi_top(prefix, j + 1),
            |j, v| out[j] = v,
        );
        out
    }

    /// Critical values `τ_1..τ_m`; zero where no atom qualifies.
    pub(crate) fn critical_values(
        &self,
        merged: &MergedSupport<T>,
        su: Option<&StepUpContext<T>>,
    ) -> Vec<T> {
        let m = self.m;
        let atoms = merged.atoms();
        let mut tau = vec![T::zero(); m];

        // Last qualifying atom for k = m, and the context for k < m.
        let (top, kmax) = match self.procedure.direction() {
            Direction::StepUp => {
                let Some(ctx) = su else { return tau };
                tau[m - 1] = ctx.tau_m;
                if m == 1 {
                    return tau;
                }
                (ctx.index, m - 1)
            }
            Direction::StepDown => {
                let start = merged.floor_index(self.threshold(m, T::zero()));
                let bound = self.bh(m);
                match max_satisfying(atoms, start, |t| self.xi_at(t, m, None) <= bound) {
                    Some(i) => (i, m),
                    None => return tau,
                }
            }
        };

        let tau_m = atoms[top];
        let start = merged.floor_index(self.threshold(1, tau_m));
        let start = if start <= top && self.xi_at(atoms[start], 1, su) <= self.bh(1) {
            start
        } else {
            0
        };
        let cols = &atoms[start..=top];

        let terms = match (self.procedure, su) {
            (Procedure::Dbr, _) => Terms::Plain,
            (Procedure::DbhSu | Procedure::AdbhSu, Some(ctx)) => {
                Terms::RatioFixed(&ctx.complements)
            }
            _ => Terms::Ratio,
        };

        if self.procedure.is_adaptive() || self.procedure == Procedure::Dbr {
            // best[κ]: last column whose smallest passing k is κ
            let mut best = vec![T::zero(); kmax + 2];
            self.sweep(
                cols,
                terms,
                |_, prefix| self.first_passing_k(prefix, kmax),
                |j, kappa| best[kappa] = cols[j],
            );
            let mut running = T::zero();
            for k in 1..=kmax {
                running = running.max(best[k]);
                tau[k - 1] = running;
            }
        } else {
            let sums = self.stream_sums(cols, terms);
            for k in 1..=kmax {
                let bound = self.bh(k);
                let n = sums.partition_point(|&s| s / self.mt <= bound);
                tau[k - 1] = if n == 0 { T::zero() } else { cols[n - 1] };
            }
        }
        tau
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procedures::config::ProcedureConfig;
    use crate::stepdist::merge_supports;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_supports(rng: &mut ChaCha8Rng, m: usize) -> Vec<PValueSupport<f64>> {
        (0..m)
            .map(|_| {
                let n = rng.random_range(1..12);
                let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(0.001..1.0)).collect();
                if rng.random_bool(0.7) {
                    v.push(1.0);
                }
                PValueSupport::new(v).unwrap()
            })
            .collect()
    }

    #[test]
    fn prefix_columns() {
        let mut col: Vec<f64> = vec![0.1, 0.4, 0.2];
        prefix_desc(&mut col);
        assert_eq!(col[0], 0.4);
        assert!((col[1] - 0.6).abs() < 1e-15);
        assert!((col[2] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn max_satisfying_falls_back_below_start() {
        let atoms = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(max_satisfying(&atoms, 1, |t| t <= 0.35), Some(2));
        assert_eq!(max_satisfying(&atoms, 3, |t| t <= 0.15), Some(0));
        assert_eq!(max_satisfying(&atoms, 2, |t| t <= 0.05), None);
        assert_eq!(max_satisfying(&atoms, 0, |_| true), Some(3));
    }

    #[test]
    fn xi_is_monotone_and_bisection_matches_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let m = rng.random_range(1..15);
            let supports = random_supports(&mut rng, m);
            let merged = merge_supports(&supports);
            for p in Procedure::ALL {
                let config = ProcedureConfig::<f64>::for_procedure(p).with_alpha(0.2);
                let kernel = Kernel::new(&supports, &config);
                let su = kernel.step_up_context(&merged);
                let upper = su.as_ref().map_or(1.0, |c| c.tau_m);
                for k in 1..=m {
                    let values: Vec<f64> = merged
                        .atoms()
                        .iter()
                        .filter(|&&t| k == m || p.direction() == Direction::StepDown || t <= upper)
                        .map(|&t| kernel.xi_at(t, k, su.as_ref()))
                        .collect();
                    // the feasible set is downward closed
                    let pass: Vec<bool> = values.iter().map(|&v| v <= kernel.bh(k)).collect();
                    assert!(pass.windows(2).all(|w| w[0] || !w[1]), "{p} k={k}");
                    if p != Procedure::Dbr {
                        assert!(values.windows(2).all(|w| w[0] <= w[1]), "{p} k={k}");
                    }
                    let scan = merged
                        .atoms()
                        .iter()
                        .rposition(|&t| kernel.xi_at(t, k, su.as_ref()) <= kernel.bh(k));
                    let bisect = max_satisfying(merged.atoms(), 0, |t| {
                        kernel.xi_at(t, k, su.as_ref()) <= kernel.bh(k)
                    });
                    assert_eq!(scan, bisect, "{p} k={k}");
                }
            }
        }
    }

    #[test]
    fn block_size_does_not_change_results() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let supports = random_supports(&mut rng, 40);
        let merged = merge_supports(&supports);
        let mut sorted: Vec<f64> = supports
            .iter()
            .map(|s| s.atoms()[rng.random_range(0..s.len())])
            .collect();
        sorted.sort_by(f64::total_cmp);
        for p in Procedure::ALL {
            let base = ProcedureConfig::<f64>::for_procedure(p).with_alpha(0.3);
            let reference = Kernel::new(&supports, &base);
            let su = reference.step_up_context(&merged);
            let want_t = reference.transformed(&sorted, su.as_ref());
            let want_c = reference.critical_values(&merged, su.as_ref());
            for budget in [1, 8 * 40, 8 * 40 * 3 + 5, 1 << 20] {
                let config = base.with_chunk_budget(budget);
                let kernel = Kernel::new(&supports, &config);
                assert_eq!(kernel.transformed(&sorted, su.as_ref()), want_t, "{p}");
                assert_eq!(kernel.critical_values(&merged, su.as_ref()), want_c, "{p}");
            }
        }
    }
}
