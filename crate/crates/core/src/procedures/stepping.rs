//! Crossing rules, sorting and adjusted p-values.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Step-up: the last `k` with `values[k-1] <= thresholds[k-1]`, or 0.
pub fn step_up_cross<T: Scalar>(values: &[T], thresholds: &[T]) -> usize {
    debug_assert_eq!(values.len(), thresholds.len());
    values
        .iter()
        .zip(thresholds)
        .rposition(|(p, t)| p <= t)
        .map_or(0, |i| i + 1)
}

/// Step-down: the length of the longest prefix with
/// `values[k-1] <= thresholds[k-1]`.
pub fn step_down_cross<T: Scalar>(values: &[T], thresholds: &[T]) -> usize {
    debug_assert_eq!(values.len(), thresholds.len());
    values
        .iter()
        .zip(thresholds)
        .position(|(p, t)| !(p <= t))
        .unwrap_or(values.len())
}

/// `α·k/m` for `k = 1..=m`.
pub fn bh_thresholds<T: Scalar>(alpha: T, m: usize) -> Vec<T> {
    let mt = T::count(m);
    (1..=m).map(|k| alpha * T::count(k) / mt).collect()
}

/// Step-down adjusted p-values `max_{l<=k} min(1, m/l · p'_l)`, in rank
/// order.
pub fn adjust_sd<T: Scalar>(transformed: &[T]) -> Vec<T> {
    let mt = T::count(transformed.len());
    let mut running = T::zero();
    transformed
        .iter()
        .enumerate()
        .map(|(l, &p)| {
            let scaled = (mt / T::count(l + 1) * p).min(T::one());
            running = running.max(scaled);
            running
        })
        .collect()
}

/// Stable ascending order of p-values; ties keep their original order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortPermutation {
    order: Vec<usize>,
}

impl SortPermutation {
    pub fn from_values<T: Scalar>(values: &[T]) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| {
            values[a]
                .partial_cmp(&values[b])
                .expect("NaN p-value")
                .then(a.cmp(&b))
        });
        Self { order }
    }

    /// Original index of rank `k` (zero-based).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn apply<T: Copy>(&self, values: &[T]) -> Vec<T> {
        self.order.iter().map(|&i| values[i]).collect()
    }

    /// Moves rank-ordered values back to original positions.
    pub fn scatter<T: Copy + Default>(&self, ranked: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); ranked.len()];
        for (&i, &v) in self.order.iter().zip(ranked) {
            out[i] = v;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_up_examples() {
        assert_eq!(step_up_cross(&[0.1, 0.2], &[0.05, 0.25]), 2);
        assert_eq!(step_up_cross(&[0.1, 0.2], &[0.05, 0.15]), 0);
        assert_eq!(step_up_cross(&[0.01], &[0.01]), 1);
    }

    #[test]
    fn step_down_examples() {
        assert_eq!(step_down_cross(&[0.1, 0.2], &[0.05, 0.25]), 0);
        assert_eq!(step_down_cross(&[0.04, 0.2, 0.21], &[0.05, 0.25, 0.22]), 3);
        let raw = [0.04, 0.3, 0.1];
        let sorted = SortPermutation::from_values(&raw).apply(&raw);
        assert_eq!(sorted, vec![0.04, 0.1, 0.3]);
        assert_eq!(step_down_cross(&[0.04, 0.3, 0.1], &[0.05, 0.25, 0.3]), 1);
    }

    #[test]
    fn infinite_values_never_cross() {
        assert_eq!(step_up_cross(&[f64::INFINITY], &[1.0]), 0);
        assert_eq!(step_down_cross(&[f64::INFINITY], &[1.0]), 0);
    }

    #[test]
    fn adjust_sd_examples() {
        assert_eq!(adjust_sd(&[0.0, 0.0, 0.0]), vec![0.0, 0.0, 0.0]);
        let adj = adjust_sd(&[0.01, 0.005, f64::INFINITY]);
        assert_eq!(adj, vec![0.03, 0.03, 1.0]);
    }

    #[test]
    fn permutation_is_stable() {
        let p = SortPermutation::from_values(&[0.3, 0.1, 0.3, 0.1]);
        assert_eq!(p.order(), &[1, 3, 0, 2]);
        let ranked = p.apply(&[10, 11, 12, 13]);
        assert_eq!(p.scatter(&ranked), vec![10, 11, 12, 13]);
    }
}
