use crate::procedures::stepping::SortPermutation;
use crate::scalar::Scalar;

/// Classical Benjamini-Hochberg adjusted p-values
/// `min_{l>=k} min(1, m/l · p_(l))`, in original order.
pub fn bh_adjust<T: Scalar>(raw: &[T]) -> Vec<T> {
    let m = raw.len();
    let mt = T::count(m);
    let perm = SortPermutation::from_values(raw);
    let sorted = perm.apply(raw);
    let mut ranked = vec![T::zero(); m];
    let mut running = T::one();
    for l in (0..m).rev() {
        running = running.min(mt / T::count(l + 1) * sorted[l]);
        ranked[l] = running;
    }
    perm.scatter(&ranked)
}

/// Number of BH rejections at level `alpha`.
pub fn bh_rejections<T: Scalar>(raw: &[T], alpha: T) -> Vec<usize> {
    bh_adjust(raw)
        .iter()
        .enumerate()
        .filter(|(_, &q)| q <= alpha)
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_input() {
        assert_eq!(bh_adjust(&[0.2; 5]), vec![0.2; 5]);
    }

    #[test]
    fn small_case_by_hand() {
        let adj = bh_adjust(&[0.01, 0.04, 0.03, 0.5]);
        let expected: [f64; 4] = [0.04, 0.04 * 4.0 / 3.0, 0.04 * 4.0 / 3.0, 0.5];
        for (a, e) in adj.iter().zip(expected) {
            assert!((a - e).abs() < 1e-15);
        }
        assert_eq!(bh_rejections(&[0.01, 0.04, 0.03, 0.5], 0.05), vec![0]);
        assert_eq!(bh_rejections(&[0.01, 0.04, 0.03, 0.5], 0.06), vec![0, 1, 2]);
    }

    #[test]
    fn capped_at_one() {
        assert_eq!(bh_adjust(&[1.0, 0.9]), vec![1.0, 1.0]);
    }
}
