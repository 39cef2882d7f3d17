use rayon::prelude::*;

use super::hypergeom::Hypergeometric;
use super::{Alternative, ContingencyTable};
use crate::error::{FdrError, Result};
use crate::scalar::Scalar;
use crate::stepdist::PValueSupport;

/// Relative slack when comparing point probabilities in the two-sided test.
const TWO_SIDED_SLACK: f64 = 1e-7;

/// Raw p-value of Fisher's exact test and the set of all p-values attainable
/// under the table's fixed margins.
///
/// The statistic is `x1`, hypergeometric with population `n`, `x1 + x2`
/// successes and `n1` draws. `Greater` uses `P(X >= x1)`, `Less` uses
/// `P(X <= x1)`, and `TwoSided` sums every point mass not exceeding
/// `(1 + 1e-7) · P(X = x1)`.
pub fn fisher_support<T: Scalar>(
    table: &ContingencyTable,
    alternative: Alternative,
) -> (T, PValueSupport<T>) {
    let dist = Hypergeometric::<T>::new(table.total(), table.responders(), table.n1());
    let weights = dist.relative_weights();
    let pvalues = match alternative {
        Alternative::Greater => upper_tails(weights),
        Alternative::Less => {
            let mut rev: Vec<T> = weights.iter().rev().copied().collect();
            rev = upper_tails(&rev);
            rev.reverse();
            rev
        }
        Alternative::TwoSided => two_sided(weights),
    };
    let raw = pvalues[(table.x1 - dist.lo()) as usize];
    let support = PValueSupport::new(pvalues).expect("tail probabilities lie in (0,1]");
    (raw, support)
}

/// `P(X >= k)` for every `k`, accumulated from the far upper tail inwards and
/// normalised by the full sum so the first entry is exactly one.
fn upper_tails<T: Scalar>(weights: &[T]) -> Vec<T> {
    let mut tails = vec![T::zero(); weights.len()];
    let mut acc = T::zero();
    for (slot, &w) in tails.iter_mut().zip(weights).rev() {
        acc = acc + w;
        *slot = acc;
    }
    let total = acc;
    tails.iter().map(|&t| t / total).collect()
}

fn two_sided<T: Scalar>(weights: &[T]) -> Vec<T> {
    let mut sorted = weights.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let mut cumulative = Vec::with_capacity(sorted.len());
    let mut acc = T::zero();
    for &w in &sorted {
        acc = acc + w;
        cumulative.push(acc);
    }
    let total = acc;
    let slack = T::one() + T::lit(TWO_SIDED_SLACK);
    weights
        .iter()
        .map(|&w| {
            let bound = w * slack;
            let n = sorted.partition_point(|&s| s <= bound);
            cumulative[n - 1] / total
        })
        .collect()
}

/// [`fisher_support`] over many tables, in parallel, order preserved.
pub fn fisher_supports<T: Scalar>(
    tables: &[ContingencyTable],
    alternative: Alternative,
) -> (Vec<T>, Vec<PValueSupport<T>>) {
    tables
        .par_iter()
        .map(|t| fisher_support(t, alternative))
        .unzip()
}

/// Pools per-unit `(events of interest, other events)` counts into
/// unit-versus-rest tables.
pub fn hg2011_to_tables(counts: &[(u64, u64)]) -> Result<Vec<ContingencyTable>> {
    if counts.len() < 2 {
        return Err(FdrError::TooFewRows);
    }
    let (sum_a, sum_b) = counts
        .iter()
        .fold((0u64, 0u64), |(a, b), &(x, y)| (a + x, b + y));
    Ok(counts
        .iter()
        .map(|&(a, b)| ContingencyTable::new(a, b, sum_a - a, sum_b - b))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testgen::hypergeom_log_pmf;

    pub(crate) const TOY: [(u64, u64, u64, u64); 9] = [
        (4, 144, 0, 132),
        (2, 146, 0, 132),
        (2, 146, 1, 131),
        (14, 134, 3, 129),
        (6, 142, 2, 130),
        (9, 139, 1, 131),
        (4, 144, 2, 130),
        (0, 148, 2, 130),
        (1, 147, 2, 130),
    ];

    fn table(i: usize) -> ContingencyTable {
        let (a, b, c, d) = TOY[i];
        ContingencyTable::new(a, b, c, d)
    }

    #[test]
    fn toy_row_one_support() {
        let (raw, support) = fisher_support::<f64>(&table(0), Alternative::TwoSided);
        let expected = [0.04820493, 0.12476691, 0.34598645, 0.62477763, 1.0];
        assert_eq!(support.len(), expected.len());
        for (a, e) in support.atoms().iter().zip(expected) {
            assert!((a - e).abs() < 1e-7, "{a} vs {e}");
        }
        assert!(support.atoms().contains(&raw));
        assert_eq!(support.max_atom(), 1.0);
    }

    #[test]
    fn toy_row_five_support() {
        let (_, support) = fisher_support::<f64>(&table(4), Alternative::TwoSided);
        let expected = [
            0.002173856,
            0.007733719,
            0.028324482,
            0.069964309,
            0.154043258,
            0.288492981,
            0.481808361,
            0.726262402,
            1.0,
        ];
        assert_eq!(support.len(), 9);
        for (a, e) in support.atoms().iter().zip(expected) {
            assert!((a - e).abs() < 1e-8, "{a} vs {e}");
        }
    }

    #[test]
    fn zero_margin_is_degenerate() {
        for alt in [
            Alternative::Less,
            Alternative::Greater,
            Alternative::TwoSided,
        ] {
            let (raw, s) = fisher_support::<f64>(&ContingencyTable::new(0, 5, 0, 7), alt);
            assert_eq!(raw, 1.0);
            assert_eq!(s.atoms(), &[1.0]);
            let (raw, s) = fisher_support::<f64>(&ContingencyTable::new(0, 0, 0, 0), alt);
            assert_eq!(raw, 1.0);
            assert_eq!(s.atoms(), &[1.0]);
        }
    }

    #[test]
    fn one_sided_supports_are_tail_sums() {
        let t = ContingencyTable::new(3, 10, 1, 12);
        let (n, s, d) = (t.total(), t.responders(), t.n1());
        let pmf: Vec<f64> = (0..=4)
            .map(|k| hypergeom_log_pmf::<f64>(n, s, d, k).exp())
            .collect();
        let (raw_g, sup_g) = fisher_support::<f64>(&t, Alternative::Greater);
        let (raw_l, sup_l) = fisher_support::<f64>(&t, Alternative::Less);
        let greater: f64 = pmf[3..].iter().sum();
        let less: f64 = pmf[..=3].iter().sum();
        assert!((raw_g - greater).abs() < 1e-12);
        assert!((raw_l - less).abs() < 1e-12);
        assert_eq!(sup_g.len(), 5);
        assert_eq!(sup_l.len(), 5);
        for k in 0..=4usize {
            let g: f64 = pmf[k..].iter().sum();
            assert!(sup_g.atoms().iter().any(|a| (a - g).abs() < 1e-12));
        }
    }

    #[test]
    fn two_sided_dominates_observed_tail() {
        let mut tables: Vec<_> = (0..9).map(table).collect();
        tables.push(ContingencyTable::new(0, 10, 9, 1));
        tables.push(ContingencyTable::new(5, 5, 5, 5));
        for (i, t) in tables.iter().enumerate() {
            let (two, _) = fisher_support::<f64>(t, Alternative::TwoSided);
            let (g, _) = fisher_support::<f64>(t, Alternative::Greater);
            let (l, _) = fisher_support::<f64>(t, Alternative::Less);
            // the tail on the observed side holds no mass above P(X = x1)
            assert!(two >= g.min(l) - 1e-12, "row {i}");
            assert!(two <= 1.0);
        }
    }

    #[test]
    fn pooling_examples() {
        assert_eq!(
            hg2011_to_tables(&[(2, 8), (1, 9)]).unwrap(),
            vec![
                ContingencyTable::new(2, 8, 1, 9),
                ContingencyTable::new(1, 9, 2, 8)
            ]
        );
        assert_eq!(
            hg2011_to_tables(&[(1, 0), (0, 1), (0, 1)]).unwrap()[0],
            ContingencyTable::new(1, 0, 0, 2)
        );
        assert_eq!(hg2011_to_tables(&[(1, 2)]), Err(FdrError::TooFewRows));
    }

    #[test]
    fn batch_preserves_order() {
        let tables: Vec<_> = (0..9).map(table).collect();
        let (raw, sup) = fisher_supports::<f64>(&tables, Alternative::TwoSided);
        for (i, t) in tables.iter().enumerate() {
            let (r, s) = fisher_support::<f64>(t, Alternative::TwoSided);
            assert_eq!(raw[i], r);
            assert_eq!(sup[i], s);
        }
    }
}
