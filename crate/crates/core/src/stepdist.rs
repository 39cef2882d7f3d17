//! Discrete p-value distributions.
//!
//! A discrete p-value whose null CDF `F` satisfies `F(a) = a` at every
//! attainable value `a` is fully described by its set of attainable values:
//! `F(t)` is the largest atom not exceeding `t`, or 0 below the smallest atom.
//! No separate step table is stored.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{FdrError, Result};
use crate::scalar::Scalar;

const ATOM_TOLERANCE: f64 = 1e-12;

fn cmp<T: Scalar>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).expect("NaN in support")
}

/// Index of the first atom strictly greater than `t`.
#[inline]
fn upper_index<T: Scalar>(atoms: &[T], t: T) -> usize {
    atoms.partition_point(|&a| a <= t)
}

/// Floor lookup: largest atom `<= t`, or zero.
#[inline]
pub(crate) fn floor_lookup<T: Scalar>(atoms: &[T], t: T) -> T {
    match upper_index(atoms, t) {
        0 => T::zero(),
        i => atoms[i - 1],
    }
}

/// Sorted set of attainable values of one discrete p-value. Doubles as its
/// null CDF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
#[serde(try_from = "Vec<T>", into = "Vec<T>")]
pub struct PValueSupport<T: Scalar> {
    atoms: Vec<T>,
}

impl<T: Scalar> TryFrom<Vec<T>> for PValueSupport<T> {
    type Error = FdrError;
    fn try_from(values: Vec<T>) -> Result<Self> {
        Self::new(values)
    }
}

impl<T: Scalar> From<PValueSupport<T>> for Vec<T> {
    fn from(s: PValueSupport<T>) -> Self {
        s.atoms
    }
}

impl<T: Scalar> PValueSupport<T> {
    /// Builds a support from arbitrary probabilities.
    ///
    /// Values within `1e-12` below zero are dropped and values within `1e-12`
    /// above one are clamped to one. Duplicates are removed by exact
    /// equality.
    pub fn new<I: IntoIterator<Item = T>>(values: I) -> Result<Self> {
        let tol = T::lit(ATOM_TOLERANCE);
        let one = T::one();
        let mut atoms = Vec::new();
        let mut seen_any = false;
        for v in values {
            seen_any = true;
            if v.is_nan() || v < -tol || v > one + tol {
                return Err(FdrError::AtomOutOfRange(v.to_f64().unwrap_or(f64::NAN)));
            }
            if v <= T::zero() {
                continue;
            }
            atoms.push(if v > one { one } else { v });
        }
        if !seen_any || atoms.is_empty() {
            return Err(FdrError::EmptySupport);
        }
        atoms.sort_unstable_by(cmp);
        atoms.dedup();
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[T] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn min_atom(&self) -> T {
        self.atoms[0]
    }

    pub fn max_atom(&self) -> T {
        self.atoms[self.atoms.len() - 1]
    }

    /// `F(t)`: the largest atom `<= t`, or 0.
    #[inline]
    pub fn cdf(&self, t: T) -> T {
        floor_lookup(&self.atoms, t)
    }

    /// `F` over an ascending sequence in a single merge pass.
    pub fn cdf_batch(&self, ts: &[T]) -> Result<Vec<T>> {
        if ts.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(FdrError::UnsortedBatch);
        }
        let mut out = Vec::with_capacity(ts.len());
        let mut idx = 0;
        let mut current = T::zero();
        for &t in ts {
            while idx < self.atoms.len() && self.atoms[idx] <= t {
                current = self.atoms[idx];
                idx += 1;
            }
            out.push(current);
        }
        Ok(out)
    }

    /// Nearest atom to `p`; an exact midpoint goes to the larger atom.
    pub fn nearest(&self, p: T) -> T {
        let i = self.atoms.partition_point(|&a| a < p);
        if i == self.atoms.len() {
            return self.atoms[i - 1];
        }
        let above = self.atoms[i];
        if above == p || i == 0 {
            return above;
        }
        let below = self.atoms[i - 1];
        if p - below < above - p {
            below
        } else {
            above
        }
    }
}

/// Sorted, deduplicated union of several supports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergedSupport<T: Scalar> {
    atoms: Vec<T>,
}

impl<T: Scalar> MergedSupport<T> {
    pub fn atoms(&self) -> &[T] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Position of the floor element of `threshold`: the first retained atom
    /// when restricting. Zero if no atom lies at or below the threshold.
    pub fn floor_index(&self, threshold: T) -> usize {
        upper_index(&self.atoms, threshold).saturating_sub(1)
    }

    /// Keeps the floor element of `threshold` and everything above it.
    pub fn restrict(&self, threshold: T) -> MergedSupport<T> {
        MergedSupport {
            atoms: self.atoms[self.floor_index(threshold)..].to_vec(),
        }
    }
}

/// Union of all atoms, sorted and deduplicated.
pub fn merge_supports<T: Scalar>(supports: &[PValueSupport<T>]) -> MergedSupport<T> {
    let total = supports.iter().map(PValueSupport::len).sum();
    let mut atoms = Vec::with_capacity(total);
    for s in supports {
        atoms.extend_from_slice(s.atoms());
    }
    atoms.sort_unstable_by(cmp);
    atoms.dedup();
    atoms.shrink_to_fit();
    MergedSupport { atoms }
}

/// `m` raw p-values paired with their null supports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultipleTestingProblem<T: Scalar> {
    raw: Vec<T>,
    supports: Vec<PValueSupport<T>>,
}

impl<T: Scalar> MultipleTestingProblem<T> {
    pub fn new(raw: Vec<T>, supports: Vec<PValueSupport<T>>) -> Result<Self> {
        if raw.len() != supports.len() {
            return Err(FdrError::LengthMismatch {
                pvalues: raw.len(),
                supports: supports.len(),
            });
        }
        if raw.is_empty() {
            return Err(FdrError::EmptyProblem);
        }
        if let Some(&bad) = raw
            .iter()
            .find(|&&p| p.is_nan() || p < T::zero() || p > T::one())
        {
            return Err(FdrError::PValueOutOfRange(bad.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { raw, supports })
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn raw_pvalues(&self) -> &[T] {
        &self.raw
    }

    pub fn supports(&self) -> &[PValueSupport<T>] {
        &self.supports
    }

    /// Snaps every raw p-value onto its own support.
    pub fn match_pvalues(&self) -> Self {
        let raw = self
            .raw
            .iter()
            .zip(&self.supports)
            .map(|(&p, s)| s.nearest(p))
            .collect();
        Self {
            raw,
            supports: self.supports.clone(),
        }
    }

    /// True when every raw p-value is an atom of its support.
    pub fn is_matched(&self) -> bool {
        self.raw
            .iter()
            .zip(&self.supports)
            .all(|(&p, s)| s.atoms().binary_search_by(|a| cmp(a, &p)).is_ok())
    }

    pub fn merged_support(&self) -> MergedSupport<T> {
        merge_supports(&self.supports)
    }

    pub fn into_parts(self) -> (Vec<T>, Vec<PValueSupport<T>>) {
        (self.raw, self.supports)
    }
}
