//! Jaccard similarity between failure signatures and the average-pairwise
//! diversity objective.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;

use super::{MatrixError, Signature};

/// `(shared failures, union of failures)` for a pair of signatures.
#[inline]
pub fn overlap(a: &Signature, b: &Signature) -> (u32, u32) {
    let shared = a.and_count(b);
    (shared, a.popcount() + b.popcount() - shared)
}

/// Jaccard similarity of two signatures. Undefined (and rejected) when both
/// are all-zero.
pub fn jaccard(a: &Signature, b: &Signature) -> Result<Ratio<u64>, MatrixError> {
    a.check_width(b)?;
    match overlap(a, b) {
        (_, 0) => Err(MatrixError::BothEmpty),
        (shared, union) => Ok(Ratio::new(u64::from(shared), u64::from(union))),
    }
}

/// Exact sum of Jaccard terms.
///
/// Numerators are accumulated per union size, so the rational arithmetic at
/// the end touches at most `width` distinct denominators no matter how many
/// pairs went in.
#[derive(Clone, Debug, Default)]
pub struct JaccardSum {
    by_union: Vec<u64>,
}

impl JaccardSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, shared: u32, union: u32) {
        let u = union as usize;
        if self.by_union.len() <= u {
            self.by_union.resize(u + 1, 0);
        }
        self.by_union[u] += u64::from(shared);
    }

    pub fn total(&self) -> BigRational {
        self.mean_over(1)
    }

    /// `total() / count`, without intermediate big-number reductions when
    /// everything fits in `i128`.
    pub fn mean_over(&self, count: usize) -> BigRational {
        assert!(count > 0, "mean over zero terms");
        let terms: Option<Vec<(i64, i64)>> = self
            .by_union
            .iter()
            .enumerate()
            .filter(|&(_, &n)| n != 0)
            .map(|(u, &n)| Some((i64::try_from(n).ok()?, u as i64)))
            .collect();
        let fast = terms.as_deref().and_then(sum_i128).and_then(|(num, den)| {
            let count = i128::try_from(count).ok()?;
            let g = num.gcd(&count);
            Some((num / g, den.checked_mul(count / g)?))
        });
        match fast {
            // Already in lowest terms with a positive denominator.
            Some((num, den)) => BigRational::new_raw(BigInt::from(num), BigInt::from(den)),
            None => {
                let total = self
                    .by_union
                    .iter()
                    .enumerate()
                    .filter(|&(_, &n)| n != 0)
                    .fold(BigRational::zero(), |acc, (u, &n)| {
                        acc + BigRational::new(BigInt::from(n), BigInt::from(u))
                    });
                total / BigRational::from_integer(BigInt::from(count))
            }
        }
    }
}

/// Signed exact sum of Jaccard terms, grouped by union size like
/// [`JaccardSum`]. Used to compare swap deltas without big-number
/// arithmetic in the common case.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct JaccardDelta {
    by_union: Vec<i64>,
}

impl JaccardDelta {
    #[inline]
    pub(crate) fn add(&mut self, shared: u32, union: u32, sign: i64) {
        let u = union as usize;
        if self.by_union.len() <= u {
            self.by_union.resize(u + 1, 0);
        }
        self.by_union[u] += sign * i64::from(shared);
    }

    /// Sign of `self - other`.
    pub(crate) fn cmp_to(&self, other: &Self) -> Ordering {
        let len = self.by_union.len().max(other.by_union.len());
        let at = |v: &[i64], u: usize| v.get(u).copied().unwrap_or(0);
        let terms: Vec<(i64, i64)> = (1..len)
            .map(|u| (at(&self.by_union, u) - at(&other.by_union, u), u as i64))
            .filter(|&(n, _)| n != 0)
            .collect();
        match sum_i128(&terms) {
            Some((num, _)) => num.cmp(&0),
            None => big_sum(&terms).cmp(&BigRational::zero()),
        }
    }
}

fn big_sum(terms: &[(i64, i64)]) -> BigRational {
    terms.iter().fold(BigRational::zero(), |acc, &(n, u)| {
        acc + BigRational::new(BigInt::from(n), BigInt::from(u))
    })
}

/// Sum of fractions `n / u` in lowest terms with a positive denominator,
/// or `None` on overflow.
fn sum_i128(terms: &[(i64, i64)]) -> Option<(i128, i128)> {
    let (mut num, mut den) = (0i128, 1i128);
    for &(n, u) in terms {
        let (n, u) = (i128::from(n), i128::from(u));
        num = num.checked_mul(u)?.checked_add(n.checked_mul(den)?)?;
        den = den.checked_mul(u)?;
        let g = num.gcd(&den);
        if g > 1 {
            num /= g;
            den /= g;
        }
    }
    Some((num, den))
}

/// Exact mean pairwise Jaccard similarity over `rows`; 0 for fewer than
/// two rows. Callers guarantee no pair of rows is jointly empty.
pub(crate) fn pair_mean(rows: &[&Signature]) -> BigRational {
    let pairs = pair_count(rows.len());
    if pairs == 0 {
        return BigRational::zero();
    }
    let mut acc = JaccardSum::new();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            let (shared, union) = overlap(a, b);
            acc.add(shared, union);
        }
    }
    acc.mean_over(pairs)
}

pub(crate) fn pair_count(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Mean Jaccard similarity over all unordered pairs; 0 for fewer than two
/// rows. Lower is more diverse.
pub fn avg_diversity(rows: &[&Signature]) -> Result<BigRational, MatrixError> {
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            a.check_width(b)?;
            if a.is_zero() && b.is_zero() {
                return Err(MatrixError::BothEmpty);
            }
        }
    }
    Ok(pair_mean(rows))
}
