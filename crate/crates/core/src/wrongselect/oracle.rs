//! Exhaustive search for the globally most diverse basis. Only usable on
//! small matrices; it exists to check the heuristic.

use itertools::Itertools;
use thiserror::Error;

use crate::fraction::Fraction;
use crate::sigmatrix::{independent, VerdictMatrix};

use super::exact_diversity;

pub const DEFAULT_ENUMERATION_CAP: u128 = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("C({n}, {k}) subsets exceed the enumeration cap of {cap}")]
    TooLarge { n: usize, k: usize, cap: u128 },
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    })
}

/// Enumerates every rank-sized row subset and returns the independent one
/// with the lowest diversity (lexicographically smallest on ties).
pub fn brute_force_best_basis(
    m: &VerdictMatrix,
    cap: u128,
) -> Result<(Vec<usize>, Fraction), OracleError> {
    let n = m.len();
    let k = m.rank();
    if binomial(n, k) > cap {
        return Err(OracleError::TooLarge { n, k, cap });
    }
    let mut best: Option<(Vec<usize>, Fraction)> = None;
    for subset in (0..n).combinations(k) {
        if !independent(subset.iter().map(|&i| m.row(i))) {
            continue;
        }
        let f = exact_diversity(m, &subset);
        if best.as_ref().is_none_or(|(_, b)| f < *b) {
            best = Some((subset, f));
        }
    }
    Ok(best.expect("a matrix of rank k has an independent k-subset"))
}
