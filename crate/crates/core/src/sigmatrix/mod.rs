//! Failure signatures, the binary code-test matrix, and the GF(2) and
//! Jaccard machinery built on them.

mod gf2;
mod jaccard;
mod signature;
pub mod text;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gf2::{column_basis, column_basis_of, in_span, independent, rank, rank_of, transpose, Echelon};
pub use jaccard::{avg_diversity, jaccard, overlap, JaccardSum};
pub(crate) use gf2::Coordinates;
pub(crate) use jaccard::{pair_count, pair_mean, JaccardDelta};
pub use signature::Signature;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix has no test columns")]
    EmptyTests,
    #[error("code {code_id} passes every test and is not a wrong code")]
    AllPassRow { code_id: String },
    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("duplicate code id {0}")]
    DuplicateCodeId(String),
    #[error("{rows} rows but {ids} row ids")]
    LengthMismatch { rows: usize, ids: usize },
    #[error("both signatures are empty; jaccard similarity is undefined")]
    BothEmpty,
    #[error("invalid bit {found:?} at column {column}")]
    BadBit { found: char, column: usize },
}

/// A judge outcome for one code on one test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "AC")]
    Accepted,
    #[serde(rename = "WA")]
    WrongAnswer,
    #[serde(rename = "RE")]
    RuntimeError,
    #[serde(rename = "TLE")]
    TimeLimitExceeded,
    #[serde(rename = "MLE")]
    MemoryLimitExceeded,
    #[serde(rename = "CE")]
    CompileError,
    #[serde(rename = "OTHER")]
    Other,
}

impl Verdict {
    pub const ALL: [Verdict; 7] = [
        Verdict::Accepted,
        Verdict::WrongAnswer,
        Verdict::RuntimeError,
        Verdict::TimeLimitExceeded,
        Verdict::MemoryLimitExceeded,
        Verdict::CompileError,
        Verdict::Other,
    ];

    #[inline]
    pub fn is_failure(self) -> bool {
        self != Verdict::Accepted
    }

    pub fn code(self) -> &'static str {
        match self {
            Verdict::Accepted => "AC",
            Verdict::WrongAnswer => "WA",
            Verdict::RuntimeError => "RE",
            Verdict::TimeLimitExceeded => "TLE",
            Verdict::MemoryLimitExceeded => "MLE",
            Verdict::CompileError => "CE",
            Verdict::Other => "OTHER",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown verdict {0:?}")]
pub struct UnknownVerdict(pub String);

impl FromStr for Verdict {
    type Err = UnknownVerdict;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Verdict::ALL
            .into_iter()
            .find(|v| v.code() == s)
            .ok_or_else(|| UnknownVerdict(s.to_owned()))
    }
}

/// The per-problem code-test matrix: one nonzero signature per wrong code,
/// all of width `d`, rows in input order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerdictMatrix {
    problem_id: String,
    row_ids: Vec<String>,
    rows: Vec<Signature>,
    width: usize,
}

impl VerdictMatrix {
    pub fn new(
        problem_id: impl Into<String>,
        width: usize,
        row_ids: Vec<String>,
        rows: Vec<Signature>,
    ) -> Result<Self, MatrixError> {
        if width == 0 {
            return Err(MatrixError::EmptyTests);
        }
        if row_ids.len() != rows.len() {
            return Err(MatrixError::LengthMismatch {
                rows: rows.len(),
                ids: row_ids.len(),
            });
        }
        let mut seen = HashSet::with_capacity(row_ids.len());
        for (id, row) in row_ids.iter().zip(&rows) {
            if row.width() != width {
                return Err(MatrixError::WidthMismatch {
                    expected: width,
                    found: row.width(),
                });
            }
            if row.is_zero() {
                return Err(MatrixError::AllPassRow { code_id: id.clone() });
            }
            if !seen.insert(id.as_str()) {
                return Err(MatrixError::DuplicateCodeId(id.clone()));
            }
        }
        Ok(Self {
            problem_id: problem_id.into(),
            row_ids,
            rows,
            width,
        })
    }

    pub fn problem_id(&self) -> &str {
        &self.problem_id
    }

    pub fn rows(&self) -> &[Signature] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &Signature {
        &self.rows[i]
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    /// Number of rows `n`.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of golden tests `d`.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }

    /// The matrix keeping only rows at `indices`, in that order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        Self {
            problem_id: self.problem_id.clone(),
            row_ids: indices.iter().map(|&i| self.row_ids[i].clone()).collect(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            width: self.width,
        }
    }
}

/// Builds the matrix from per-code verdict lists: bit `j` of row `i` is set
/// iff code `i` did not get AC on test `j`.
pub fn build_matrix(
    problem_id: impl Into<String>,
    records: &[(String, Vec<Verdict>)],
) -> Result<VerdictMatrix, MatrixError> {
    let width = records.first().map_or(0, |(_, v)| v.len());
    if width == 0 {
        return Err(MatrixError::EmptyTests);
    }
    let mut ids = Vec::with_capacity(records.len());
    let mut rows = Vec::with_capacity(records.len());
    for (code_id, verdicts) in records {
        if verdicts.len() != width {
            return Err(MatrixError::WidthMismatch {
                expected: width,
                found: verdicts.len(),
            });
        }
        let fails: Vec<bool> = verdicts.iter().map(|v| v.is_failure()).collect();
        ids.push(code_id.clone());
        rows.push(Signature::from_bools(&fails));
    }
    VerdictMatrix::new(problem_id, width, ids, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Verdict::*;

    fn one(verdicts: Vec<Verdict>) -> Result<VerdictMatrix, MatrixError> {
        build_matrix("p", &[("w1".to_owned(), verdicts)])
    }

    #[test]
    fn build_examples() {
        let bits = |m: VerdictMatrix| m.row(0).to_string();
        assert_eq!(bits(one(vec![Accepted, WrongAnswer, WrongAnswer]).unwrap()), "011");
        assert_eq!(bits(one(vec![WrongAnswer; 3]).unwrap()), "111");
        assert_eq!(
            bits(one(vec![Accepted, RuntimeError, TimeLimitExceeded]).unwrap()),
            "011"
        );
        assert_eq!(
            one(vec![Accepted; 3]),
            Err(MatrixError::AllPassRow { code_id: "w1".into() })
        );
    }

    #[test]
    fn build_errors() {
        assert_eq!(one(vec![]), Err(MatrixError::EmptyTests));
        assert_eq!(build_matrix("p", &[]), Err(MatrixError::EmptyTests));
        let mixed = [
            ("a".to_owned(), vec![WrongAnswer, Accepted]),
            ("b".to_owned(), vec![WrongAnswer]),
        ];
        assert!(matches!(
            build_matrix("p", &mixed),
            Err(MatrixError::WidthMismatch { expected: 2, found: 1 })
        ));
        let dup = [
            ("a".to_owned(), vec![WrongAnswer]),
            ("a".to_owned(), vec![WrongAnswer]),
        ];
        assert_eq!(
            build_matrix("p", &dup),
            Err(MatrixError::DuplicateCodeId("a".into()))
        );
    }

    #[test]
    fn verdict_codes_roundtrip() {
        for v in Verdict::ALL {
            assert_eq!(v.code().parse::<Verdict>().unwrap(), v);
            assert_eq!(serde_json::to_string(&v).unwrap(), format!("\"{}\"", v.code()));
        }
        assert!("XX".parse::<Verdict>().is_err());
        assert!("ac".parse::<Verdict>().is_err());
    }

    #[test]
    fn rows_keep_input_order() {
        let recs = [
            ("z".to_owned(), vec![WrongAnswer, Accepted]),
            ("a".to_owned(), vec![Accepted, WrongAnswer]),
        ];
        let m = build_matrix("p", &recs).unwrap();
        assert_eq!(m.row_ids(), ["z", "a"]);
        assert_eq!(m.row(1).to_string(), "01");
    }
}
