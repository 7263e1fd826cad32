//! Problem-, code- and quality-level filtering of raw verdict matrices.
//!
//! Stages run in a fixed order on each problem:
//!
//! 1. reject the problem if any column of the raw matrix is all ones;
//! 2. drop every row whose failure rate is strictly above `tau`;
//! 3. merge identical surviving rows, keeping the first occurrence;
//! 4. reject if fewer than `min_rank` rows survive, or their rank is below
//!    `min_rank`.
//!
//! Stages 2 and 3 always run so every input row is accounted for in the
//! report, even when stage 1 already rejected the problem.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::sigmatrix::{Signature, VerdictMatrix};
use crate::ConfigError;

pub const DEFAULT_TAU: f64 = 0.8;
pub const DEFAULT_MIN_RANK: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    tau: f64,
    min_rank: usize,
}

impl FilterConfig {
    pub fn new(tau: f64, min_rank: usize) -> Result<Self, ConfigError> {
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(ConfigError(format!("tau must be in (0, 1], got {tau}")));
        }
        if min_rank == 0 {
            return Err(ConfigError("min_rank must be at least 1".into()));
        }
        Ok(Self { tau, min_rank })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn min_rank(&self) -> usize {
        self.min_rank
    }
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            tau: DEFAULT_TAU,
            min_rank: DEFAULT_MIN_RANK,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterOutcome {
    Accepted,
    RejectedAllOnesColumn,
    RejectedLowRank,
    RejectedTooFewRows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedRow {
    pub code_id: String,
    pub failure_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DedupGroup {
    pub kept: String,
    pub removed: Vec<String>,
}

impl DedupGroup {
    /// How many input rows share the kept signature.
    pub fn multiplicity(&self) -> usize {
        self.removed.len() + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub problem_id: String,
    pub outcome: FilterOutcome,
    pub all_ones_columns: Vec<usize>,
    /// All-ones columns that appear only after rows were dropped. Reported,
    /// never used to reject.
    pub post_filter_all_ones_columns: Vec<usize>,
    pub dropped_rows: Vec<DroppedRow>,
    /// Only groups that actually merged something.
    pub dedup_groups: Vec<DedupGroup>,
    pub rows_in: usize,
    pub rows_kept: usize,
    pub rank_before: usize,
    pub rank_after: usize,
}

impl FilterReport {
    pub fn rows_deduped(&self) -> usize {
        self.dedup_groups.iter().map(|g| g.removed.len()).sum()
    }
}

/// Columns on which every row fails. Empty for a matrix without rows.
pub fn all_ones_columns(m: &VerdictMatrix) -> Vec<usize> {
    all_ones_in(m.rows(), m.width())
}

fn all_ones_in(rows: &[Signature], width: usize) -> Vec<usize> {
    if rows.is_empty() {
        return Vec::new();
    }
    (0..width)
        .filter(|&j| rows.iter().all(|r| r.get(j)))
        .collect()
}

/// Fraction of the tests a signature fails.
pub fn row_failure_rate(r: &Signature) -> f64 {
    f64::from(r.popcount()) / r.width() as f64
}

/// Runs all stages. Returns the filtered matrix when the problem is accepted,
/// plus the audit report either way.
pub fn prefilter_problem(
    m: &VerdictMatrix,
    cfg: &FilterConfig,
) -> (Option<VerdictMatrix>, FilterReport) {
    let all_ones = all_ones_columns(m);

    let mut dropped = Vec::new();
    let mut kept: Vec<usize> = Vec::new();
    let mut groups: Vec<DedupGroup> = Vec::new();
    let mut first_seen: HashMap<&Signature, usize> = HashMap::new();
    for (i, (id, row)) in m.row_ids().iter().zip(m.rows()).enumerate() {
        let rate = row_failure_rate(row);
        if rate > cfg.tau {
            dropped.push(DroppedRow {
                code_id: id.clone(),
                failure_rate: rate,
            });
            continue;
        }
        match first_seen.get(row) {
            Some(&g) => groups[g].removed.push(id.clone()),
            None => {
                first_seen.insert(row, groups.len());
                groups.push(DedupGroup {
                    kept: id.clone(),
                    removed: Vec::new(),
                });
                kept.push(i);
            }
        }
    }
    groups.retain(|g| !g.removed.is_empty());

    let filtered = m.select_rows(&kept);
    let rank_before = m.rank();
    let rank_after = filtered.rank();
    let post_ones: Vec<usize> = all_ones_in(filtered.rows(), filtered.width())
        .into_iter()
        .filter(|j| !all_ones.contains(j))
        .collect();

    let outcome = if !all_ones.is_empty() {
        FilterOutcome::RejectedAllOnesColumn
    } else if filtered.len() < cfg.min_rank {
        FilterOutcome::RejectedTooFewRows
    } else if rank_after < cfg.min_rank {
        FilterOutcome::RejectedLowRank
    } else {
        FilterOutcome::Accepted
    };

    let report = FilterReport {
        problem_id: m.problem_id().to_owned(),
        outcome,
        all_ones_columns: all_ones,
        post_filter_all_ones_columns: post_ones,
        dropped_rows: dropped,
        dedup_groups: groups,
        rows_in: m.len(),
        rows_kept: filtered.len(),
        rank_before,
        rank_after,
    };
    let accepted = (outcome == FilterOutcome::Accepted).then_some(filtered);
    (accepted, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[&str]) -> VerdictMatrix {
        let ids = (0..rows.len()).map(|i| format!("w{i}")).collect();
        let sigs: Vec<Signature> = rows.iter().map(|s| s.parse().unwrap()).collect();
        VerdictMatrix::new("p", sigs[0].width(), ids, sigs).unwrap()
    }

    fn cfg(min_rank: usize) -> FilterConfig {
        FilterConfig::new(0.8, min_rank).unwrap()
    }

    #[test]
    fn all_ones_examples() {
        assert_eq!(all_ones_columns(&matrix(&["11", "01"])), vec![1]);
        assert!(all_ones_columns(&matrix(&["10", "01"])).is_empty());
        assert_eq!(all_ones_columns(&matrix(&["111"])), vec![0, 1, 2]);
    }

    #[test]
    fn failure_rate_examples() {
        assert_eq!(row_failure_rate(&"111".parse().unwrap()), 1.0);
        assert_eq!(row_failure_rate(&"0110".parse().unwrap()), 0.5);
        assert_eq!(row_failure_rate(&"00001".parse().unwrap()), 0.2);
    }

    #[test]
    fn all_ones_column_rejects() {
        let (m, rep) = prefilter_problem(&matrix(&["11", "01"]), &cfg(1));
        assert!(m.is_none());
        assert_eq!(rep.outcome, FilterOutcome::RejectedAllOnesColumn);
        assert_eq!(rep.all_ones_columns, vec![1]);
    }

    #[test]
    fn tau_boundary_is_strict() {
        let nine = "1111111110";
        let eight = "1111111100";
        let other = "0000000011";
        let (m, rep) = prefilter_problem(&matrix(&[nine, eight, other]), &cfg(2));
        let m = m.unwrap();
        assert_eq!(m.row_ids(), ["w1", "w2"]);
        assert_eq!(rep.dropped_rows.len(), 1);
        assert_eq!(rep.dropped_rows[0].code_id, "w0");
        assert!((rep.dropped_rows[0].failure_rate - 0.9).abs() < 1e-12);
    }

    #[test]
    fn low_rank_rejects() {
        let rows = ["1000", "0100", "0010", "1100", "0110", "1010"];
        let (m, rep) = prefilter_problem(&matrix(&rows), &cfg(5));
        assert!(m.is_none());
        assert_eq!(rep.rank_after, 3);
        assert_eq!(rep.outcome, FilterOutcome::RejectedLowRank);
    }

    #[test]
    fn too_few_rows_rejects() {
        let (_, rep) = prefilter_problem(&matrix(&["10", "01"]), &cfg(5));
        assert_eq!(rep.outcome, FilterOutcome::RejectedTooFewRows);
    }

    #[test]
    fn dedup_keeps_first_and_records_multiplicity() {
        // Column 3 is all ones, so this problem is rejected, but the audit
        // trail still shows the merge.
        let (m, rep) = prefilter_problem(&matrix(&["0011", "0011", "0101"]), &cfg(2));
        assert!(m.is_none());
        assert_eq!(rep.outcome, FilterOutcome::RejectedAllOnesColumn);
        assert_eq!(rep.rows_kept, 2);
        assert_eq!(rep.dedup_groups.len(), 1);
        assert_eq!(rep.dedup_groups[0].kept, "w0");
        assert_eq!(rep.dedup_groups[0].removed, ["w1"]);
        assert_eq!(rep.dedup_groups[0].multiplicity(), 2);
        assert_eq!(rep.rank_before, rep.rank_after);

        let (m, rep) = prefilter_problem(&matrix(&["0011", "0011", "0100"]), &cfg(2));
        let m = m.unwrap();
        assert_eq!(rep.outcome, FilterOutcome::Accepted);
        assert_eq!(m.rows().iter().map(|r| r.to_string()).collect::<Vec<_>>(), ["0011", "0100"]);
        assert_eq!(m.row_ids(), ["w0", "w2"]);
    }

    #[test]
    fn post_filter_all_ones_is_reported_only() {
        // Dropping the 0.9-rate row leaves column 0 all ones.
        let rows = ["0111111111", "1000000001", "1000000110"];
        let (m, rep) = prefilter_problem(&matrix(&rows), &cfg(2));
        assert!(m.is_some());
        assert_eq!(rep.post_filter_all_ones_columns, vec![0]);
    }

    #[test]
    fn config_validation() {
        assert!(FilterConfig::new(0.0, 5).is_err());
        assert!(FilterConfig::new(1.5, 5).is_err());
        assert!(FilterConfig::new(f64::NAN, 5).is_err());
        assert!(FilterConfig::new(1.0, 0).is_err());
        assert!(FilterConfig::new(1.0, 1).is_ok());
    }
}
