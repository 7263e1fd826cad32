//! Random-restart local search for a maximally diverse row basis.
//!
//! Each restart draws a random basis of the (pre-filtered) matrix and walks
//! to a local optimum with [`local_search`]; the best local optimum over all
//! restarts wins, earliest restart on ties. Restart `r` always draws from
//! stream `r` of the configured seed, so the result is the same whether the
//! restarts run on one thread or many.

mod neighborhood;
mod oracle;

use rand::seq::SliceRandom;
use rand::Rng;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fraction::{self, Fraction};
use crate::rng::stream_rng;
use crate::sigmatrix::{independent, Echelon, VerdictMatrix};
use crate::ConfigError;

pub use neighborhood::{best_neighbor, local_search, LocalOutcome, Neighbor, Termination};
pub use oracle::{brute_force_best_basis, OracleError, DEFAULT_ENUMERATION_CAP};
pub(crate) use neighborhood::exact_diversity;
use neighborhood::{local_search_in, Overlaps};

pub const DEFAULT_RESTARTS: usize = 1000;
pub const DEFAULT_MAX_STEPS: usize = 1000;

/// Restarts evaluated together before checking for a zero-diversity result.
const RESTART_CHUNK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    restarts: usize,
    max_steps: usize,
    pub seed: u64,
    pub early_stop_on_zero: bool,
}

impl SearchConfig {
    pub fn new(restarts: usize, max_steps: usize, seed: u64) -> Result<Self, ConfigError> {
        if restarts == 0 {
            return Err(ConfigError("restarts must be at least 1".into()));
        }
        if max_steps == 0 {
            return Err(ConfigError("max_steps must be at least 1".into()));
        }
        Ok(Self {
            restarts,
            max_steps,
            seed,
            early_stop_on_zero: true,
        })
    }

    pub fn restarts(&self) -> usize {
        self.restarts
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_early_stop(mut self, on: bool) -> Self {
        self.early_stop_on_zero = on;
        self
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            max_steps: DEFAULT_MAX_STEPS,
            seed: 0,
            early_stop_on_zero: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSelection {
    /// Row positions in the searched matrix, ascending.
    pub indices: Vec<usize>,
    pub code_ids: Vec<String>,
    pub rank: usize,
    #[serde(with = "fraction::serde_str")]
    pub diversity: Fraction,
    pub restarts_used: usize,
    pub steps_per_restart: Vec<usize>,
    pub seed: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantViolation {
    #[error("selection has {size} rows but the matrix has rank {rank}")]
    WrongSize { size: usize, rank: usize },
    #[error("selected rows are linearly dependent")]
    Dependent,
    #[error("row index {0} is out of range")]
    OutOfRange(usize),
    #[error("recorded diversity {recorded} differs from recomputed {recomputed}")]
    Diversity { recorded: String, recomputed: String },
}

impl BasisSelection {
    /// Re-checks the basis post hoc: right size, independent rows, and a
    /// recorded diversity that matches a fresh computation.
    pub fn verify(&self, m: &VerdictMatrix) -> Result<(), InvariantViolation> {
        if let Some(&i) = self.indices.iter().find(|&&i| i >= m.len()) {
            return Err(InvariantViolation::OutOfRange(i));
        }
        let rank = m.rank();
        if self.indices.len() != rank || self.rank != rank {
            return Err(InvariantViolation::WrongSize {
                size: self.indices.len(),
                rank,
            });
        }
        if !independent(self.indices.iter().map(|&i| m.row(i))) {
            return Err(InvariantViolation::Dependent);
        }
        let recomputed = exact_diversity(m, &self.indices);
        if recomputed != self.diversity {
            return Err(InvariantViolation::Diversity {
                recorded: self.diversity.to_string(),
                recomputed: recomputed.to_string(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub restart: usize,
    #[serde(with = "fraction::serde_str")]
    pub initial: Fraction,
    #[serde(rename = "final", with = "fraction::serde_str")]
    pub final_diversity: Fraction,
    pub steps: usize,
    pub termination: Termination,
    /// Start diversity and every accepted improvement.
    #[serde(skip)]
    pub path: Vec<Fraction>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub restarts: Vec<RestartRecord>,
}

/// A random basis: shuffle the rows, then keep each one that raises the rank
/// until `rank` rows are kept. Returned ascending.
pub fn random_basis<R: Rng + ?Sized>(m: &VerdictMatrix, rank: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m.len()).collect();
    order.shuffle(rng);
    let mut e = Echelon::new(m.width());
    let mut picked = Vec::with_capacity(rank);
    for i in order {
        if picked.len() == rank {
            break;
        }
        if e.insert(m.row(i)) {
            picked.push(i);
        }
    }
    picked.sort_unstable();
    picked
}

fn run_restart(
    ov: &Overlaps,
    m: &VerdictMatrix,
    rank: usize,
    cfg: &SearchConfig,
    restart: usize,
) -> (RestartRecord, Vec<usize>) {
    let mut rng = stream_rng(cfg.seed, restart as u64);
    let start = random_basis(m, rank, &mut rng);
    let out = local_search_in(ov, &start, cfg.max_steps, cfg.early_stop_on_zero);
    let record = RestartRecord {
        restart,
        initial: out.path[0].clone(),
        final_diversity: out.diversity,
        steps: out.steps,
        termination: out.termination,
        path: out.path,
    };
    (record, out.indices)
}

/// Runs the full random-restart search on a pre-filtered matrix.
pub fn wrong_select(m: &VerdictMatrix, cfg: &SearchConfig) -> (BasisSelection, SearchTrace) {
    let rank = m.rank();
    let overlaps = Overlaps::new(m);
    let mut trace = SearchTrace::default();
    let mut best: Option<(Fraction, Vec<usize>)> = None;

    let mut next = 0;
    'chunks: while next < cfg.restarts {
        let end = (next + RESTART_CHUNK).min(cfg.restarts);
        let results: Vec<(RestartRecord, Vec<usize>)> = (next..end)
            .into_par_iter()
            .map(|r| run_restart(&overlaps, m, rank, cfg, r))
            .collect();
        for (record, indices) in results {
            let improves = best
                .as_ref()
                .is_none_or(|(f, _)| record.final_diversity < *f);
            if improves {
                best = Some((record.final_diversity.clone(), indices));
            }
            trace.restarts.push(record);
            let solved = best.as_ref().is_some_and(|(f, _)| f.is_zero());
            if cfg.early_stop_on_zero && solved {
                break 'chunks;
            }
        }
        next = end;
    }

    let (diversity, indices) = best.expect("at least one restart runs");
    let selection = BasisSelection {
        code_ids: indices.iter().map(|&i| m.row_ids()[i].clone()).collect(),
        indices,
        rank,
        diversity,
        restarts_used: trace.restarts.len(),
        steps_per_restart: trace.restarts.iter().map(|r| r.steps).collect(),
        seed: cfg.seed,
    };
    (selection, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraction::ratio;
    use crate::sigmatrix::Signature;

    fn matrix(rows: &[&str]) -> VerdictMatrix {
        let ids = (0..rows.len()).map(|i| format!("w{i}")).collect();
        let sigs: Vec<Signature> = rows.iter().map(|s| s.parse().unwrap()).collect();
        VerdictMatrix::new("p", sigs[0].width(), ids, sigs).unwrap()
    }

    #[test]
    fn random_basis_examples() {
        let toy = matrix(&["001", "011", "010"]);
        for s in 0..20 {
            let b = random_basis(&toy, 2, &mut stream_rng(s, 0));
            assert_eq!(b.len(), 2);
            assert!(independent(b.iter().map(|&i| toy.row(i))));
        }
        let id = matrix(&["100", "010", "001"]);
        assert_eq!(random_basis(&id, 3, &mut stream_rng(3, 0)), vec![0, 1, 2]);
        let dup = matrix(&["11", "11"]);
        let seen: std::collections::BTreeSet<Vec<usize>> = (0..32)
            .map(|s| random_basis(&dup, 1, &mut stream_rng(s, 0)))
            .collect();
        assert!(seen.iter().all(|b| b.len() == 1));
        assert_eq!(seen.len(), 2, "both single-row bases should show up");
    }

    #[test]
    fn toy_selection() {
        let m = matrix(&["001", "011", "010"]);
        for seed in 0..8 {
            let cfg = SearchConfig::new(4, 10, seed).unwrap();
            let (sel, trace) = wrong_select(&m, &cfg);
            assert_eq!(sel.indices, vec![0, 2]);
            assert_eq!(sel.code_ids, ["w0", "w2"]);
            assert_eq!(sel.diversity, ratio(0, 1));
            assert_eq!(sel.restarts_used, trace.restarts.len());
            sel.verify(&m).unwrap();
        }
    }

    #[test]
    fn disjoint_rows_stop_after_first_restart() {
        let m = matrix(&["1000", "0100", "0010", "0001"]);
        let cfg = SearchConfig::new(100, 10, 1).unwrap();
        let (sel, trace) = wrong_select(&m, &cfg);
        assert_eq!(sel.diversity, ratio(0, 1));
        assert_eq!(sel.restarts_used, 1);
        assert_eq!(trace.restarts[0].termination, Termination::ZeroDiversity);
    }

    #[test]
    fn without_early_stop_every_restart_runs() {
        let m = matrix(&["1000", "0100", "0010", "0001"]);
        let cfg = SearchConfig::new(40, 10, 1).unwrap().with_early_stop(false);
        let (sel, trace) = wrong_select(&m, &cfg);
        assert_eq!(sel.restarts_used, 40);
        assert_eq!(trace.restarts.len(), 40);
        assert!(trace.restarts.iter().all(|r| r.termination == Termination::Converged));
    }

    #[test]
    fn verify_catches_tampering() {
        let m = matrix(&["001", "011", "010"]);
        let (mut sel, _) = wrong_select(&m, &SearchConfig::new(2, 5, 0).unwrap());
        sel.diversity = ratio(1, 2);
        assert!(matches!(sel.verify(&m), Err(InvariantViolation::Diversity { .. })));
        sel.indices = vec![0];
        assert!(matches!(sel.verify(&m), Err(InvariantViolation::WrongSize { .. })));
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::new(0, 1, 0).is_err());
        assert!(SearchConfig::new(1, 0, 0).is_err());
        let d = SearchConfig::default();
        assert_eq!((d.restarts(), d.max_steps()), (1000, 1000));
        assert!(d.early_stop_on_zero);
    }
}
