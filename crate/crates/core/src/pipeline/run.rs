use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::judgemetrics::{select_correct_codes, DEFAULT_CORRECT_K, DEFAULT_QUANTILE};
use crate::prefilter::{prefilter_problem, FilterConfig, FilterOutcome, FilterReport};
use crate::rng::{derive_seed, stream_rng};
use crate::sigmatrix::{build_matrix, column_basis_of, independent, Signature, VerdictMatrix};
use crate::wrongselect::{wrong_select, BasisSelection, InvariantViolation, SearchConfig, SearchTrace};
use crate::ConfigError;

use super::records::ProblemBundle;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("problem {problem_id}: {violation}")]
    Invariant {
        problem_id: String,
        violation: InvariantViolation,
    },
    #[error("problem {problem_id}: test reduction kept {columns} columns for rank {rank}, or lost distinctness or rank")]
    Reduction {
        problem_id: String,
        columns: usize,
        rank: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub filter: FilterConfig,
    /// Its seed is the master seed; each problem derives its own.
    pub search: SearchConfig,
    pub quantile: f64,
    pub correct_k: usize,
}

impl PipelineConfig {
    pub fn new(
        filter: FilterConfig,
        search: SearchConfig,
        quantile: f64,
        correct_k: usize,
    ) -> Result<Self, ConfigError> {
        if !(0.0..=1.0).contains(&quantile) {
            return Err(ConfigError(format!("quantile must be in [0, 1], got {quantile}")));
        }
        Ok(Self {
            filter,
            search,
            quantile,
            correct_k,
        })
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            filter: FilterConfig::default(),
            search: SearchConfig::default(),
            quantile: DEFAULT_QUANTILE,
            correct_k: DEFAULT_CORRECT_K,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemOutcome {
    Accepted,
    RejectedAllOnesColumn,
    RejectedLowRank,
    RejectedTooFewRows,
    Failed,
}

impl From<FilterOutcome> for ProblemOutcome {
    fn from(o: FilterOutcome) -> Self {
        match o {
            FilterOutcome::Accepted => Self::Accepted,
            FilterOutcome::RejectedAllOnesColumn => Self::RejectedAllOnesColumn,
            FilterOutcome::RejectedLowRank => Self::RejectedLowRank,
            FilterOutcome::RejectedTooFewRows => Self::RejectedTooFewRows,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemReport {
    pub problem_id: String,
    pub outcome: ProblemOutcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub wrong_codes_in: usize,
    pub correct_codes_in: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter: Option<FilterReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection: Option<BasisSelection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<SearchTrace>,
    /// Golden-test columns that separate the selected codes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_columns: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub correct_codes: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusTotals {
    pub problems_in: usize,
    pub accepted: usize,
    pub rejected_all_ones_column: usize,
    pub rejected_low_rank: usize,
    pub rejected_too_few_rows: usize,
    pub failed: usize,
    pub codes_in: usize,
    pub codes_kept: usize,
    pub codes_dropped: usize,
    pub codes_deduped: usize,
    /// Wrong codes of problems that failed before filtering.
    pub codes_in_failed_problems: usize,
    pub selected_codes: usize,
}

impl CorpusTotals {
    fn add(&mut self, p: &ProblemReport) {
        self.problems_in += 1;
        self.codes_in += p.wrong_codes_in;
        match p.outcome {
            ProblemOutcome::Accepted => self.accepted += 1,
            ProblemOutcome::RejectedAllOnesColumn => self.rejected_all_ones_column += 1,
            ProblemOutcome::RejectedLowRank => self.rejected_low_rank += 1,
            ProblemOutcome::RejectedTooFewRows => self.rejected_too_few_rows += 1,
            ProblemOutcome::Failed => self.failed += 1,
        }
        match &p.filter {
            Some(f) => {
                self.codes_kept += f.rows_kept;
                self.codes_dropped += f.dropped_rows.len();
                self.codes_deduped += f.rows_deduped();
            }
            None => self.codes_in_failed_problems += p.wrong_codes_in,
        }
        if let Some(s) = &p.selection {
            self.selected_codes += s.indices.len();
        }
    }

    /// Problem and code conservation across outcomes.
    pub fn balanced(&self) -> bool {
        self.problems_in
            == self.accepted
                + self.rejected_all_ones_column
                + self.rejected_low_rank
                + self.rejected_too_few_rows
                + self.failed
            && self.codes_in
                == self.codes_kept
                    + self.codes_dropped
                    + self.codes_deduped
                    + self.codes_in_failed_problems
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub problems: Vec<ProblemReport>,
    pub totals: CorpusTotals,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Line<'a> {
    Problem(&'a ProblemReport),
    Totals(&'a CorpusTotals),
}

impl PipelineReport {
    /// One JSON object per line: every problem, then the totals.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        let lines = self
            .problems
            .iter()
            .map(Line::Problem)
            .chain(std::iter::once(Line::Totals(&self.totals)));
        for line in lines {
            out.push_str(&serde_json::to_string(&line).expect("report types serialize"));
            out.push('\n');
        }
        out
    }
}

/// Columns that keep the selected rows independent: the leftmost-pivot
/// column basis of the submatrix formed by the selection.
pub fn reduce_tests(m: &VerdictMatrix, sel: &BasisSelection) -> Vec<usize> {
    let rows: Vec<Signature> = sel.indices.iter().map(|&i| m.row(i).clone()).collect();
    column_basis_of(&rows, m.width())
}

/// Checks that `columns` is no larger than the selection and that the
/// selected rows restricted to it stay independent (hence distinct).
pub fn reduction_holds(m: &VerdictMatrix, sel: &BasisSelection, columns: &[usize]) -> bool {
    let restricted: Vec<Signature> = sel.indices.iter().map(|&i| m.row(i).restrict(columns)).collect();
    let mut distinct = restricted.clone();
    distinct.sort();
    distinct.dedup();
    columns.len() <= sel.indices.len()
        && distinct.len() == restricted.len()
        && independent(&restricted)
}

fn run_problem(b: &ProblemBundle, cfg: &PipelineConfig) -> Result<ProblemReport, PipelineError> {
    let mut report = ProblemReport {
        problem_id: b.problem_id.clone(),
        outcome: ProblemOutcome::Failed,
        failure: None,
        wrong_codes_in: b.wrong.len(),
        correct_codes_in: b.correct.len(),
        filter: None,
        selection: None,
        trace: None,
        test_columns: None,
        correct_codes: Vec::new(),
    };
    let m = match build_matrix(b.problem_id.clone(), &b.wrong) {
        Ok(m) => m,
        Err(e) => {
            report.failure = Some(e.to_string());
            return Ok(report);
        }
    };
    let (filtered, filter) = prefilter_problem(&m, &cfg.filter);
    report.outcome = filter.outcome.into();
    report.filter = Some(filter);
    let Some(filtered) = filtered else {
        return Ok(report);
    };

    let search = cfg
        .search
        .with_seed(derive_seed(cfg.search.seed, &b.problem_id, "search"));
    let (selection, trace) = wrong_select(&filtered, &search);
    selection
        .verify(&filtered)
        .map_err(|violation| PipelineError::Invariant {
            problem_id: b.problem_id.clone(),
            violation,
        })?;
    let columns = reduce_tests(&filtered, &selection);
    if !reduction_holds(&filtered, &selection, &columns) {
        return Err(PipelineError::Reduction {
            problem_id: b.problem_id.clone(),
            columns: columns.len(),
            rank: selection.rank,
        });
    }
    if !b.correct.is_empty() {
        let mut rng = stream_rng(derive_seed(cfg.search.seed, &b.problem_id, "correct"), 0);
        report.correct_codes = select_correct_codes(&b.correct, cfg.quantile, cfg.correct_k, &mut rng);
    }
    report.selection = Some(selection);
    report.trace = Some(trace);
    report.test_columns = Some(columns);
    Ok(report)
}

/// Filters, selects and reduces every problem. Problems run in parallel on
/// the current rayon pool; the report does not depend on its size.
/// Per-problem data errors mark that problem failed; only internal
/// invariant violations abort the run.
pub fn run_pipeline(
    bundles: &[ProblemBundle],
    cfg: &PipelineConfig,
) -> Result<PipelineReport, PipelineError> {
    let problems = bundles
        .par_iter()
        .map(|b| run_problem(b, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut totals = CorpusTotals::default();
    for p in &problems {
        totals.add(p);
    }
    Ok(PipelineReport { problems, totals })
}
