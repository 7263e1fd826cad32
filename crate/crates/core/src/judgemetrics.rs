//! Validity and effectiveness of generated tests against a problem's basis.
//!
//! A generated test is valid when every sampled correct code accepts it. A
//! basis code is excluded when some valid test makes it fail; its exclusion
//! is attributed to one verdict category. Both rates are computed per
//! problem and macro-averaged with equal weight per problem.

use std::collections::{BTreeMap, HashSet};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fraction::{self, ratio, Fraction};
use crate::sigmatrix::Verdict;

pub const DEFAULT_QUANTILE: f64 = 0.2;
pub const DEFAULT_CORRECT_K: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("test {test_id} of problem {problem_id} has no correct-code verdicts")]
    NoCorrectCodes { problem_id: String, test_id: String },
    #[error("test {test_id} has no verdict for basis code {code_id}")]
    UnknownCode { code_id: String, test_id: String },
    #[error("problem {0} has an empty basis")]
    EmptyBasis(String),
}

/// Outcome of one generated test on the sampled correct codes and on the
/// problem's basis codes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratedTestResult {
    pub problem_id: String,
    pub test_id: String,
    pub correct_verdicts: Vec<Verdict>,
    pub wrong_verdicts: BTreeMap<String, Verdict>,
}

pub fn is_valid(t: &GeneratedTestResult) -> Result<bool, MetricsError> {
    if t.correct_verdicts.is_empty() {
        return Err(MetricsError::NoCorrectCodes {
            problem_id: t.problem_id.clone(),
            test_id: t.test_id.clone(),
        });
    }
    Ok(t.correct_verdicts.iter().all(|v| !v.is_failure()))
}

/// Attribution order when a code fails in several ways: lower ranks win.
fn precedence(v: Verdict) -> u8 {
    match v {
        Verdict::WrongAnswer => 0,
        Verdict::RuntimeError => 1,
        Verdict::TimeLimitExceeded => 2,
        Verdict::MemoryLimitExceeded => 3,
        Verdict::CompileError => 4,
        Verdict::Other => 5,
        Verdict::Accepted => u8::MAX,
    }
}

/// The verdict this code's exclusion is attributed to, or `None` if every
/// valid test accepts it. `valid_tests` must already be filtered by
/// [`is_valid`].
pub fn is_excluded(
    code_id: &str,
    valid_tests: &[&GeneratedTestResult],
) -> Result<Option<Verdict>, MetricsError> {
    let mut worst: Option<Verdict> = None;
    for t in valid_tests {
        let v = *t
            .wrong_verdicts
            .get(code_id)
            .ok_or_else(|| MetricsError::UnknownCode {
                code_id: code_id.to_owned(),
                test_id: t.test_id.clone(),
            })?;
        if v.is_failure() && worst.is_none_or(|w| precedence(v) < precedence(w)) {
            worst = Some(v);
        }
    }
    Ok(worst)
}

/// Counts of basis codes by attributed verdict; `ac` is "not excluded".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreakdownCounts {
    pub ac: usize,
    pub wa: usize,
    pub re: usize,
    pub tle: usize,
    pub other: usize,
}

impl BreakdownCounts {
    pub fn total(&self) -> usize {
        self.ac + self.wa + self.re + self.tle + self.other
    }

    pub fn excluded(&self) -> usize {
        self.total() - self.ac
    }

    fn record(&mut self, attributed: Option<Verdict>) {
        match attributed {
            None | Some(Verdict::Accepted) => self.ac += 1,
            Some(Verdict::WrongAnswer) => self.wa += 1,
            Some(Verdict::RuntimeError) => self.re += 1,
            Some(Verdict::TimeLimitExceeded) => self.tle += 1,
            Some(_) => self.other += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    #[serde(with = "fraction::serde_str")]
    pub ac: Fraction,
    #[serde(with = "fraction::serde_str")]
    pub wa: Fraction,
    #[serde(with = "fraction::serde_str")]
    pub re: Fraction,
    #[serde(with = "fraction::serde_str")]
    pub tle: Fraction,
    #[serde(with = "fraction::serde_str")]
    pub other: Fraction,
}

impl Breakdown {
    fn from_counts(c: &BreakdownCounts) -> Self {
        let total = c.total();
        Self {
            ac: ratio(c.ac, total),
            wa: ratio(c.wa, total),
            re: ratio(c.re, total),
            tle: ratio(c.tle, total),
            other: ratio(c.other, total),
        }
    }

    fn mean(items: &[&Breakdown]) -> Self {
        Self {
            ac: fraction::mean(items.iter().map(|b| &b.ac)),
            wa: fraction::mean(items.iter().map(|b| &b.wa)),
            re: fraction::mean(items.iter().map(|b| &b.re)),
            tle: fraction::mean(items.iter().map(|b| &b.tle)),
            other: fraction::mean(items.iter().map(|b| &b.other)),
        }
    }

    pub fn sum(&self) -> Fraction {
        &self.ac + &self.wa + &self.re + &self.tle + &self.other
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemMetrics {
    pub problem_id: String,
    pub generated: usize,
    pub valid: usize,
    pub counts: BreakdownCounts,
    #[serde(with = "fraction::serde_str")]
    pub pass_rate: Fraction,
    #[serde(with = "fraction::serde_str")]
    pub hack_rate: Fraction,
    pub breakdown: Breakdown,
    pub percent: Percentages,
}

/// Display values: percentages with two decimals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Percentages {
    pub pass_rate: String,
    pub ac: String,
    pub wa: String,
    pub re: String,
    pub tle: String,
    pub other: String,
    pub hack_rate: String,
}

impl Percentages {
    fn new(pass_rate: &Fraction, hack_rate: &Fraction, b: &Breakdown) -> Self {
        let p = fraction::percent_2dp;
        Self {
            pass_rate: p(pass_rate),
            ac: p(&b.ac),
            wa: p(&b.wa),
            re: p(&b.re),
            tle: p(&b.tle),
            other: p(&b.other),
            hack_rate: p(hack_rate),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroMetrics {
    pub problems: usize,
    #[serde(with = "fraction::serde_str")]
    pub pass_rate: Fraction,
    #[serde(with = "fraction::serde_str")]
    pub hack_rate: Fraction,
    pub breakdown: Breakdown,
    pub percent: Percentages,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub per_problem: Vec<ProblemMetrics>,
    #[serde(rename = "macro")]
    pub macro_avg: MacroMetrics,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Line<'a> {
    Problem(&'a ProblemMetrics),
    Macro(&'a MacroMetrics),
}

impl MetricsReport {
    /// One JSON object per problem, then the macro averages.
    pub fn to_records(&self) -> String {
        let lines = self
            .per_problem
            .iter()
            .map(Line::Problem)
            .chain(std::iter::once(Line::Macro(&self.macro_avg)));
        let mut out = String::new();
        for line in lines {
            out.push_str(&serde_json::to_string(&line).expect("metrics serialize"));
            out.push('\n');
        }
        out
    }

    /// A fixed-width table in percent, one row per problem plus the macro row.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<16} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}\n",
            "problem", "PR", "AC", "WA", "RE", "TLE", "OTHER", "HR"
        );
        let rows = self
            .per_problem
            .iter()
            .map(|p| (p.problem_id.as_str(), &p.percent))
            .chain(std::iter::once(("MACRO", &self.macro_avg.percent)));
        for (id, pc) in rows {
            out.push_str(&format!(
                "{:<16} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7}\n",
                id, pc.pass_rate, pc.ac, pc.wa, pc.re, pc.tle, pc.other, pc.hack_rate
            ));
        }
        out
    }
}

/// One problem's input to [`hack_rate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemTests {
    pub problem_id: String,
    pub basis: Vec<String>,
    pub tests: Vec<GeneratedTestResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PassRates {
    pub per_problem: Vec<(String, Fraction)>,
    pub macro_avg: Fraction,
}

fn problem_pass_rate(tests: &[GeneratedTestResult]) -> Result<(usize, Fraction), MetricsError> {
    let mut valid = 0;
    for t in tests {
        if is_valid(t)? {
            valid += 1;
        }
    }
    let rate = if tests.is_empty() {
        ratio(0, 1)
    } else {
        ratio(valid, tests.len())
    };
    Ok((valid, rate))
}

/// Per-problem share of valid generated tests, and their unweighted mean.
/// A problem with no generated tests scores 0.
pub fn pass_rate(problems: &[(String, Vec<GeneratedTestResult>)]) -> Result<PassRates, MetricsError> {
    let per_problem = problems
        .iter()
        .map(|(id, tests)| Ok((id.clone(), problem_pass_rate(tests)?.1)))
        .collect::<Result<Vec<_>, MetricsError>>()?;
    let macro_avg = fraction::mean(per_problem.iter().map(|(_, r)| r));
    Ok(PassRates {
        per_problem,
        macro_avg,
    })
}

/// Full metrics: per-problem pass and hack rates with the exclusion
/// breakdown, plus macro averages.
pub fn hack_rate(problems: &[ProblemTests]) -> Result<MetricsReport, MetricsError> {
    let mut per_problem = Vec::with_capacity(problems.len());
    for p in problems {
        if p.basis.is_empty() {
            return Err(MetricsError::EmptyBasis(p.problem_id.clone()));
        }
        let (valid_count, pass_rate) = problem_pass_rate(&p.tests)?;
        let valid: Vec<&GeneratedTestResult> = p
            .tests
            .iter()
            .filter(|t| t.correct_verdicts.iter().all(|v| !v.is_failure()))
            .collect();
        let mut counts = BreakdownCounts::default();
        for code in &p.basis {
            counts.record(is_excluded(code, &valid)?);
        }
        let hack_rate = ratio(counts.excluded(), counts.total());
        let breakdown = Breakdown::from_counts(&counts);
        per_problem.push(ProblemMetrics {
            problem_id: p.problem_id.clone(),
            generated: p.tests.len(),
            valid: valid_count,
            counts,
            percent: Percentages::new(&pass_rate, &hack_rate, &breakdown),
            pass_rate,
            hack_rate,
            breakdown,
        });
    }
    let breakdowns: Vec<&Breakdown> = per_problem.iter().map(|p| &p.breakdown).collect();
    let pass_rate = fraction::mean(per_problem.iter().map(|p| &p.pass_rate));
    let hack_rate = fraction::mean(per_problem.iter().map(|p| &p.hack_rate));
    let breakdown = Breakdown::mean(&breakdowns);
    let macro_avg = MacroMetrics {
        problems: per_problem.len(),
        percent: Percentages::new(&pass_rate, &hack_rate, &breakdown),
        pass_rate,
        hack_rate,
        breakdown,
    };
    Ok(MetricsReport {
        per_problem,
        macro_avg,
    })
}

/// Groups flat test records by problem, in first-seen order. The basis of
/// each problem comes from `bases` when given, otherwise from the union of
/// the codes its tests report on.
pub fn group_tests(
    tests: Vec<GeneratedTestResult>,
    bases: Option<&BTreeMap<String, Vec<String>>>,
) -> Vec<ProblemTests> {
    let mut order: Vec<String> = Vec::new();
    let mut grouped: BTreeMap<String, Vec<GeneratedTestResult>> = BTreeMap::new();
    for t in tests {
        if !grouped.contains_key(&t.problem_id) {
            order.push(t.problem_id.clone());
        }
        grouped.entry(t.problem_id.clone()).or_default().push(t);
    }
    order
        .into_iter()
        .map(|id| {
            let tests = grouped.remove(&id).unwrap_or_default();
            let basis = match bases.and_then(|b| b.get(&id)) {
                Some(b) => b.clone(),
                None => {
                    let mut seen = HashSet::new();
                    let mut codes = Vec::new();
                    for t in &tests {
                        for code in t.wrong_verdicts.keys() {
                            if seen.insert(code.as_str()) {
                                codes.push(code.clone());
                            }
                        }
                    }
                    codes.sort();
                    codes
                }
            };
            ProblemTests {
                problem_id: id,
                basis,
                tests,
            }
        })
        .collect()
}

/// Samples up to `k` correct codes among the fastest: runtimes are min-max
/// normalised to [0, 1] (all zero when every runtime is equal) and codes at
/// or below `quantile` are eligible. Output keeps input order.
///
/// Runtimes must be finite and nonnegative.
pub fn select_correct_codes<R: Rng + ?Sized>(
    runtimes: &[(String, f64)],
    quantile: f64,
    k: usize,
    rng: &mut R,
) -> Vec<String> {
    let eligible = eligible_correct_codes(runtimes, quantile);
    let take = k.min(eligible.len());
    let mut picked = index::sample(rng, eligible.len(), take).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| eligible[i].clone()).collect()
}

/// Codes whose normalised runtime is at most `quantile`, in input order.
pub fn eligible_correct_codes(runtimes: &[(String, f64)], quantile: f64) -> Vec<String> {
    debug_assert!(runtimes.iter().all(|(_, t)| t.is_finite() && *t >= 0.0));
    let lo = runtimes.iter().map(|(_, t)| *t).fold(f64::INFINITY, f64::min);
    let hi = runtimes.iter().map(|(_, t)| *t).fold(f64::NEG_INFINITY, f64::max);
    runtimes
        .iter()
        .filter(|(_, t)| {
            let norm = if hi > lo { (t - lo) / (hi - lo) } else { 0.0 };
            norm <= quantile
        })
        .map(|(id, _)| id.clone())
        .collect()
}
