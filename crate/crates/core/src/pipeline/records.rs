//! Line-delimited JSON inputs: verdict records for corpus construction and
//! generated-test records for metrics.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::judgemetrics::GeneratedTestResult;
use crate::sigmatrix::Verdict;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: duplicate code id {code_id} in problem {problem_id}")]
    DuplicateCodeId {
        line: usize,
        problem_id: String,
        code_id: String,
    },
    #[error("line {line}: problem {problem_id} mixes {expected} and {found} verdicts per code")]
    MixedWidth {
        line: usize,
        problem_id: String,
        expected: usize,
        found: usize,
    },
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Wrong,
    Correct,
}

/// One line of a verdict record file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictRecord {
    pub problem_id: String,
    pub code_id: String,
    pub label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdicts: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

/// All codes of one problem.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProblemBundle {
    pub problem_id: String,
    pub wrong: Vec<(String, Vec<Verdict>)>,
    pub correct: Vec<(String, f64)>,
}

impl ProblemBundle {
    pub fn to_records(&self) -> Vec<VerdictRecord> {
        let wrong = self.wrong.iter().map(|(id, vs)| VerdictRecord {
            problem_id: self.problem_id.clone(),
            code_id: id.clone(),
            label: Label::Wrong,
            verdicts: Some(vs.iter().map(|v| v.code().to_owned()).collect()),
            runtime_ms: None,
        });
        let correct = self.correct.iter().map(|(id, t)| VerdictRecord {
            problem_id: self.problem_id.clone(),
            code_id: id.clone(),
            label: Label::Correct,
            verdicts: None,
            runtime_ms: Some(*t),
        });
        wrong.chain(correct).collect()
    }
}

fn parse_err(line: usize, reason: impl Into<String>) -> IngestError {
    IngestError::Parse {
        line,
        reason: reason.into(),
    }
}

fn read(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn ingest(path: &Path) -> Result<Vec<ProblemBundle>, IngestError> {
    ingest_str(&read(path)?)
}

/// Parses verdict records and groups them by problem, keeping first-seen
/// problem order and record order within each problem. Blank lines are
/// skipped.
pub fn ingest_str(input: &str) -> Result<Vec<ProblemBundle>, IngestError> {
    let mut bundles: Vec<ProblemBundle> = Vec::new();
    let mut slot: HashMap<String, usize> = HashMap::new();
    let mut ids: Vec<HashSet<String>> = Vec::new();

    for (k, raw) in input.lines().enumerate() {
        let line = k + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let rec: VerdictRecord =
            serde_json::from_str(raw).map_err(|e| parse_err(line, e.to_string()))?;
        let b = *slot.entry(rec.problem_id.clone()).or_insert_with(|| {
            bundles.push(ProblemBundle {
                problem_id: rec.problem_id.clone(),
                ..Default::default()
            });
            ids.push(HashSet::new());
            bundles.len() - 1
        });
        if !ids[b].insert(rec.code_id.clone()) {
            return Err(IngestError::DuplicateCodeId {
                line,
                problem_id: rec.problem_id,
                code_id: rec.code_id,
            });
        }
        let bundle = &mut bundles[b];
        match rec.label {
            Label::Wrong => {
                if rec.runtime_ms.is_some() {
                    return Err(parse_err(line, "runtime_ms is only allowed on correct codes"));
                }
                let tokens = rec
                    .verdicts
                    .ok_or_else(|| parse_err(line, "wrong code without verdicts"))?;
                let verdicts = tokens
                    .iter()
                    .map(|t| t.parse::<Verdict>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| parse_err(line, e.to_string()))?;
                if verdicts.is_empty() {
                    return Err(parse_err(line, "empty verdict list"));
                }
                if let Some((_, first)) = bundle.wrong.first() {
                    if first.len() != verdicts.len() {
                        return Err(IngestError::MixedWidth {
                            line,
                            problem_id: bundle.problem_id.clone(),
                            expected: first.len(),
                            found: verdicts.len(),
                        });
                    }
                }
                bundle.wrong.push((rec.code_id, verdicts));
            }
            Label::Correct => {
                if rec.verdicts.is_some() {
                    return Err(parse_err(line, "verdicts are only allowed on wrong codes"));
                }
                let t = rec
                    .runtime_ms
                    .ok_or_else(|| parse_err(line, "correct code without runtime_ms"))?;
                if !(t.is_finite() && t >= 0.0) {
                    return Err(parse_err(line, format!("invalid runtime_ms {t}")));
                }
                bundle.correct.push((rec.code_id, t));
            }
        }
    }
    Ok(bundles)
}

pub fn read_test_results(path: &Path) -> Result<Vec<GeneratedTestResult>, IngestError> {
    parse_test_results(&read(path)?)
}

/// Parses generated-test records, one object per line.
pub fn parse_test_results(input: &str) -> Result<Vec<GeneratedTestResult>, IngestError> {
    input
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| serde_json::from_str(l).map_err(|e| parse_err(k + 1, e.to_string())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const CORPUS: &str = r#"{"problem_id":"p1","code_id":"w1","label":"wrong","verdicts":["AC","WA","TLE"]}
{"problem_id":"p2","code_id":"w1","label":"wrong","verdicts":["RE"]}
{"problem_id":"p1","code_id":"c1","label":"correct","runtime_ms":12.5}
{"problem_id":"p1","code_id":"w2","label":"wrong","verdicts":["WA","AC","AC"]}

{"problem_id":"p2","code_id":"c1","label":"correct","runtime_ms":3}
"#;

    #[test]
    fn groups_by_problem() {
        let b = ingest_str(CORPUS).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].problem_id, "p1");
        assert_eq!(b[0].wrong.len(), 2);
        assert_eq!(b[0].wrong[1].0, "w2");
        assert_eq!(b[0].correct, vec![("c1".to_owned(), 12.5)]);
        assert_eq!(b[1].wrong[0].1, vec![Verdict::RuntimeError]);
        assert_eq!(b[1].correct.len(), 1);
    }

    #[test]
    fn bad_verdict_names_line_and_token() {
        let input = r#"{"problem_id":"p","code_id":"w","label":"wrong","verdicts":["AC"]}
{"problem_id":"p","code_id":"x","label":"wrong","verdicts":["XX"]}
"#;
        let e = ingest_str(input).unwrap_err();
        let msg = e.to_string();
        assert!(matches!(e, IngestError::Parse { line: 2, .. }), "{msg}");
        assert!(msg.contains("XX"), "{msg}");
    }

    #[test]
    fn duplicate_code_id() {
        let input = r#"{"problem_id":"p","code_id":"w","label":"wrong","verdicts":["WA"]}
{"problem_id":"p","code_id":"w","label":"correct","runtime_ms":1}
"#;
        assert!(matches!(
            ingest_str(input),
            Err(IngestError::DuplicateCodeId { line: 2, .. })
        ));
    }

    #[test]
    fn mixed_width() {
        let input = r#"{"problem_id":"p","code_id":"a","label":"wrong","verdicts":["WA","AC"]}
{"problem_id":"p","code_id":"b","label":"wrong","verdicts":["WA"]}
"#;
        assert!(matches!(
            ingest_str(input),
            Err(IngestError::MixedWidth { line: 2, expected: 2, found: 1, .. })
        ));
    }

    #[test]
    fn field_rules() {
        let cases = [
            r#"{"problem_id":"p","code_id":"a","label":"wrong"}"#,
            r#"{"problem_id":"p","code_id":"a","label":"wrong","verdicts":[]}"#,
            r#"{"problem_id":"p","code_id":"a","label":"wrong","verdicts":["WA"],"runtime_ms":1}"#,
            r#"{"problem_id":"p","code_id":"a","label":"correct"}"#,
            r#"{"problem_id":"p","code_id":"a","label":"correct","runtime_ms":-1}"#,
            r#"{"problem_id":"p","code_id":"a","label":"correct","runtime_ms":1,"verdicts":["AC"]}"#,
            r#"{"problem_id":"p","code_id":"a","label":"other","runtime_ms":1}"#,
            r#"{"problem_id":"p","code_id":"a","label":"correct","runtime_ms":1,"extra":0}"#,
            r#"not json"#,
        ];
        for c in cases {
            assert!(
                matches!(ingest_str(c), Err(IngestError::Parse { line: 1, .. })),
                "{c}"
            );
        }
    }

    #[test]
    fn records_roundtrip_through_bundles() {
        let b = ingest_str(CORPUS).unwrap();
        let text: String = b
            .iter()
            .flat_map(|b| b.to_records())
            .map(|r| serde_json::to_string(&r).unwrap() + "\n")
            .collect();
        assert_eq!(ingest_str(&text).unwrap(), b);
    }

    #[test]
    fn test_results_parse() {
        let input = r#"{"problem_id":"p","test_id":"t1","correct_verdicts":["AC","AC"],"wrong_verdicts":{"w1":"WA","w2":"AC"}}
{"problem_id":"p","test_id":"t2","correct_verdicts":["TLE"],"wrong_verdicts":{"w1":"AC","w2":"AC"}}
"#;
        let ts = parse_test_results(input).unwrap();
        assert_eq!(ts.len(), 2);
        assert_eq!(ts[0].wrong_verdicts["w1"], Verdict::WrongAnswer);
        let bad = r#"{"problem_id":"p","test_id":"t1","correct_verdicts":["ok"],"wrong_verdicts":{}}"#;
        assert!(matches!(
            parse_test_results(bad),
            Err(IngestError::Parse { line: 1, .. })
        ));
    }
}
