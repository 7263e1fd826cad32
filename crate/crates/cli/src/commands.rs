use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};

use faultbasis::judgemetrics::{group_tests, hack_rate};
use faultbasis::pipeline::records::parse_test_results;
use faultbasis::pipeline::{
    ingest_str, reduce_tests, reduction_holds, run_pipeline, synth_corpus, CorpusSpec,
    PipelineConfig,
};
use faultbasis::prefilter::{prefilter_problem, FilterConfig};
use faultbasis::rng::derive_seed;
use faultbasis::sigmatrix::{build_matrix, text};
use faultbasis::wrongselect::{wrong_select, BasisSelection, SearchConfig, SearchTrace};
use faultbasis::VerdictMatrix;

use crate::{CliError, Command, Common, FilterArgs, Format, SearchArgs, SynthArgs};

pub(crate) fn dispatch(cmd: &Command, common: &Common) -> Result<String, CliError> {
    match cmd {
        Command::Filter(f) => filter(common, f),
        Command::Select(s) => select(common, s, false),
        Command::ReduceTests(s) => select(common, s, true),
        Command::Metrics { basis } => metrics(common, basis.as_deref()),
        Command::Synth(s) => synth(common, s),
        Command::Pipeline {
            filter,
            search,
            quantile,
            correct_k,
        } => {
            let cfg = PipelineConfig::new(
                filter_config(filter)?,
                search_config(search, common.seed)?,
                *quantile,
                *correct_k,
            )
            .map_err(usage)?;
            pipeline(common, &cfg)
        }
    }
}

pub(crate) fn write_output(path: Option<&Path>, output: &str) -> Result<(), CliError> {
    let res = match path {
        Some(p) => std::fs::write(p, output),
        None => std::io::stdout().lock().write_all(output.as_bytes()),
    };
    res.map_err(|e| CliError::Usage(format!("writing output: {e}")))
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn input_err(e: impl ToString) -> CliError {
    CliError::Input(e.to_string())
}

fn read_input(path: Option<&Path>) -> Result<String, CliError> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Input(format!("reading {}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Input(format!("reading standard input: {e}")))?;
            Ok(s)
        }
    }
}

fn filter_config(f: &FilterArgs) -> Result<FilterConfig, CliError> {
    FilterConfig::new(f.tau, f.min_rank).map_err(usage)
}

fn search_config(s: &SearchArgs, seed: u64) -> Result<SearchConfig, CliError> {
    SearchConfig::new(s.restarts, s.steps, seed).map_err(usage)
}

/// Verdict records when the input starts with `{`, matrix text otherwise.
fn load_matrices(input: &str) -> Result<Vec<VerdictMatrix>, CliError> {
    if input.trim_start().starts_with('{') {
        ingest_str(input)
            .map_err(input_err)?
            .iter()
            .map(|b| build_matrix(b.problem_id.clone(), &b.wrong).map_err(|e| {
                CliError::Input(format!("problem {}: {e}", b.problem_id))
            }))
            .collect()
    } else {
        text::parse(input).map_err(input_err)
    }
}

fn json_line(out: &mut String, v: &Value) {
    out.push_str(&v.to_string());
    out.push('\n');
}

fn filter(common: &Common, args: &FilterArgs) -> Result<String, CliError> {
    let cfg = filter_config(args)?;
    let matrices = load_matrices(&read_input(common.input.as_deref())?)?;
    let mut out = String::new();
    for m in &matrices {
        let (kept, report) = prefilter_problem(m, &cfg);
        match common.format {
            Format::Records => {
                out.push_str(&serde_json::to_string(&report).expect("report serializes"));
                out.push('\n');
            }
            Format::Text => {
                if let Some(kept) = kept {
                    text::write(&kept, &mut out);
                }
            }
        }
    }
    Ok(out)
}

struct Selected {
    matrix: VerdictMatrix,
    selection: BasisSelection,
    trace: SearchTrace,
    columns: Option<Vec<usize>>,
}

fn select_one(m: VerdictMatrix, cfg: &SearchConfig, reduce: bool) -> Result<Selected, CliError> {
    let cfg = cfg.with_seed(derive_seed(cfg.seed, m.problem_id(), "search"));
    let (selection, trace) = wrong_select(&m, &cfg);
    let invariant = |e: String| CliError::Invariant(format!("problem {}: {e}", m.problem_id()));
    selection.verify(&m).map_err(|e| invariant(e.to_string()))?;
    let columns = if reduce {
        let cols = reduce_tests(&m, &selection);
        if !reduction_holds(&m, &selection, &cols) {
            return Err(invariant("test reduction lost rank".into()));
        }
        Some(cols)
    } else {
        None
    };
    Ok(Selected {
        matrix: m,
        selection,
        trace,
        columns,
    })
}

fn select(common: &Common, args: &SearchArgs, reduce: bool) -> Result<String, CliError> {
    let cfg = search_config(args, common.seed)?;
    let matrices = load_matrices(&read_input(common.input.as_deref())?)?;
    let results = matrices
        .into_par_iter()
        .map(|m| select_one(m, &cfg, reduce))
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = String::new();
    for r in &results {
        match common.format {
            Format::Records => {
                let mut v = json!({
                    "problem_id": r.matrix.problem_id(),
                    "selection": r.selection,
                    "trace": r.trace,
                });
                if let Some(cols) = &r.columns {
                    v["test_columns"] = json!(cols);
                }
                json_line(&mut out, &v);
            }
            Format::Text => {
                let picked = r.matrix.select_rows(&r.selection.indices);
                match &r.columns {
                    None => text::write(&picked, &mut out),
                    Some(cols) => {
                        let rows = picked.rows().iter().map(|s| s.restrict(cols)).collect();
                        let restricted = VerdictMatrix::new(
                            picked.problem_id(),
                            cols.len(),
                            picked.row_ids().to_vec(),
                            rows,
                        )
                        .map_err(|e| CliError::Invariant(e.to_string()))?;
                        text::write(&restricted, &mut out);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Basis codes of every accepted problem in a pipeline report.
fn read_bases(path: &Path) -> Result<BTreeMap<String, Vec<String>>, CliError> {
    let body = read_input(Some(path))?;
    let mut bases = BTreeMap::new();
    for (k, line) in body.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(line)
            .map_err(|e| CliError::Input(format!("{}:{}: {e}", path.display(), k + 1)))?;
        if v["kind"] != "problem" {
            continue;
        }
        let Some(codes) = v["selection"]["code_ids"].as_array() else {
            continue;
        };
        let pid = v["problem_id"]
            .as_str()
            .ok_or_else(|| CliError::Input(format!("{}:{}: missing problem_id", path.display(), k + 1)))?;
        let codes = codes
            .iter()
            .map(|c| c.as_str().map(str::to_owned))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| CliError::Input(format!("{}:{}: bad code_ids", path.display(), k + 1)))?;
        bases.insert(pid.to_owned(), codes);
    }
    Ok(bases)
}

fn metrics(common: &Common, basis: Option<&Path>) -> Result<String, CliError> {
    let tests = parse_test_results(&read_input(common.input.as_deref())?).map_err(input_err)?;
    let bases = basis.map(read_bases).transpose()?;
    if let Some(b) = &bases {
        if let Some(t) = tests.iter().find(|t| !b.contains_key(&t.problem_id)) {
            return Err(CliError::Input(format!(
                "problem {} has no selected basis in the report",
                t.problem_id
            )));
        }
    }
    let report = hack_rate(&group_tests(tests, bases.as_ref())).map_err(input_err)?;
    Ok(match common.format {
        Format::Records => report.to_records(),
        Format::Text => report.to_table(),
    })
}

fn synth(common: &Common, a: &SynthArgs) -> Result<String, CliError> {
    let spec = CorpusSpec {
        problems: a.problems,
        planted_rank: a.planted_rank,
        extra_dependent_rows: a.dependent,
        noise_rows: a.noise,
        d: a.d,
        overlap_bias: a.overlap_bias,
        correct_codes: a.correct,
        seed: common.seed,
    };
    let bundles = synth_corpus(&spec).map_err(usage)?;
    let mut out = String::new();
    for b in &bundles {
        match common.format {
            Format::Records => {
                for r in b.to_records() {
                    out.push_str(&serde_json::to_string(&r).expect("record serializes"));
                    out.push('\n');
                }
            }
            Format::Text => {
                let m = build_matrix(b.problem_id.clone(), &b.wrong)
                    .map_err(|e| CliError::Invariant(e.to_string()))?;
                text::write(&m, &mut out);
            }
        }
    }
    Ok(out)
}

fn pipeline(common: &Common, cfg: &PipelineConfig) -> Result<String, CliError> {
    let bundles = ingest_str(&read_input(common.input.as_deref())?).map_err(input_err)?;
    let report = run_pipeline(&bundles, cfg).map_err(|e| CliError::Invariant(e.to_string()))?;
    if !report.totals.balanced() {
        return Err(CliError::Invariant("corpus totals do not balance".into()));
    }
    Ok(match common.format {
        Format::Records => report.to_records(),
        Format::Text => {
            let mut out = format!(
                "{:<16} {:<26} {:>6} {:>6} {:>5} {:>12} {:>6}\n",
                "problem", "outcome", "rows", "kept", "rank", "diversity", "tests"
            );
            for p in &report.problems {
                let outcome = serde_json::to_value(p.outcome).expect("outcome serializes");
                let (kept, rank) = p
                    .filter
                    .as_ref()
                    .map_or((0, 0), |f| (f.rows_kept, f.rank_after));
                let diversity = p
                    .selection
                    .as_ref()
                    .map_or("-".to_owned(), |s| s.diversity.to_string());
                let tests = p
                    .test_columns
                    .as_ref()
                    .map_or("-".to_owned(), |c| c.len().to_string());
                let _ = writeln!(
                    out,
                    "{:<16} {:<26} {:>6} {:>6} {:>5} {:>12} {:>6}",
                    p.problem_id,
                    outcome.as_str().unwrap_or("?"),
                    p.wrong_codes_in,
                    kept,
                    rank,
                    diversity,
                    tests
                );
            }
            let t = &report.totals;
            let _ = writeln!(
                out,
                "{} problems: {} accepted, {} all-ones, {} low rank, {} too few rows, {} failed",
                t.problems_in,
                t.accepted,
                t.rejected_all_ones_column,
                t.rejected_low_rank,
                t.rejected_too_few_rows,
                t.failed
            );
            out
        }
    })
}
