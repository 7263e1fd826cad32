use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], env_seed: Option<&str>, stdin: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_faultbasis"));
    cmd.args(args).env_remove("FAULTBASIS_SEED");
    if let Some(s) = env_seed {
        cmd.env("FAULTBASIS_SEED", s);
    }
    if let Some(p) = stdin {
        cmd.stdin(std::fs::File::open(p).unwrap());
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const TOY: &str = "toy 3 3\nw1 001\nw2 011\nw3 010\n";

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&run(&["--help"], None, None)), 0);
    assert_eq!(code(&run(&["--version"], None, None)), 0);
    assert_eq!(code(&run(&[], None, None)), 1);
    assert_eq!(code(&run(&["frobnicate"], None, None)), 1);
    assert_eq!(code(&run(&["filter", "--tau", "abc"], None, None)), 1);
    assert_eq!(code(&run(&["select", "--workers", "0"], None, None)), 1);
    let dir = tempfile::tempdir().unwrap();
    let toy = write(dir.path(), "toy.txt", TOY);
    assert_eq!(code(&run(&["filter", "--tau", "1.5", "--in", &toy], None, None)), 1);
    assert_eq!(code(&run(&["select", "--restarts", "0", "--in", &toy], None, None)), 1);
    assert_eq!(code(&run(&["synth", "--planted-rank", "4", "--d", "3"], None, None)), 1);
    assert_eq!(code(&run(&["select", "--in", &toy], Some("not-a-number"), None)), 1);
}

#[test]
fn bad_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_matrix = write(dir.path(), "bad.txt", "toy 2 3\nw1 001\nw2 0x1\n");
    let o = run(&["filter", "--in", &bad_matrix], None, None);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let bad_records = write(
        dir.path(),
        "bad.jsonl",
        "{\"problem_id\":\"p\",\"code_id\":\"w\",\"label\":\"wrong\",\"verdicts\":[\"XX\"]}\n",
    );
    let o = run(&["pipeline", "--in", &bad_records], None, None);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("XX"));

    assert_eq!(code(&run(&["select", "--in", "/nonexistent/input"], None, None)), 2);
}

#[test]
fn seed_flag_wins_over_environment() {
    let dir = tempfile::tempdir().unwrap();
    let toy = write(dir.path(), "toy.txt", TOY);
    let seed_of = |o: Output| -> String {
        let v: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
        v["selection"]["seed"].to_string()
    };
    let base = ["select", "--in", &toy];
    let from_env = seed_of(run(&base, Some("5"), None));
    let from_flag = seed_of(run(&[&base[..], &["--seed", "5"]].concat(), None, None));
    let flag_wins = seed_of(run(&[&base[..], &["--seed", "5"]].concat(), Some("9"), None));
    let default = seed_of(run(&base, None, None));
    assert_eq!(from_env, from_flag);
    assert_eq!(flag_wins, from_flag);
    assert_ne!(default, from_flag);
}

#[test]
fn text_and_record_formats() {
    let dir = tempfile::tempdir().unwrap();
    let toy = write(dir.path(), "toy.txt", TOY);

    let o = run(&["reduce-tests", "--format", "text", "--in", &toy], None, None);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "toy 2 2\nw1 01\nw3 10\n");

    let o = run(&["filter", "--min-rank", "2", "--format", "text"], None, Some(Path::new(&toy)));
    assert_eq!(stdout(&o), TOY);
    let o = run(&["filter", "--in", &toy], None, None);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["outcome"], "rejected_too_few_rows");

    let out = dir.path().join("synth.txt");
    let o = run(
        &["synth", "--problems", "2", "--planted-rank", "3", "--d", "9", "--format", "text", "--out", out.to_str().unwrap()],
        None,
        None,
    );
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let body = std::fs::read_to_string(&out).unwrap();
    assert_eq!(body.lines().filter(|l| l.starts_with('p')).count(), 2);
}

#[test]
fn pipeline_then_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    let report = dir.path().join("report.jsonl");
    let c = corpus.to_str().unwrap();
    let r = report.to_str().unwrap();
    assert_eq!(code(&run(&["synth", "--problems", "3", "--seed", "1", "--out", c], None, None)), 0);
    assert_eq!(code(&run(&["pipeline", "--restarts", "50", "--in", c, "--out", r], None, None)), 0);

    // One generated test per accepted problem that fails the first basis code.
    let mut tests = String::new();
    for line in std::fs::read_to_string(&report).unwrap().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        if v["kind"] != "problem" || v["selection"].is_null() {
            continue;
        }
        let codes: Vec<&str> = v["selection"]["code_ids"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
        let wrong: serde_json::Map<String, serde_json::Value> = codes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.to_string(), serde_json::json!(if i == 0 { "WA" } else { "AC" })))
            .collect();
        let rec = serde_json::json!({
            "problem_id": v["problem_id"],
            "test_id": "t0",
            "correct_verdicts": ["AC"],
            "wrong_verdicts": wrong,
        });
        tests.push_str(&rec.to_string());
        tests.push('\n');
    }
    assert!(!tests.is_empty());
    let t = write(dir.path(), "tests.jsonl", &tests);
    let o = run(&["metrics", "--in", &t, "--basis", r, "--format", "text"], None, None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = stdout(&o);
    assert!(table.lines().next().unwrap().starts_with("problem"));
    assert!(table.contains("MACRO"));
    assert!(table.contains("100.00"));

    // A problem missing from the report is an input error.
    let stray = write(
        dir.path(),
        "stray.jsonl",
        "{\"problem_id\":\"zzz\",\"test_id\":\"t\",\"correct_verdicts\":[\"AC\"],\"wrong_verdicts\":{\"w\":\"WA\"}}\n",
    );
    assert_eq!(code(&run(&["metrics", "--in", &stray, "--basis", r], None, None)), 2);
}
