//! Line-oriented matrix text format.
//!
//! ```text
//! <problem_id> <n> <d>
//! <code_id> <d characters in {0,1}>      (n lines)
//! ```
//!
//! ASCII only, fields separated by a single space, every line terminated by
//! LF. A file may hold several matrices back to back.

use std::fmt::Write as _;

use thiserror::Error;

use super::{MatrixError, Signature, VerdictMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {reason}")]
pub struct TextError {
    pub line: usize,
    pub reason: String,
}

fn err(line: usize, reason: impl Into<String>) -> TextError {
    TextError {
        line,
        reason: reason.into(),
    }
}

fn fields(line_no: usize, line: &str, expected: usize) -> Result<Vec<&str>, TextError> {
    if let Some(c) = line.chars().find(|c| !c.is_ascii_graphic() && *c != ' ') {
        return Err(err(line_no, format!("invalid character {c:?}")));
    }
    let parts: Vec<&str> = line.split(' ').collect();
    if parts.len() != expected || parts.iter().any(|p| p.is_empty()) {
        return Err(err(
            line_no,
            format!("expected {expected} single-space separated fields"),
        ));
    }
    Ok(parts)
}

fn count(line_no: usize, field: &str, what: &str) -> Result<usize, TextError> {
    if !field.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err(line_no, format!("{what} {field:?} is not a count")));
    }
    field
        .parse()
        .map_err(|_| err(line_no, format!("{what} {field:?} out of range")))
}

/// Parses every matrix in `input`.
pub fn parse(input: &str) -> Result<Vec<VerdictMatrix>, TextError> {
    if input.is_empty() {
        return Ok(Vec::new());
    }
    let Some(body) = input.strip_suffix('\n') else {
        let last = input.split('\n').count();
        return Err(err(last, "missing final line feed"));
    };
    let lines: Vec<&str> = body.split('\n').collect();
    let mut out = Vec::new();
    let mut at = 0;
    while at < lines.len() {
        let header_no = at + 1;
        let header = fields(header_no, lines[at], 3)?;
        let problem_id = header[0];
        let n = count(header_no, header[1], "row count")?;
        let d = count(header_no, header[2], "column count")?;
        if d == 0 {
            return Err(err(header_no, "column count must be at least 1"));
        }
        if lines.len() - at - 1 < n {
            return Err(err(
                lines.len(),
                format!("matrix {problem_id} declares {n} rows but the input ends early"),
            ));
        }
        let mut ids = Vec::with_capacity(n);
        let mut rows = Vec::with_capacity(n);
        for k in 0..n {
            let line_no = header_no + 1 + k;
            let parts = fields(line_no, lines[at + 1 + k], 2)?;
            if parts[1].len() != d {
                return Err(err(
                    line_no,
                    format!("expected {d} bits, found {}", parts[1].len()),
                ));
            }
            let row: Signature = parts[1]
                .parse()
                .map_err(|e: MatrixError| err(line_no, e.to_string()))?;
            ids.push(parts[0].to_owned());
            rows.push(row);
        }
        let m = VerdictMatrix::new(problem_id, d, ids, rows)
            .map_err(|e| err(header_no, e.to_string()))?;
        out.push(m);
        at += n + 1;
    }
    Ok(out)
}

pub fn write(m: &VerdictMatrix, out: &mut String) {
    let _ = writeln!(out, "{} {} {}", m.problem_id(), m.len(), m.width());
    for (id, row) in m.row_ids().iter().zip(m.rows()) {
        let _ = writeln!(out, "{id} {row}");
    }
}

pub fn to_string(m: &VerdictMatrix) -> String {
    let mut s = String::new();
    write(m, &mut s);
    s
}
