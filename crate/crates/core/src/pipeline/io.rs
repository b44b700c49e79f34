//! Plain-text code files.
//!
//! ```text
//! # comment lines start with '#'
//! q k n
//! k rows of n element codes, space separated
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::code::{CodeError, GeneratorMatrix, LinearCode};
use crate::field::FieldSpec;
use crate::limits::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        line,
        msg: msg.into(),
    }
}

pub fn parse_code(text: &str, limits: Limits) -> Result<LinearCode, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines
        .next()
        .ok_or_else(|| err(1, "missing \"q k n\" header"))?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|e| err(hl, format!("bad header {header:?}: {e}")))?;
    let [q, k, n] = nums[..] else {
        return Err(err(hl, format!("header must be \"q k n\", got {header:?}")));
    };
    let field = u32::try_from(q)
        .map_err(|_| err(hl, format!("unsupported field order {q}")))
        .and_then(|q| FieldSpec::new(q).map_err(|e| err(hl, e.to_string())))?;
    if k == 0 || n == 0 {
        return Err(err(hl, "k and n must be positive"));
    }
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(k);
    let mut last = hl;
    for (ln, line) in lines {
        if rows.len() == k {
            return Err(err(ln, format!("more than k = {k} rows")));
        }
        let row: Vec<u32> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| err(ln, format!("bad entry: {e}")))?;
        if row.len() != n {
            return Err(err(
                ln,
                format!("row has {} entries, expected n = {n}", row.len()),
            ));
        }
        if let Some(&bad) = row.iter().find(|&&c| c >= q as u32) {
            return Err(err(ln, format!("element code {bad} is not below q = {q}")));
        }
        rows.push(row);
        last = ln;
    }
    if rows.len() != k {
        return Err(err(
            last,
            format!("expected k = {k} rows, found {}", rows.len()),
        ));
    }
    let gen = GeneratorMatrix::from_codes(field, &rows).map_err(|e| match e {
        CodeError::RankDeficient { .. } => err(last, e.to_string()),
        other => err(hl, other.to_string()),
    })?;
    LinearCode::new(gen, limits).map_err(|e| err(hl, e.to_string()))
}

pub fn serialize_code(code: &LinearCode) -> String {
    let gen = code.generator();
    let mut out = String::new();
    writeln!(out, "{} {} {}", gen.field().q(), gen.k(), gen.n()).unwrap();
    for r in gen.rows() {
        let line: Vec<String> = r.codes().iter().map(u8::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
