//! Plain-text tiling files:
//!
//! ```text
//! # optional comment lines
//! n 2
//! 1 1 1
//! 1 2 1
//! 2 1 1
//! 2 2 1
//! ```
//!
//! One `<row> <col> <size>` line per placement, single-space separated,
//! every line newline-terminated.

use std::fmt::Write;

use super::{Placement, Tiling};
use crate::error::{Error, Result};

fn parse_number(token: &str, line: usize, what: &str) -> Result<usize> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(
            line,
            format!("expected {what}, found `{token}`"),
        ));
    }
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("{what} `{token}` is out of range")))
}

/// Parses the file syntax without checking the covering invariants.
pub fn parse_tiling(text: &str) -> Result<Tiling> {
    if !text.is_empty() && !text.ends_with('\n') {
        let last = text.split('\n').count();
        return Err(Error::parse(last, "missing trailing newline"));
    }
    let mut n = None;
    let mut placements = Vec::new();
    for (i, line) in text.split_terminator('\n').enumerate() {
        let lineno = i + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(' ').collect();
        match n {
            None => {
                if fields.len() != 2 || fields[0] != "n" {
                    return Err(Error::parse(lineno, "expected header `n <side>`"));
                }
                n = Some(parse_number(fields[1], lineno, "side length")?);
            }
            Some(_) => {
                let [row, col, size] = fields[..] else {
                    return Err(Error::parse(lineno, "expected `<row> <col> <size>`"));
                };
                placements.push(Placement::new(
                    parse_number(row, lineno, "row")?,
                    parse_number(col, lineno, "column")?,
                    parse_number(size, lineno, "size")?,
                ));
            }
        }
    }
    let n =
        n.ok_or_else(|| Error::parse(text.lines().count().max(1), "missing header `n <side>`"))?;
    Tiling::new(n, placements)
}

/// Parses and validates a tiling file.
pub fn read_tiling(text: &str) -> Result<Tiling> {
    let tiling = parse_tiling(text)?;
    tiling.ensure_valid()?;
    Ok(tiling)
}

/// Serializes a valid tiling with placements sorted by `(row, col)`.
pub fn write_tiling(t: &Tiling) -> Result<String> {
    t.ensure_valid()?;
    let mut out = format!("n {}\n", t.n());
    for p in t.sorted().placements() {
        writeln!(out, "{} {} {}", p.row, p.col, p.size).expect("writing to a String");
    }
    Ok(out)
}
