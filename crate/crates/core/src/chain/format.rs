//! Line-oriented chain format.
//!
//! ```text
//! n m
//! u v weight      (m lines, each undirected edge once, `u u w` for a self-loop)
//! ```
//!
//! Edges are written sorted by `(u, v)` with `u <= v`, and weights use the
//! shortest representation that parses back to the same `f64`, so
//! write/read/write is byte-stable.

use std::io::{BufRead, Write};

use crate::chain::ReversibleChain;
use crate::error::{Error, Result};

pub fn write_chain<W: Write>(chain: &ReversibleChain, mut out: W) -> Result<()> {
    writeln!(out, "{} {}", chain.n(), chain.edge_count())?;
    for (u, v, w) in chain.edges() {
        writeln!(out, "{u} {v} {w}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_chain<R: BufRead>(input: R) -> Result<ReversibleChain> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true));

    let (line_no, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    let header = header?;
    let mut fields = header.split_whitespace();
    let n: usize = parse_field(fields.next(), line_no, "state count")?;
    let m: usize = parse_field(fields.next(), line_no, "edge count")?;
    if fields.next().is_some() {
        return Err(Error::Parse { line: line_no, msg: "header must be `n m`".into() });
    }

    let mut builder = ReversibleChain::builder(n);
    let mut seen = 0;
    for (line_no, line) in lines {
        let line = line?;
        let mut f = line.split_whitespace();
        let u: usize = parse_field(f.next(), line_no, "source state")?;
        let v: usize = parse_field(f.next(), line_no, "target state")?;
        let w: f64 = parse_field(f.next(), line_no, "weight")?;
        if f.next().is_some() {
            return Err(Error::Parse { line: line_no, msg: "expected `u v weight`".into() });
        }
        if u >= n || v >= n {
            return Err(Error::Parse { line: line_no, msg: format!("state out of range for n = {n}") });
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::Parse { line: line_no, msg: format!("weight must be positive, got {w}") });
        }
        builder.add_edge(u, v, w);
        seen += 1;
    }
    if seen != m {
        return Err(Error::Parse { line: 1, msg: format!("header declares {m} edges, found {seen}") });
    }
    builder.build()
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, line: usize, what: &str) -> Result<T> {
    let raw = field.ok_or_else(|| Error::Parse { line, msg: format!("missing {what}") })?;
    raw.parse()
        .map_err(|_| Error::Parse { line, msg: format!("invalid {what} `{raw}`") })
}
