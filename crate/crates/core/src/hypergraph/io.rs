//! Text formats.
//!
//! Hypergraph: header `k n m`, then `m` lines of `k` vertex ids. Lines
//! starting with `#` and blank lines are skipped.
//!
//! Coloring: one line `v c` per vertex, or `v -` when `v` is uncolored.

use std::io::{BufRead, Write};

use super::{Coloring, Hypergraph};
use crate::error::{Error, Result};

fn data_lines<R: BufRead>(r: R) -> impl Iterator<Item = Result<(usize, String)>> {
    r.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(Error::Io(e))),
        Ok(l) => {
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                None
            } else {
                Some(Ok((i + 1, t.to_string())))
            }
        }
    })
}

fn parse_nums(line: usize, s: &str) -> Result<Vec<u64>> {
    s.split_whitespace()
        .map(|tok| {
            tok.parse::<u64>().map_err(|_| Error::Parse { line, msg: format!("bad integer `{tok}`") })
        })
        .collect()
}

pub fn read_hypergraph<R: BufRead>(r: R) -> Result<Hypergraph> {
    let mut lines = data_lines(r);
    let (hl, header) = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::Parse { line: 1, msg: "missing `k n m` header".into() })?;
    let hdr = parse_nums(hl, &header)?;
    let [k, n, m] = hdr[..] else {
        return Err(Error::Parse { line: hl, msg: "header must be `k n m`".into() });
    };
    let mut raw = Vec::with_capacity(m as usize);
    for item in lines {
        let (ln, s) = item?;
        let e = parse_nums(ln, &s)?;
        if e.len() != k as usize {
            return Err(Error::Parse { line: ln, msg: format!("expected {k} ids, found {}", e.len()) });
        }
        raw.push(e);
    }
    if raw.len() as u64 != m {
        return Err(Error::Parse { line: hl, msg: format!("header says {m} edges, found {}", raw.len()) });
    }
    Hypergraph::build(k as usize, n as usize, &raw)
}

pub fn parse_hypergraph(s: &str) -> Result<Hypergraph> {
    read_hypergraph(s.as_bytes())
}

pub fn write_hypergraph<W: Write>(h: &Hypergraph, mut w: W) -> Result<()> {
    writeln!(w, "{} {} {}", h.k(), h.n(), h.m())?;
    let mut line = String::new();
    for e in h.edges() {
        line.clear();
        for (i, v) in e.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&v.to_string());
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_coloring<W: Write>(col: &Coloring, mut w: W) -> Result<()> {
    for (v, c) in col.assignment.iter().enumerate() {
        match c {
            Some(c) => writeln!(w, "{v} {c}")?,
            None => writeln!(w, "{v} -")?,
        }
    }
    Ok(())
}

/// Reads a coloring for `n` vertices; vertices not mentioned stay uncolored.
pub fn read_coloring<R: BufRead>(r: R, n: usize) -> Result<Coloring> {
    let mut col = Coloring::uncolored(n);
    for item in data_lines(r) {
        let (ln, s) = item?;
        let mut it = s.split_whitespace();
        let (Some(v), Some(c), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse { line: ln, msg: "expected `v c` or `v -`".into() });
        };
        let v: usize = v.parse().map_err(|_| Error::Parse { line: ln, msg: format!("bad vertex `{v}`") })?;
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v as u64, n });
        }
        col.assignment[v] = if c == "-" {
            None
        } else {
            Some(c.parse().map_err(|_| Error::Parse { line: ln, msg: format!("bad color `{c}`") })?)
        };
    }
    Ok(col)
}
