//! Plain-text file formats. Numbers are written with 17 significant digits,
//! so every format round-trips exactly. Indices are 0-based. Blank lines and
//! lines starting with `#` are ignored on input.
//!
//! * instance: `nnls m n`, then `row col value` triplets, then `b` and `m`
//!   values, one per line
//! * witness: `witness k eps0`, then `col weight`
//! * solution: `col weight`
//! * trace: tab-separated `iter col theta log_ratio psi log_phi`
//! * mixture: `gmm d k`, then `weight mean_1..mean_d var_1..var_d` per component
//! * samples: one whitespace-separated row per sample

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gmm::{GaussianMixture, Samples};
use crate::instances::Witness;
use crate::solver::TraceRecord;
use crate::system::{RawSystem, SparseSolution, SparseVec};

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Content lines with their 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} {tok:?}")))
}

fn finite(v: f64, line: usize, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::parse(line, format!("{what} must be finite")))
    }
}

fn no_trailing<'a>(mut toks: impl Iterator<Item = &'a str>, line: usize) -> Result<()> {
    match toks.next() {
        Some(t) => Err(Error::parse(line, format!("unexpected token {t:?}"))),
        None => Ok(()),
    }
}

pub fn format_instance(sys: &RawSystem) -> String {
    let mut out = format!("nnls {} {}\n", sys.m, sys.n());
    for (col, c) in sys.columns.iter().enumerate() {
        for &(row, v) in c.entries() {
            let _ = writeln!(out, "{row} {col} {}", num(v));
        }
    }
    out.push_str("b\n");
    for &v in &sys.b {
        let _ = writeln!(out, "{}", num(v));
    }
    out
}

pub fn parse_instance(text: &str) -> Result<RawSystem> {
    let mut it = lines(text);
    let (hl, header) = it.next().ok_or_else(|| Error::parse(1, "empty instance file"))?;
    let mut h = header.split_whitespace();
    if h.next() != Some("nnls") {
        return Err(Error::parse(hl, "expected header `nnls m n`"));
    }
    let m: usize = field(h.next(), hl, "m")?;
    let n: usize = field(h.next(), hl, "n")?;
    no_trailing(h, hl)?;

    let mut triplets: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut saw_b = false;
    for (ln, l) in it.by_ref() {
        if l == "b" {
            saw_b = true;
            break;
        }
        let mut t = l.split_whitespace();
        let row: usize = field(t.next(), ln, "row")?;
        let col: usize = field(t.next(), ln, "col")?;
        let v = finite(field(t.next(), ln, "value")?, ln, "value")?;
        no_trailing(t, ln)?;
        if row >= m || col >= n {
            return Err(Error::parse(ln, format!("entry ({row}, {col}) outside {m} x {n}")));
        }
        if v < 0.0 {
            return Err(Error::parse(ln, format!("negative entry {v}")));
        }
        triplets[col].push((row, v));
    }
    if !saw_b {
        return Err(Error::parse(text.lines().count().max(1), "missing `b` section"));
    }
    let mut b = Vec::with_capacity(m);
    for (ln, l) in it {
        let mut t = l.split_whitespace();
        let v = finite(field(t.next(), ln, "b value")?, ln, "b value")?;
        no_trailing(t, ln)?;
        if v < 0.0 {
            return Err(Error::parse(ln, format!("negative b value {v}")));
        }
        if b.len() == m {
            return Err(Error::parse(ln, format!("more than {m} b values")));
        }
        b.push(v);
    }
    if b.len() != m {
        return Err(Error::parse(
            text.lines().count().max(1),
            format!("expected {m} b values, found {}", b.len()),
        ));
    }
    let columns = triplets
        .into_iter()
        .map(SparseVec::from_pairs)
        .collect::<Result<Vec<_>>>()?;
    RawSystem::new(m, columns, b)
}

fn format_weights(out: &mut String, x: &SparseSolution) {
    for (id, w) in x.iter() {
        let _ = writeln!(out, "{id} {}", num(w));
    }
}

fn parse_weights<'a>(it: impl Iterator<Item = (usize, &'a str)>) -> Result<SparseSolution> {
    let mut pairs = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (ln, l) in it {
        let mut t = l.split_whitespace();
        let id: usize = field(t.next(), ln, "column id")?;
        let w = finite(field(t.next(), ln, "weight")?, ln, "weight")?;
        no_trailing(t, ln)?;
        if !(w > 0.0) {
            return Err(Error::parse(ln, format!("weight must be positive, got {w}")));
        }
        if !seen.insert(id) {
            return Err(Error::parse(ln, format!("column {id} listed twice")));
        }
        pairs.push((id, w));
    }
    SparseSolution::from_pairs(pairs)
}

pub fn format_solution(x: &SparseSolution) -> String {
    let mut out = String::new();
    format_weights(&mut out, x);
    out
}

pub fn parse_solution(text: &str) -> Result<SparseSolution> {
    parse_weights(lines(text))
}

pub fn format_witness(w: &Witness) -> String {
    let mut out = format!("witness {} {}\n", w.k, num(w.eps0));
    format_weights(&mut out, &w.xstar);
    out
}

pub fn parse_witness(text: &str) -> Result<Witness> {
    let mut it = lines(text);
    let (hl, header) = it.next().ok_or_else(|| Error::parse(1, "empty witness file"))?;
    let mut h = header.split_whitespace();
    if h.next() != Some("witness") {
        return Err(Error::parse(hl, "expected header `witness k eps0`"));
    }
    let k: usize = field(h.next(), hl, "k")?;
    let eps0 = finite(field(h.next(), hl, "eps0")?, hl, "eps0")?;
    no_trailing(h, hl)?;
    Ok(Witness {
        xstar: parse_weights(it)?,
        eps0,
        k,
    })
}

pub fn format_trace(trace: &[TraceRecord]) -> String {
    let mut out = String::new();
    for r in trace {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.iter,
            r.col_id,
            num(r.theta),
            num(r.log_ratio),
            num(r.psi),
            num(r.log_phi)
        );
    }
    out
}

pub fn format_mixture(mix: &GaussianMixture) -> String {
    let mut out = format!("gmm {} {}\n", mix.d(), mix.k());
    for c in mix.components() {
        let mut fields = vec![num(c.weight)];
        fields.extend(c.gaussian.mean().iter().map(|&v| num(v)));
        fields.extend(c.gaussian.var().iter().map(|&v| num(v)));
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_mixture(text: &str) -> Result<GaussianMixture> {
    let mut it = lines(text);
    let (hl, header) = it.next().ok_or_else(|| Error::parse(1, "empty mixture file"))?;
    let mut h = header.split_whitespace();
    if h.next() != Some("gmm") {
        return Err(Error::parse(hl, "expected header `gmm d k`"));
    }
    let d: usize = field(h.next(), hl, "d")?;
    let k: usize = field(h.next(), hl, "k")?;
    no_trailing(h, hl)?;
    let mut parts = Vec::with_capacity(k);
    for (ln, l) in it {
        let vals = l
            .split_whitespace()
            .map(|t| field::<f64>(Some(t), ln, "number").and_then(|v| finite(v, ln, "number")))
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() != 1 + 2 * d {
            return Err(Error::parse(
                ln,
                format!("expected {} numbers, found {}", 1 + 2 * d, vals.len()),
            ));
        }
        parts.push((vals[0], vals[1..=d].to_vec(), vals[d + 1..].to_vec()));
    }
    if parts.len() != k {
        return Err(Error::parse(
            text.lines().count().max(1),
            format!("expected {k} components, found {}", parts.len()),
        ));
    }
    GaussianMixture::from_parts(&parts)
}

pub fn format_samples(s: &Samples) -> String {
    let mut out = String::new();
    for row in s.rows() {
        let fields: Vec<String> = row.iter().map(|&v| num(v)).collect();
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

/// The row length of the first line fixes `d`; an empty file gives an empty
/// one-dimensional sample set.
pub fn parse_samples(text: &str) -> Result<Samples> {
    let mut d = None;
    let mut data = Vec::new();
    for (ln, l) in lines(text) {
        let before = data.len();
        for t in l.split_whitespace() {
            data.push(finite(field(Some(t), ln, "sample value")?, ln, "sample value")?);
        }
        let len = data.len() - before;
        match d {
            None => d = Some(len),
            Some(d) if d != len => {
                return Err(Error::parse(ln, format!("row has {len} values, expected {d}")))
            }
            _ => {}
        }
    }
    Samples::new(d.unwrap_or(1), data)
}
