//! Plain-text codebook files.
//!
//! ```text
//! beamtrain-codebook 1
//! size 4
//! method deact
//! depth 2
//! codeword 0 1 1 1.0000000000000000e0 0.0000000000000000e0 ...
//! ```
//!
//! After the tag line come three header lines, then one `codeword` record per
//! line: layer `k`, index `n`, active count, then `2N` numbers giving the real
//! and imaginary parts of each weight in order. Numbers carry 17 significant
//! digits, so every `f64` survives the round trip exactly. Blank lines and
//! lines starting with `#` are ignored.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::{tree_depth, Codebook, Codeword, CodewordId, Method};
use crate::array::Awv;
use crate::error::{Error, Result};

pub const CODEBOOK_FORMAT_TAG: &str = "beamtrain-codebook 1";

pub fn export_codebook<W: Write>(cb: &Codebook, mut out: W) -> Result<()> {
    writeln!(out, "{CODEBOOK_FORMAT_TAG}")?;
    writeln!(out, "size {}", cb.size())?;
    writeln!(out, "method {}", cb.method())?;
    writeln!(out, "depth {}", cb.depth())?;
    for cw in cb.iter() {
        write!(
            out,
            "codeword {} {} {}",
            cw.layer(),
            cw.index(),
            cw.active_count()
        )?;
        for w in cw.weights() {
            write!(out, " {:.16e} {:.16e}", w.re, w.im)?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        what: "codebook",
        line,
        msg: msg.into(),
    }
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, field: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {field}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {field} '{tok}'")))
}

fn header(lines: &mut impl Iterator<Item = (usize, String)>, key: &str) -> Result<(usize, String)> {
    let (no, text) = lines
        .next()
        .ok_or_else(|| parse_err(0, format!("missing '{key}' header")))?;
    match text.split_once(' ') {
        Some((k, v)) if k == key => Ok((no, v.trim().to_string())),
        _ => Err(parse_err(no, format!("expected '{key}' header"))),
    }
}

pub fn import_codebook<R: BufRead>(input: R) -> Result<Codebook> {
    let mut lines = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if !trimmed.is_empty() && !trimmed.starts_with('#') {
            lines.push((i + 1, trimmed.to_string()));
        }
    }
    let mut lines = lines.into_iter();

    match lines.next() {
        Some((_, tag)) if tag == CODEBOOK_FORMAT_TAG => {}
        Some((no, _)) => return Err(parse_err(no, "not a codebook file")),
        None => return Err(parse_err(0, "empty file")),
    }
    let (no, size) = header(&mut lines, "size")?;
    let size: usize = parse_num(Some(&size), no, "size")?;
    let (no, method) = header(&mut lines, "method")?;
    let method: Method = method
        .parse()
        .map_err(|_| parse_err(no, "unknown method"))?;
    let (no, depth) = header(&mut lines, "depth")?;
    let depth: usize = parse_num(Some(&depth), no, "depth")?;
    if tree_depth(size).ok() != Some(depth) {
        return Err(parse_err(
            no,
            format!("depth {depth} does not match size {size}"),
        ));
    }

    let mut layers: Vec<Vec<Codeword>> = vec![Vec::new(); depth + 1];
    for (no, text) in lines {
        let mut toks = text.split_ascii_whitespace();
        if toks.next() != Some("codeword") {
            return Err(parse_err(no, "expected a codeword record"));
        }
        let k: usize = parse_num(toks.next(), no, "layer")?;
        let n: usize = parse_num(toks.next(), no, "index")?;
        let active: usize = parse_num(toks.next(), no, "active count")?;
        let mut weights = Vec::with_capacity(size);
        for _ in 0..size {
            let re: f64 = parse_num(toks.next(), no, "weight")?;
            let im: f64 = parse_num(toks.next(), no, "weight")?;
            weights.push(Complex64::new(re, im));
        }
        if toks.next().is_some() {
            return Err(parse_err(no, "trailing fields"));
        }
        if k > depth {
            return Err(parse_err(no, format!("layer {k} beyond depth {depth}")));
        }
        let awv = Awv::new(weights).map_err(|e| parse_err(no, e.to_string()))?;
        let cw =
            Codeword::new(CodewordId::new(k, n), awv).map_err(|e| parse_err(no, e.to_string()))?;
        if cw.active_count() != active {
            return Err(parse_err(
                no,
                format!(
                    "recorded active count {active}, weights have {}",
                    cw.active_count()
                ),
            ));
        }
        layers[k].push(cw);
    }
    Codebook::from_parts(size, method, layers)
}
