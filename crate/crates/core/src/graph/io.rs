//! Graph files.
//!
//! Text: a header line `DBM 1 <n> <m> <lambda> <alpha> <seed>` followed by one
//! `src dst r` line per edge, `r` in `{0, 1}`.
//!
//! Binary (little endian): magic `DBMB`, `u32` version, `u64` n, `u64` m,
//! `f64` lambda, `f64` alpha, `u64` seed, `u64` edge count, then per edge
//! `u32` src, `u32` dst, `u8` rewired flag.
//!
//! Floats are written in shortest round-trip form (text) or raw bits
//! (binary), so both formats round-trip exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{DbmParams, Digraph};
use crate::error::{Error, Result};

const VERSION: u32 = 1;
const BINARY_MAGIC: &[u8; 4] = b"DBMB";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Text,
    Binary,
}

pub fn save_graph(graph: &Digraph, params: &DbmParams, path: &Path, format: GraphFormat) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        GraphFormat::Text => write_text(graph, params, &mut out)?,
        GraphFormat::Binary => write_binary(graph, params, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

/// Reads either format, detected from the leading bytes.
pub fn load_graph(path: &Path) -> Result<(DbmParams, Digraph)> {
    let mut input = BufReader::new(File::open(path)?);
    let head = input.fill_buf()?;
    if head.starts_with(BINARY_MAGIC) {
        read_binary(&mut input)
    } else {
        read_text(input)
    }
}

fn write_text(graph: &Digraph, params: &DbmParams, out: &mut impl Write) -> Result<()> {
    writeln!(
        out,
        "DBM {VERSION} {} {} {} {} {}",
        params.n, params.m, params.lambda, params.alpha, params.seed
    )?;
    for (s, t, r) in graph.edges() {
        writeln!(out, "{s} {t} {}", r as u8)?;
    }
    Ok(())
}

fn field<T: std::str::FromStr>(token: Option<&str>, line: usize, what: &str) -> Result<T> {
    token
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse {
            line,
            message: format!("expected {what}"),
        })
}

fn read_text(input: impl BufRead) -> Result<(DbmParams, Digraph)> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        message: "missing header".into(),
    })??;
    let mut tok = header.split_whitespace();
    if tok.next() != Some("DBM") {
        return Err(Error::Parse {
            line: 1,
            message: "missing DBM tag".into(),
        });
    }
    let version: u32 = field(tok.next(), 1, "version")?;
    if version != VERSION {
        return Err(Error::FormatVersion(version));
    }
    let params = DbmParams {
        n: field(tok.next(), 1, "n")?,
        m: field(tok.next(), 1, "m")?,
        lambda: field(tok.next(), 1, "lambda")?,
        alpha: field(tok.next(), 1, "alpha")?,
        seed: field(tok.next(), 1, "seed")?,
    };
    params.validate()?;
    let mut edges = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let no = k + 2;
        let mut tok = line.split_whitespace();
        let s: usize = field(tok.next(), no, "src")?;
        let t: usize = field(tok.next(), no, "dst")?;
        let r = match tok.next() {
            Some("0") => false,
            Some("1") => true,
            _ => {
                return Err(Error::Parse {
                    line: no,
                    message: "expected rewired flag 0 or 1".into(),
                })
            }
        };
        edges.push((s, t, r));
    }
    let graph = Digraph::new(params.n, params.m, edges)?;
    Ok((params, graph))
}

fn write_binary(graph: &Digraph, params: &DbmParams, out: &mut impl Write) -> Result<()> {
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(params.n as u64).to_le_bytes())?;
    out.write_all(&(params.m as u64).to_le_bytes())?;
    out.write_all(&params.lambda.to_bits().to_le_bytes())?;
    out.write_all(&params.alpha.to_bits().to_le_bytes())?;
    out.write_all(&params.seed.to_le_bytes())?;
    out.write_all(&(graph.edge_count() as u64).to_le_bytes())?;
    for (s, t, r) in graph.edges() {
        out.write_all(&(s as u32).to_le_bytes())?;
        out.write_all(&(t as u32).to_le_bytes())?;
        out.write_all(&[r as u8])?;
    }
    Ok(())
}

fn read_array<const N: usize>(input: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    input.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u64(input: &mut impl Read) -> Result<u64> {
    Ok(u64::from_le_bytes(read_array(input)?))
}

fn read_binary(input: &mut impl Read) -> Result<(DbmParams, Digraph)> {
    let _magic: [u8; 4] = read_array(input)?;
    let version = u32::from_le_bytes(read_array(input)?);
    if version != VERSION {
        return Err(Error::FormatVersion(version));
    }
    let params = DbmParams {
        n: read_u64(input)? as usize,
        m: read_u64(input)? as usize,
        lambda: f64::from_bits(read_u64(input)?),
        alpha: f64::from_bits(read_u64(input)?),
        seed: read_u64(input)?,
    };
    params.validate()?;
    let count = read_u64(input)? as usize;
    let mut edges = Vec::with_capacity(count.min(1 << 24));
    for _ in 0..count {
        let s = u32::from_le_bytes(read_array(input)?) as usize;
        let t = u32::from_le_bytes(read_array(input)?) as usize;
        let [r] = read_array::<1>(input)?;
        if r > 1 {
            return Err(Error::MalformedGraph(format!("rewired flag {r}")));
        }
        edges.push((s, t, r == 1));
    }
    let graph = Digraph::new(params.n, params.m, edges)?;
    Ok((params, graph))
}
