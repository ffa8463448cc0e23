//! Plain-text file formats.
//!
//! Decode tables: CSV with header `snr_db,n_colliders,p_decode`.
//!
//! Finite-field matrices: a header line `field p=<p> n=<n>` followed by one
//! CSV row of decimal coefficients per matrix row.
//!
//! Sparse problems (`mmtc-sparse-problem 1`): whitespace-separated
//! `key value` header lines, then named sections `matrix`, `truth`, `noise`
//! and `observation`. Matrix rows hold `re im` pairs; vectors hold one
//! `re im` pair per line. Floats are written so that they parse back
//! exactly. Solver outputs (`mmtc-sparse-solution 1`) list the support and
//! the estimate in the same style.

use std::io::{BufRead, BufReader, Read, Write};

use anyhow::{anyhow, bail, Context, Result};
use mmtc_core::capture::SnrDecodeTable;
use mmtc_core::ff::{FfMatrix, Field, FieldSpec};
use mmtc_core::sparse::{CMatrix, CVector, SparseProblem, C64};

pub const DECODE_TABLE_HEADER: [&str; 3] = ["snr_db", "n_colliders", "p_decode"];

pub fn read_decode_table<R: Read>(input: R) -> Result<SnrDecodeTable> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if header != DECODE_TABLE_HEADER {
        bail!("expected header snr_db,n_colliders,p_decode, found {}", header.join(","));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        if rec.len() != 3 {
            bail!("line {line}: expected 3 fields");
        }
        let f = |j: usize| rec[j].trim().to_string();
        rows.push((
            f(0).parse().with_context(|| format!("line {line}: snr_db"))?,
            f(1).parse().with_context(|| format!("line {line}: n_colliders"))?,
            f(2).parse().with_context(|| format!("line {line}: p_decode"))?,
        ));
    }
    SnrDecodeTable::from_rows(&rows).map_err(|e| anyhow!("{e}"))
}

pub fn write_decode_table<W: Write>(table: &SnrDecodeTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DECODE_TABLE_HEADER)?;
    for (snr, n, p) in table.rows() {
        w.write_record([format!("{snr}"), n.to_string(), format!("{p}")])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ff_matrix<W: Write>(m: &FfMatrix, mut out: W) -> Result<()> {
    let spec = m.field().spec();
    writeln!(out, "field p={} n={}", spec.p, spec.n)?;
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(u32::to_string).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

fn parse_field_header(line: &str) -> Result<FieldSpec> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some("field") {
        bail!("line 1: expected `field p=<p> n=<n>`");
    }
    let (mut p, mut n) = (None, 1);
    for part in parts {
        match part.split_once('=') {
            Some(("p", v)) => p = Some(v.parse().context("line 1: p")?),
            Some(("n", v)) => n = v.parse().context("line 1: n")?,
            _ => bail!("line 1: unexpected `{part}`"),
        }
    }
    Ok(FieldSpec { p: p.ok_or_else(|| anyhow!("line 1: missing p"))?, n })
}

pub fn read_ff_matrix<R: Read>(input: R) -> Result<FfMatrix> {
    let mut lines = BufReader::new(input).lines();
    let header = lines.next().ok_or_else(|| anyhow!("empty input"))??;
    let field = Field::new(parse_field_header(header.trim())?).map_err(|e| anyhow!("{e}"))?;
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|x| {
                let v: u32 = x.trim().parse().with_context(|| format!("line {}: `{x}`", i + 2))?;
                field.check(v).map_err(|e| anyhow!("line {}: {e}", i + 2))
            })
            .collect::<Result<Vec<u32>>>()?;
        rows.push(row);
    }
    FfMatrix::from_rows(field, &rows).map_err(|e| anyhow!("{e}"))
}

const PROBLEM_MAGIC: &str = "mmtc-sparse-problem 1";
const SOLUTION_MAGIC: &str = "mmtc-sparse-solution 1";

fn pair(z: C64) -> String {
    format!("{:?} {:?}", z.re, z.im)
}

fn write_vector<W: Write>(out: &mut W, name: &str, v: &CVector) -> Result<()> {
    writeln!(out, "{name}")?;
    for z in v.iter() {
        writeln!(out, "{}", pair(*z))?;
    }
    Ok(())
}

pub fn write_sparse_problem<W: Write>(p: &SparseProblem, mut out: W) -> Result<()> {
    writeln!(out, "{PROBLEM_MAGIC}")?;
    writeln!(out, "rows {}", p.matrix.nrows())?;
    writeln!(out, "cols {}", p.matrix.ncols())?;
    writeln!(out, "group_size {}", p.group_size)?;
    writeln!(out, "noise_sigma {:?}", p.noise_sigma)?;
    writeln!(out, "matrix")?;
    for r in 0..p.matrix.nrows() {
        let row: Vec<String> = (0..p.matrix.ncols()).map(|c| pair(p.matrix[(r, c)])).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    write_vector(&mut out, "truth", &p.truth)?;
    write_vector(&mut out, "noise", &p.noise)?;
    write_vector(&mut out, "observation", &p.observation)?;
    Ok(())
}

struct Lines {
    items: Vec<(usize, String)>,
    pos: usize,
}

impl Lines {
    fn new<R: Read>(input: R) -> Result<Self> {
        let mut items = Vec::new();
        for (i, l) in BufReader::new(input).lines().enumerate() {
            let l = l?;
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('#') {
                items.push((i + 1, t.to_string()));
            }
        }
        Ok(Lines { items, pos: 0 })
    }

    fn next(&mut self) -> Result<(usize, &str)> {
        let (n, s) = self.items.get(self.pos).ok_or_else(|| anyhow!("unexpected end of input"))?;
        self.pos += 1;
        Ok((*n, s.as_str()))
    }

    fn expect(&mut self, word: &str) -> Result<()> {
        let (n, s) = self.next()?;
        if s != word {
            bail!("line {n}: expected `{word}`, found `{s}`");
        }
        Ok(())
    }

    fn key<T: std::str::FromStr>(&mut self, key: &str) -> Result<T>
    where
        T::Err: std::error::Error + Send + Sync + 'static,
    {
        let (n, s) = self.next()?;
        match s.split_once(' ') {
            Some((k, v)) if k == key => v.trim().parse().with_context(|| format!("line {n}: {key}")),
            _ => bail!("line {n}: expected `{key} <value>`"),
        }
    }

    fn floats(&mut self, count: usize) -> Result<Vec<f64>> {
        let (n, s) = self.next()?;
        let v = s
            .split_whitespace()
            .map(|x| x.parse::<f64>().with_context(|| format!("line {n}: `{x}`")))
            .collect::<Result<Vec<f64>>>()?;
        if v.len() != count {
            bail!("line {n}: expected {count} numbers, found {}", v.len());
        }
        Ok(v)
    }

    fn vector(&mut self, name: &str, len: usize) -> Result<CVector> {
        self.expect(name)?;
        let mut v = CVector::zeros(len);
        for i in 0..len {
            let z = self.floats(2)?;
            v[i] = C64::new(z[0], z[1]);
        }
        Ok(v)
    }
}

pub fn read_sparse_problem<R: Read>(input: R) -> Result<SparseProblem> {
    let mut l = Lines::new(input)?;
    l.expect(PROBLEM_MAGIC)?;
    let rows: usize = l.key("rows")?;
    let cols: usize = l.key("cols")?;
    let group_size: usize = l.key("group_size")?;
    let noise_sigma: f64 = l.key("noise_sigma")?;
    l.expect("matrix")?;
    let mut matrix = CMatrix::zeros(rows, cols);
    for r in 0..rows {
        let v = l.floats(2 * cols)?;
        for c in 0..cols {
            matrix[(r, c)] = C64::new(v[2 * c], v[2 * c + 1]);
        }
    }
    let truth = l.vector("truth", cols)?;
    let noise = l.vector("noise", rows)?;
    let observation = l.vector("observation", rows)?;
    let p = SparseProblem::from_parts(matrix, truth, noise, group_size, noise_sigma).map_err(|e| anyhow!("{e}"))?;
    if p.observation != observation {
        bail!("observation does not equal matrix * truth + noise");
    }
    Ok(p)
}

/// Solver output: selected support and the estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSolution {
    pub support: Vec<usize>,
    pub estimate: CVector,
}

pub fn write_sparse_solution<W: Write>(s: &SparseSolution, mut out: W) -> Result<()> {
    writeln!(out, "{SOLUTION_MAGIC}")?;
    writeln!(out, "len {}", s.estimate.len())?;
    let support: Vec<String> = s.support.iter().map(usize::to_string).collect();
    writeln!(out, "support {}", support.join(" "))?;
    write_vector(&mut out, "estimate", &s.estimate)
}

pub fn read_sparse_solution<R: Read>(input: R) -> Result<SparseSolution> {
    let mut l = Lines::new(input)?;
    l.expect(SOLUTION_MAGIC)?;
    let len: usize = l.key("len")?;
    let (n, s) = l.next()?;
    let rest = s.strip_prefix("support").ok_or_else(|| anyhow!("line {n}: expected `support ...`"))?;
    let support = rest
        .split_whitespace()
        .map(|x| x.parse::<usize>().with_context(|| format!("line {n}: `{x}`")))
        .collect::<Result<Vec<usize>>>()?;
    let estimate = l.vector("estimate", len)?;
    Ok(SparseSolution { support, estimate })
}
