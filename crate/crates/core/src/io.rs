//! Run manifests, CSV output and potential specifications.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::spectral::Potential;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Everything needed to reproduce an output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub tool_version: String,
    /// (label, sha256) of each input file.
    pub inputs: Vec<(String, String)>,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub threads: usize,
    /// Excluded from determinism comparisons.
    pub wall_time_s: Option<f64>,
}

impl RunManifest {
    pub fn new(subcommand: &str, seed: u64, threads: usize) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: Vec::new(),
            params: BTreeMap::new(),
            seed,
            threads,
            wall_time_s: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn input(&mut self, label: &str, sha256: &str) -> &mut Self {
        self.inputs.push((label.to_string(), sha256.to_string()));
        self
    }

    /// `# key=value` lines; wall time comes last.
    pub fn header_lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("# subcommand={}", self.subcommand),
            format!("# tool_version={}", self.tool_version),
            format!("# seed={}", self.seed),
            format!("# threads={}", self.threads),
        ];
        for (label, hash) in &self.inputs {
            out.push(format!("# input.{label}.sha256={hash}"));
        }
        for (k, v) in &self.params {
            out.push(format!("# param.{k}={v}"));
        }
        if let Some(t) = self.wall_time_s {
            out.push(format!("# wall_time_s={t:.3}"));
        }
        out
    }
}

/// A CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    /// Numbers use 17 significant digits in scientific notation.
    pub fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Writes the manifest header followed by the table.
pub fn write_csv<W: Write>(out: W, manifest: &RunManifest, table: &Table) -> Result<()> {
    let mut out = out;
    for line in manifest.header_lines() {
        writeln!(out, "{line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(&table.columns).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render)).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, manifest: &RunManifest, table: &Table) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(std::io::BufWriter::new(file), manifest, table)
}

/// Splits a written CSV back into (manifest lines, columns, rows).
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<String>, Vec<Vec<String>>)> {
    let mut header = Vec::new();
    let mut body_start = 0;
    for line in text.split_inclusive('\n') {
        if line.starts_with('#') {
            header.push(line.trim_end().to_string());
            body_start += line.len();
        } else {
            break;
        }
    }
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text[body_start..].as_bytes());
    let io = |e: csv::Error| Error::Parse { path: "csv".into(), reason: e.to_string() };
    let columns = r.headers().map_err(io)?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()).map_err(io))
        .collect::<Result<_>>()?;
    Ok((header, columns, rows))
}

/// Potential recipes accepted on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    /// `const:<c>`
    Constant(f64),
    /// `well:<depth>:<radius>[:<x1>,<x2>,...]`, V = −depth on the ball.
    Well { depth: f64, radius: f64, center: Option<Vec<f64>> },
    /// `bump:<depth>:<radius>[:<x1>,...]`, V = −depth(1 − |x−c|²/r²)₊²
    Bump { depth: f64, radius: f64, center: Option<Vec<f64>> },
    /// `file:<path>`, CSV rows x1,...,xN,V
    File(String),
}

fn parse_num(s: &str, what: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse { path: what.to_string(), reason: format!("not a number: {s:?}") })?;
    if !v.is_finite() {
        return Err(Error::Parse { path: what.to_string(), reason: "not finite".into() });
    }
    Ok(v)
}

fn parse_center(s: &str) -> Result<Vec<f64>> {
    s.split(',').enumerate().map(|(i, c)| parse_num(c, &format!("center[{i}]"))).collect()
}

pub fn parse_potential_spec(spec: &str) -> Result<PotentialSpec> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse { path: "potential".into(), reason: format!("expected kind:args, got {spec:?}") })?;
    let parts: Vec<&str> = if kind == "file" { vec![rest] } else { rest.split(':').collect() };
    let arity = |lo: usize, hi: usize| -> Result<()> {
        if parts.len() < lo || parts.len() > hi {
            return Err(Error::Parse {
                path: "potential".into(),
                reason: format!("{kind} takes {lo} to {hi} arguments, got {}", parts.len()),
            });
        }
        Ok(())
    };
    match kind {
        "const" => {
            arity(1, 1)?;
            Ok(PotentialSpec::Constant(parse_num(parts[0], "const")?))
        }
        "well" | "bump" => {
            arity(2, 3)?;
            let depth = parse_num(parts[0], "depth")?;
            let radius = parse_num(parts[1], "radius")?;
            if !(radius > 0.0) {
                return Err(Error::Parse { path: "radius".into(), reason: "must be positive".into() });
            }
            let center = parts.get(2).map(|c| parse_center(c)).transpose()?;
            Ok(if kind == "well" {
                PotentialSpec::Well { depth, radius, center }
            } else {
                PotentialSpec::Bump { depth, radius, center }
            })
        }
        "file" => {
            if rest.is_empty() {
                return Err(Error::Parse { path: "file".into(), reason: "empty path".into() });
            }
            Ok(PotentialSpec::File(rest.to_string()))
        }
        other => Err(Error::Parse { path: "potential".into(), reason: format!("unknown kind {other:?}") }),
    }
}

/// Rows `x1,...,xN,V`; `#` comments and a header row are allowed.
pub fn parse_potential_csv(text: &str, dim: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse { path: format!("row {i}"), reason: e.to_string() })?;
        if rec.len() != dim + 1 {
            return Err(Error::Parse { path: format!("row {i}"), reason: format!("expected {} columns", dim + 1) });
        }
        // A non-numeric first row is a header.
        if i == 0 && rec.iter().any(|c| c.parse::<f64>().is_err()) {
            continue;
        }
        let v = rec
            .iter()
            .enumerate()
            .map(|(j, c)| parse_num(c, &format!("row {i} col {j}")))
            .collect::<Result<Vec<f64>>>()?;
        out.push((v[..dim].to_vec(), v[dim]));
    }
    Ok(out)
}

impl PotentialSpec {
    pub fn build(&self, grid: &Arc<Grid>) -> Result<Potential> {
        let (lo, hi) = grid.bounding_box();
        let default_center: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let center_of = |c: &Option<Vec<f64>>| -> Result<Vec<f64>> {
            let c = c.clone().unwrap_or_else(|| default_center.clone());
            if c.len() != grid.dim() {
                return Err(Error::DimensionMismatch { expected: grid.dim(), got: c.len() });
            }
            Ok(c)
        };
        match self {
            PotentialSpec::Constant(c) => Potential::constant(grid.clone(), *c),
            PotentialSpec::Well { depth, radius, center } => {
                Potential::well(grid.clone(), *depth, &center_of(center)?, *radius)
            }
            PotentialSpec::Bump { depth, radius, center } => {
                let c = center_of(center)?;
                Potential::from_fn(grid.clone(), |x| {
                    let s2: f64 = x.iter().zip(&c).map(|(a, b)| ((a - b) / radius).powi(2)).sum();
                    if s2 < 1.0 {
                        -depth * (1.0 - s2).powi(2)
                    } else {
                        0.0
                    }
                })
            }
            PotentialSpec::File(path) => {
                let text = std::fs::read_to_string(path)?;
                potential_from_rows(grid, &parse_potential_csv(&text, grid.dim())?)
            }
        }
    }
}

/// Assigns each row to the grid node nearest to its point; every active node needs a value.
pub fn potential_from_rows(grid: &Arc<Grid>, rows: &[(Vec<f64>, f64)]) -> Result<Potential> {
    let h = grid.spacing();
    let origin = grid.coords(0);
    let mut values = vec![f64::NAN; grid.len()];
    for (x, v) in rows {
        let mut multi = Vec::with_capacity(grid.dim());
        let mut ok = true;
        for k in 0..grid.dim() {
            let i = ((x[k] - origin[k]) / h).round();
            if !(i >= 0.0 && (i as usize) < grid.shape()[k]) || ((x[k] - origin[k]) / h - i).abs() > 0.25 {
                ok = false;
                break;
            }
            multi.push(i as usize);
        }
        if ok {
            values[grid.flat_index(&multi)] = *v;
        }
    }
    Potential::new(grid.clone(), values)
}
