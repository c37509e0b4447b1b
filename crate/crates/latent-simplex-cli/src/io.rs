//! Bit-exact file formats: MatrixMarket for the sparse data matrix, CSV
//! with 17-significant-digit decimals for dense matrices, plain text for
//! subsets, JSON for metadata. Serializing a loaded file reproduces it
//! byte for byte.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use latent_simplex::linalg::{DenseMatrix, SparseMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

const MM_HEADER: &str = "%%MatrixMarket matrix coordinate real general";

/// 17 significant digits round-trips every f64 exactly.
fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_matrix_market(path: &Path, a: &SparseMatrix) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<File>, s: String| -> CliResult<()> {
        out.write_all(s.as_bytes()).map_err(|e| CliError::io(path, e))
    };
    write(&mut out, format!("{MM_HEADER}\n"))?;
    write(
        &mut out,
        format!("{} {} {}\n", a.n_rows(), a.n_cols(), a.nnz()),
    )?;
    for j in 0..a.n_cols() {
        for &(i, v) in a.column(j) {
            write(&mut out, format!("{} {} {}\n", i + 1, j + 1, fmt_value(v)))?;
        }
    }
    out.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_matrix_market(path: &Path) -> CliResult<SparseMatrix> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let (line_no, header) = next_line(path, &mut lines)?;
    if header.trim() != MM_HEADER {
        return Err(CliError::parse(
            path,
            line_no,
            format!("expected header `{MM_HEADER}`"),
        ));
    }

    // Skip comment lines, then read the size line.
    let (size_line_no, size_line) = loop {
        let (no, line) = next_line(path, &mut lines)?;
        if !line.starts_with('%') && !line.trim().is_empty() {
            break (no, line);
        }
    };
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::parse(path, size_line_no, format!("bad size line: {e}")))?;
    let [d, n, nnz] = dims[..] else {
        return Err(CliError::parse(path, size_line_no, "size line needs `rows cols nnz`"));
    };

    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut seen = 0usize;
    for (no, line) in lines {
        let line = line.map_err(|e| CliError::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let entry = (|| -> Option<(usize, usize, f64)> {
            let i = parts.next()?.parse::<usize>().ok()?;
            let j = parts.next()?.parse::<usize>().ok()?;
            let v = parts.next()?.parse::<f64>().ok()?;
            Some((i, j, v))
        })()
        .ok_or_else(|| CliError::parse(path, no + 1, "expected `row col value`"))?;
        let (i, j, v) = entry;
        if i < 1 || i > d || j < 1 || j > n {
            return Err(CliError::parse(
                path,
                no + 1,
                format!("index ({i}, {j}) outside {d}x{n}"),
            ));
        }
        seen += 1;
        if v != 0.0 {
            columns[j - 1].push((i - 1, v));
        }
    }
    if seen != nnz {
        return Err(CliError::parse(
            path,
            size_line_no,
            format!("header promises {nnz} entries, file holds {seen}"),
        ));
    }
    for col in &mut columns {
        col.sort_by_key(|&(i, _)| i);
    }
    SparseMatrix::new(d, n, columns)
        .map_err(|e| CliError::parse(path, size_line_no, e.to_string()))
}

fn next_line(
    path: &Path,
    lines: &mut impl Iterator<Item = (usize, std::io::Result<String>)>,
) -> CliResult<(usize, String)> {
    match lines.next() {
        Some((no, Ok(line))) => Ok((no + 1, line)),
        Some((_, Err(e))) => Err(CliError::io(path, e)),
        None => Err(CliError::parse(path, 0, "unexpected end of file")),
    }
}

/// Row-major CSV, one line per row, 17-significant-digit decimals.
pub fn write_dense_csv(path: &Path, m: &DenseMatrix) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for i in 0..m.n_rows() {
        let row: Vec<String> = (0..m.n_cols()).map(|j| fmt_value(m.get(i, j))).collect();
        out.write_all(row.join(",").as_bytes())
            .and_then(|_| out.write_all(b"\n"))
            .map_err(|e| CliError::io(path, e))?;
    }
    out.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_dense_csv(path: &Path) -> CliResult<DenseMatrix> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let reader = BufReader::new(file);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (no, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::parse(path, no + 1, format!("bad number: {e}")))?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(CliError::parse(path, no + 1, "ragged row width"));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::parse(path, 1, "empty matrix file"));
    }
    let n_rows = rows.len();
    let n_cols = rows[0].len();
    let mut m = DenseMatrix::zeros(n_rows, n_cols);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m.set(i, j, v);
        }
    }
    Ok(m)
}

/// One line of space-separated 0-based column indices per vertex.
pub fn write_subsets(path: &Path, subsets: &[Vec<usize>]) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for subset in subsets {
        let line: Vec<String> = subset.iter().map(|i| i.to_string()).collect();
        out.write_all(line.join(" ").as_bytes())
            .and_then(|_| out.write_all(b"\n"))
            .map_err(|e| CliError::io(path, e))?;
    }
    out.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_subsets(path: &Path) -> CliResult<Vec<Vec<usize>>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let reader = BufReader::new(file);
    let mut subsets = Vec::new();
    for (no, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let subset: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::parse(path, no + 1, format!("bad index: {e}")))?;
        subsets.push(subset);
    }
    Ok(subsets)
}

/// Instance metadata persisted next to the matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub model: String,
    pub d: usize,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_words: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adversary: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_measured: Option<f64>,
}

/// Per-run summary persisted with the solver output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMeta {
    pub k: usize,
    pub delta: f64,
    pub seed: u64,
    pub power_iters: usize,
    pub use_exact_svd: bool,
    pub opt_values: Vec<f64>,
    pub duplicate_subsets: bool,
    pub svd_ms: f64,
    pub rounds_ms: f64,
    pub total_ms: f64,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::io(path, std::io::Error::other(e)))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, e.line(), e.to_string()))
}
