//! Matrix ingestion, result serialization and the embedded example
//! fixtures.
//!
//! Readers accept RFC-4180-style CSV (comma by default, optional single
//! header row, LF or CRLF) and MatrixMarket `array` / `coordinate real
//! general` files. Writers emit CSV with Rust's shortest exact float
//! representation, so written matrices read back bit-identical, plus a
//! flat `report.json` with the run metadata.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::analytics::PcaResult;
use crate::error::{Error, Result};
use crate::matrix::{Matrix, Vector};
use crate::solver::{PsvdConfig, SvdResult};

/// Built-in example matrices.
///
/// `Xa`, `Xb` and `Xc` are small academic examples with known spectra
/// (including exact zero singular values for `Xb` and `Xc`); `iris` is the
/// classic 150x4 flower measurement matrix; `digit` is a tiny synthetic
/// 8x8 grayscale glyph for reconstruction demos.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    Xa,
    Xb,
    Xc,
    Iris,
    Digit,
}

impl Fixture {
    pub fn name(&self) -> &'static str {
        match self {
            Fixture::Xa => "Xa",
            Fixture::Xb => "Xb",
            Fixture::Xc => "Xc",
            Fixture::Iris => "iris",
            Fixture::Digit => "digit",
        }
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xa" => Ok(Fixture::Xa),
            "xb" => Ok(Fixture::Xb),
            "xc" => Ok(Fixture::Xc),
            "iris" => Ok(Fixture::Iris),
            "digit" => Ok(Fixture::Digit),
            _ => Err(Error::Config {
                message: format!("unknown fixture '{s}'; expected Xa, Xb, Xc, iris or digit"),
            }),
        }
    }
}

/// Where a matrix comes from.
#[derive(Debug, Clone)]
pub enum MatrixSource {
    Csv { path: PathBuf, has_header: bool, delimiter: char },
    MatrixMarket { path: PathBuf },
    Fixture(Fixture),
}

const XA: [[f64; 3]; 3] = [[1.0, 1.0, 1.0], [0.0, 2.0, 1.0], [1.0, 0.0, 1.0]];

const XB: [[f64; 4]; 5] = [
    [3.0, 1.0, 9.0, 2.0],
    [10.0, 4.0, 8.0, 6.0],
    [7.0, 6.0, 12.0, 1.0],
    [11.0, 2.0, 5.0, 9.0],
    [1.0, 1.0, 1.0, 0.0],
];

const XC: [[f64; 5]; 8] = [
    [22.0, 10.0, 2.0, 3.0, 7.0],
    [14.0, 7.0, 10.0, 0.0, 8.0],
    [-1.0, 13.0, -1.0, -11.0, 3.0],
    [-3.0, -2.0, 13.0, -2.0, 4.0],
    [9.0, 8.0, 1.0, -2.0, 4.0],
    [9.0, 1.0, -7.0, 5.0, -1.0],
    [2.0, -6.0, 6.0, 5.0, 1.0],
    [4.0, 5.0, 0.0, -2.0, 2.0],
];

// A crude ring glyph; low numerical rank makes truncation visible.
const DIGIT: [[f64; 8]; 8] = [
    [0.0, 3.0, 13.0, 16.0, 16.0, 13.0, 3.0, 0.0],
    [3.0, 15.0, 12.0, 5.0, 5.0, 12.0, 15.0, 3.0],
    [12.0, 14.0, 1.0, 0.0, 0.0, 1.0, 14.0, 12.0],
    [14.0, 8.0, 0.0, 0.0, 0.0, 0.0, 8.0, 14.0],
    [14.0, 8.0, 0.0, 0.0, 0.0, 0.0, 8.0, 14.0],
    [12.0, 14.0, 1.0, 0.0, 0.0, 1.0, 14.0, 12.0],
    [3.0, 15.0, 12.0, 5.0, 5.0, 12.0, 15.0, 3.0],
    [0.0, 3.0, 13.0, 16.0, 16.0, 13.0, 3.0, 0.0],
];

const IRIS_CSV: &str = include_str!("../data/iris.csv");
const IRIS_SPECIES: &str = include_str!("../data/iris_species.csv");

/// Returns the requested built-in matrix.
pub fn fixture_matrix(fixture: Fixture) -> Matrix {
    let from_const = |rows: &[&[f64]]| {
        let data: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Matrix::new(rows.len(), rows[0].len(), data).expect("embedded fixture is valid")
    };
    match fixture {
        Fixture::Xa => from_const(&XA.iter().map(|r| r.as_slice()).collect::<Vec<_>>()),
        Fixture::Xb => from_const(&XB.iter().map(|r| r.as_slice()).collect::<Vec<_>>()),
        Fixture::Xc => from_const(&XC.iter().map(|r| r.as_slice()).collect::<Vec<_>>()),
        Fixture::Digit => from_const(&DIGIT.iter().map(|r| r.as_slice()).collect::<Vec<_>>()),
        Fixture::Iris => parse_csv_text(IRIS_CSV, "<embedded iris>", false, ',')
            .expect("embedded iris fixture is valid"),
    }
}

/// Species label for each iris observation, in row order.
pub fn iris_species() -> Vec<&'static str> {
    IRIS_SPECIES.lines().map(|l| l.trim_end_matches('\r')).filter(|l| !l.is_empty()).collect()
}

/// Reads a matrix from the given source.
pub fn read_matrix(src: &MatrixSource) -> Result<Matrix> {
    match src {
        MatrixSource::Fixture(f) => Ok(fixture_matrix(*f)),
        MatrixSource::Csv { path, has_header, delimiter } => {
            let text = read_to_string(path)?;
            parse_csv_text(&text, &path.display().to_string(), *has_header, *delimiter)
        }
        MatrixSource::MatrixMarket { path } => {
            let text = read_to_string(path)?;
            parse_matrix_market(&text, &path.display().to_string())
        }
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}

fn parse_cell(tok: &str, path: &str, line: usize, row: usize, col: usize) -> Result<f64> {
    let v: f64 = tok.trim().parse().map_err(|_| Error::Parse {
        path: path.to_string(),
        line,
        message: format!("cell (row {row}, col {col}) is not numeric: '{}'", tok.trim()),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            path: path.to_string(),
            line,
            message: format!("cell (row {row}, col {col}) is not finite: '{}'", tok.trim()),
        });
    }
    Ok(v)
}

fn parse_csv_text(text: &str, path: &str, has_header: bool, delimiter: char) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    let mut seen_first = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if has_header && !seen_first {
            seen_first = true;
            continue;
        }
        seen_first = true;
        let cells: Vec<&str> = line.split(delimiter).collect();
        match width {
            None => width = Some(cells.len()),
            Some(w) if w != cells.len() => {
                return Err(Error::Parse {
                    path: path.to_string(),
                    line: line_no,
                    message: format!("row has {} cells, expected {}", cells.len(), w),
                });
            }
            _ => {}
        }
        let row_idx = rows.len();
        let mut row = Vec::with_capacity(cells.len());
        for (col, tok) in cells.iter().enumerate() {
            row.push(parse_cell(tok, path, line_no, row_idx, col)?);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse { path: path.to_string(), line: 1, message: "no data rows".into() });
    }
    Matrix::from_rows(&rows)
}

fn parse_matrix_market(text: &str, path: &str) -> Result<Matrix> {
    let fmt_err = |message: String| Error::Format { path: path.to_string(), message };
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| fmt_err("empty file".into()))?;
    let fields: Vec<String> =
        header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(fmt_err(
            "header must be '%%MatrixMarket matrix <array|coordinate> real general'".into(),
        ));
    }
    let layout = fields[2].as_str();
    if layout != "array" && layout != "coordinate" {
        return Err(fmt_err(format!("unsupported layout '{}'", fields[2])));
    }
    if fields[3] != "real" || fields[4] != "general" {
        return Err(fmt_err(format!(
            "unsupported qualifier '{} {}'; only 'real general' is handled",
            fields[3], fields[4]
        )));
    }

    let mut data_lines = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });

    let (size_line_no, size_line) =
        data_lines.next().ok_or_else(|| fmt_err("missing size line".into()))?;
    let dims: Vec<&str> = size_line.split_whitespace().collect();
    let expected_dims = if layout == "array" { 2 } else { 3 };
    if dims.len() != expected_dims {
        return Err(Error::Parse {
            path: path.to_string(),
            line: size_line_no + 1,
            message: format!("size line needs {expected_dims} integers"),
        });
    }
    let parse_dim = |tok: &str, what: &str| -> Result<usize> {
        tok.parse().map_err(|_| Error::Parse {
            path: path.to_string(),
            line: size_line_no + 1,
            message: format!("invalid {what}: '{tok}'"),
        })
    };
    let m = parse_dim(dims[0], "row count")?;
    let n = parse_dim(dims[1], "column count")?;
    if m == 0 || n == 0 {
        return Err(fmt_err("matrix dimensions must be at least 1x1".into()));
    }

    if layout == "array" {
        // Array values are listed in column-major order.
        let mut data = vec![0.0; m * n];
        let mut count = 0usize;
        for (idx, line) in data_lines {
            for tok in line.split_whitespace() {
                if count >= m * n {
                    return Err(Error::Parse {
                        path: path.to_string(),
                        line: idx + 1,
                        message: format!("more than {} values in array data", m * n),
                    });
                }
                let v = parse_cell(tok, path, idx + 1, count % m, count / m)?;
                let (i, j) = (count % m, count / m);
                data[i * n + j] = v;
                count += 1;
            }
        }
        if count != m * n {
            return Err(fmt_err(format!("expected {} array values, found {count}", m * n)));
        }
        Matrix::new(m, n, data)
    } else {
        let nnz = parse_dim(dims[2], "entry count")?;
        let mut data = vec![0.0; m * n];
        let mut seen = 0usize;
        for (idx, line) in data_lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::Parse {
                    path: path.to_string(),
                    line: idx + 1,
                    message: "coordinate entries need 'row col value'".into(),
                });
            }
            let i = parse_dim(toks[0], "row index")?;
            let j = parse_dim(toks[1], "column index")?;
            if i == 0 || i > m || j == 0 || j > n {
                return Err(Error::Parse {
                    path: path.to_string(),
                    line: idx + 1,
                    message: format!("index ({i}, {j}) outside a {m}x{n} matrix (1-based)"),
                });
            }
            let v = parse_cell(toks[2], path, idx + 1, i - 1, j - 1)?;
            data[(i - 1) * n + (j - 1)] = v;
            seen += 1;
        }
        if seen != nnz {
            return Err(fmt_err(format!("expected {nnz} coordinate entries, found {seen}")));
        }
        Matrix::new(m, n, data)
    }
}

fn fmt_value(v: f64) -> String {
    // Shortest decimal that parses back to the identical f64.
    format!("{v}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}

/// Writes a matrix as CSV, one row per line.
pub fn write_matrix_csv(m: &Matrix, path: &Path) -> Result<()> {
    let mut out = String::new();
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|&v| fmt_value(v)).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    write_file(path, &out)
}

fn write_vector_csv(v: &Vector, path: &Path) -> Result<()> {
    let mut out = String::new();
    for &x in v.iter() {
        let _ = writeln!(out, "{}", fmt_value(x));
    }
    write_file(path, &out)
}

#[derive(Serialize)]
struct ReportFile {
    iterations: usize,
    final_delta: f64,
    converged: bool,
    numerical_rank: usize,
    seed: u64,
    q: usize,
    eta: f64,
    eps: f64,
    elapsed_ms: u64,
}

fn write_report(
    res: &crate::solver::RunReport,
    cfg: &PsvdConfig,
    elapsed_ms: u64,
    path: &Path,
) -> Result<()> {
    let report = ReportFile {
        iterations: res.iterations,
        final_delta: res.final_delta,
        converged: res.converged,
        numerical_rank: res.numerical_rank,
        seed: cfg.seed,
        q: cfg.power,
        eta: cfg.eta,
        eps: cfg.eps,
        elapsed_ms,
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Format { path: path.display().to_string(), message: e.to_string() })?;
    write_file(path, &(json + "\n"))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.display().to_string(), source: e })
}

/// Writes `d.csv`, `U.csv`, `W.csv` and `report.json` into `dir` and
/// returns the paths written.
pub fn write_svd_result(
    res: &SvdResult,
    cfg: &PsvdConfig,
    elapsed_ms: u64,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut written = Vec::new();

    let d_path = dir.join("d.csv");
    write_vector_csv(&res.d, &d_path)?;
    written.push(d_path);

    let u_path = dir.join("U.csv");
    write_matrix_csv(&res.u, &u_path)?;
    written.push(u_path);

    let w_path = dir.join("W.csv");
    write_matrix_csv(&res.w, &w_path)?;
    written.push(w_path);

    let report_path = dir.join("report.json");
    write_report(&res.report, cfg, elapsed_ms, &report_path)?;
    written.push(report_path);

    Ok(written)
}

/// Writes `eigenvalues.csv`, `explained.csv`, `axes.csv`, `scores.csv`,
/// `attribute_coords.csv` (when present) and `report.json` into `dir`.
pub fn write_pca_result(
    res: &PcaResult,
    cfg: &PsvdConfig,
    elapsed_ms: u64,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut written = Vec::new();

    let path = dir.join("eigenvalues.csv");
    write_vector_csv(&res.eigenvalues, &path)?;
    written.push(path);

    let path = dir.join("explained.csv");
    write_vector_csv(&res.explained, &path)?;
    written.push(path);

    let path = dir.join("axes.csv");
    write_matrix_csv(&res.axes, &path)?;
    written.push(path);

    let path = dir.join("scores.csv");
    write_matrix_csv(&res.scores, &path)?;
    written.push(path);

    if let Some(coords) = &res.attribute_coords {
        let path = dir.join("attribute_coords.csv");
        write_matrix_csv(coords, &path)?;
        written.push(path);
    }

    let report_path = dir.join("report.json");
    write_report(&res.report, cfg, elapsed_ms, &report_path)?;
    written.push(report_path);

    Ok(written)
}
