//! Matrix Market reader and writer (`array` and `coordinate`, real data).

use std::fmt::Write as _;
use std::path::Path;

use gcurkit::DenseMatrix;

use crate::error::{CliError, CliResult};

pub const ARRAY_HEADER: &str = "%%MatrixMarket matrix array real general";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

struct Lines<'a> {
    path: &'a Path,
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next line that is neither blank nor a comment, with its 1-based number.
    fn next_data(&mut self) -> Option<(usize, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let t = line.trim();
            if !t.is_empty() && !t.starts_with('%') {
                return Some((i + 1, t));
            }
        }
        None
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> CliError {
        CliError::parse(self.path, line, msg)
    }
}

fn parse_usize(lines: &Lines, line: usize, tok: &str, what: &str) -> CliResult<usize> {
    tok.parse()
        .map_err(|_| lines.err(line, format!("invalid {what} '{tok}'")))
}

fn parse_value(lines: &Lines, line: usize, tok: &str) -> CliResult<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| lines.err(line, format!("invalid value '{tok}'")))?;
    if !v.is_finite() {
        return Err(lines.err(line, format!("non-finite value '{tok}'")));
    }
    Ok(v)
}

fn parse_header(path: &Path, first: Option<&str>) -> CliResult<(Layout, Symmetry)> {
    let line = first.ok_or_else(|| CliError::parse(path, 1, "empty file"))?;
    let toks: Vec<String> = line.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
        return Err(CliError::parse(path, 1, format!("not a Matrix Market matrix header: '{}'", line.trim())));
    }
    let layout = match toks[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(CliError::parse(path, 1, format!("unsupported format '{other}'"))),
    };
    match toks[3].as_str() {
        "real" | "double" | "integer" => {}
        other => return Err(CliError::parse(path, 1, format!("unsupported field '{other}'"))),
    }
    let symmetry = match toks[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(CliError::parse(path, 1, format!("unsupported symmetry '{other}'"))),
    };
    Ok((layout, symmetry))
}

/// Parses Matrix Market text; `path` is used in diagnostics only.
pub fn parse(text: &str, path: &Path) -> CliResult<DenseMatrix> {
    let (layout, symmetry) = parse_header(path, text.lines().next())?;
    let mut lines = Lines {
        path,
        inner: text.lines().enumerate(),
        last: 1,
    };
    lines.inner.next();
    let (size_line, size) = lines
        .next_data()
        .ok_or_else(|| lines.err(lines.last, "missing size line"))?;
    let toks: Vec<&str> = size.split_whitespace().collect();
    let want = if layout == Layout::Array { 2 } else { 3 };
    if toks.len() != want {
        return Err(lines.err(size_line, format!("expected {want} integers on the size line, found '{size}'")));
    }
    let rows = parse_usize(&lines, size_line, toks[0], "row count")?;
    let cols = parse_usize(&lines, size_line, toks[1], "column count")?;
    if rows == 0 || cols == 0 {
        return Err(lines.err(size_line, format!("dimensions must be positive, got {rows}x{cols}")));
    }
    if symmetry != Symmetry::General && rows != cols {
        return Err(lines.err(size_line, "symmetric storage needs a square matrix"));
    }
    let mut m = DenseMatrix::zeros(rows, cols);
    let mirror = |m: &mut DenseMatrix, i: usize, j: usize, v: f64| match symmetry {
        Symmetry::General => {}
        Symmetry::Symmetric if i != j => m[(j, i)] = v,
        Symmetry::SkewSymmetric if i != j => m[(j, i)] = -v,
        _ => {}
    };
    match layout {
        Layout::Array => {
            // column-major; symmetric storage lists the lower triangle only
            let slots: Vec<(usize, usize)> = (0..cols)
                .flat_map(|j| {
                    let start = match symmetry {
                        Symmetry::General => 0,
                        Symmetry::Symmetric => j,
                        Symmetry::SkewSymmetric => j + 1,
                    };
                    (start..rows).map(move |i| (i, j))
                })
                .collect();
            let mut next = slots.iter();
            while let Some((line, data)) = lines.next_data() {
                for tok in data.split_whitespace() {
                    let &(i, j) = next
                        .next()
                        .ok_or_else(|| lines.err(line, format!("unexpected extra value '{tok}'")))?;
                    let v = parse_value(&lines, line, tok)?;
                    m[(i, j)] = v;
                    mirror(&mut m, i, j, v);
                }
            }
            let missing = next.len();
            if missing > 0 {
                return Err(lines.err(lines.last, format!("{missing} values missing")));
            }
        }
        Layout::Coordinate => {
            let nnz = parse_usize(&lines, size_line, toks[2], "entry count")?;
            let mut seen = 0;
            while let Some((line, data)) = lines.next_data() {
                let t: Vec<&str> = data.split_whitespace().collect();
                if t.len() != 3 {
                    return Err(lines.err(line, format!("expected 'row col value', found '{data}'")));
                }
                let i = parse_usize(&lines, line, t[0], "row index")?;
                let j = parse_usize(&lines, line, t[1], "column index")?;
                if i == 0 || i > rows || j == 0 || j > cols {
                    return Err(lines.err(line, format!("index ({i}, {j}) outside {rows}x{cols}")));
                }
                let v = parse_value(&lines, line, t[2])?;
                m[(i - 1, j - 1)] += v;
                let sum = m[(i - 1, j - 1)];
                mirror(&mut m, i - 1, j - 1, sum);
                seen += 1;
                if seen > nnz {
                    return Err(lines.err(line, format!("more than the declared {nnz} entries")));
                }
            }
            if seen < nnz {
                return Err(lines.err(lines.last, format!("declared {nnz} entries, found {seen}")));
            }
        }
    }
    Ok(m)
}

/// Array format, column-major, 17 significant digits per value.
pub fn to_string(m: &DenseMatrix) -> String {
    let mut out = String::with_capacity(24 * m.rows() * m.cols() + 64);
    out.push_str(ARRAY_HEADER);
    out.push('\n');
    let _ = writeln!(out, "{} {}", m.rows(), m.cols());
    for v in m.as_slice() {
        let _ = writeln!(out, "{v:.16e}");
    }
    out
}
