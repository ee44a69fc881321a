//! Matrix file ingestion (Matrix Market or CSV) and matrix output.

pub mod mtx;

use std::fs;
use std::path::Path;

use gcurkit::DenseMatrix;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    MatrixMarket,
    Csv,
}

impl MatrixFormat {
    /// By extension (`.mtx`, `.mm`, `.csv`), else by the Matrix Market banner.
    pub fn detect(path: &Path, text: &str) -> Self {
        match path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()) {
            Some(e) if e == "mtx" || e == "mm" => MatrixFormat::MatrixMarket,
            Some(e) if e == "csv" => MatrixFormat::Csv,
            _ if text.trim_start().to_ascii_lowercase().starts_with("%%matrixmarket") => MatrixFormat::MatrixMarket,
            _ => MatrixFormat::Csv,
        }
    }
}

pub fn read_matrix(path: &Path, csv_header: bool) -> CliResult<DenseMatrix> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    match MatrixFormat::detect(path, &text) {
        MatrixFormat::MatrixMarket => mtx::parse(&text, path),
        MatrixFormat::Csv => parse_csv(&text, path, csv_header),
    }
}

/// Comma-separated numbers, one matrix row per record.
pub fn parse_csv(text: &str, path: &Path, header: bool) -> CliResult<DenseMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            CliError::parse(path, line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let row = record
            .iter()
            .map(|tok| match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(CliError::parse(path, line, format!("invalid value '{tok}'"))),
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() || rows[0].is_empty() {
        return Err(CliError::parse(path, 1, "no data rows"));
    }
    DenseMatrix::from_rows(&rows).map_err(|e| CliError::parse(path, 1, e.to_string()))
}

pub fn write_matrix(path: &Path, m: &DenseMatrix) -> CliResult<()> {
    fs::write(path, mtx::to_string(m)).map_err(|e| CliError::io(path, e))
}
