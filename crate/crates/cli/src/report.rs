//! Versioned experiment reports and JSON/CSV emission.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;
pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Distinct failure messages kept per cell.
const MAX_ERRORS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub library_version: &'static str,
    pub experiment: String,
    /// Seconds since the Unix epoch; omitted with `--no-timestamp`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub parameters: Value,
    pub cells: Vec<Cell>,
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub extras: serde_json::Map<String, Value>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, parameters: Value, timestamp: bool) -> Self {
        ExperimentReport {
            schema_version: SCHEMA_VERSION,
            library_version: LIBRARY_VERSION,
            experiment: experiment.to_string(),
            timestamp: timestamp.then(unix_now),
            parameters,
            cells: Vec::new(),
            extras: serde_json::Map::new(),
        }
    }

    pub fn cell(&self, method: &str, k: Option<usize>, epsilon: Option<f64>, metric: &str) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.k == k && c.epsilon == epsilon && c.metric == metric)
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let enc = |e: csv::Error| CliError::Encode(e.to_string());
        w.write_record([
            "experiment",
            "method",
            "k",
            "epsilon",
            "metric",
            "trials",
            "failures",
            "mean",
            "std_dev",
            "wall_clock_ms",
        ])
        .map_err(enc)?;
        let opt = |v: Option<String>| v.unwrap_or_default();
        for c in &self.cells {
            w.write_record([
                self.experiment.clone(),
                c.method.clone(),
                opt(c.k.map(|k| k.to_string())),
                opt(c.epsilon.map(|e| e.to_string())),
                c.metric.clone(),
                c.trials.to_string(),
                c.failures.to_string(),
                c.mean.to_string(),
                c.std_dev.to_string(),
                opt(c.wall_clock_ms.map(|t| t.to_string())),
            ])
            .map_err(enc)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Encode(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Encode(e.to_string()))
    }

    pub fn render(&self, format: Format) -> CliResult<String> {
        match format {
            Format::Json => to_json(self),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Mean and standard deviation of one metric over the trials of one grid cell.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Cell {
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub metric: String,
    /// Trials that completed.
    pub trials: usize,
    pub failures: usize,
    pub mean: f64,
    pub std_dev: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<f64>,
}

impl Cell {
    /// Summarizes per-trial outcomes, given in trial order.
    pub fn from_outcomes(
        method: &str,
        k: Option<usize>,
        epsilon: Option<f64>,
        metric: &str,
        outcomes: &[Result<f64, String>],
    ) -> Self {
        let values: Vec<f64> = outcomes.iter().filter_map(|o| o.as_ref().ok().copied()).collect();
        let mut errors: Vec<String> = Vec::new();
        for e in outcomes.iter().filter_map(|o| o.as_ref().err()) {
            if errors.len() < MAX_ERRORS && !errors.contains(e) {
                errors.push(e.clone());
            }
        }
        let (mean, std_dev) = mean_std(&values);
        Cell {
            method: method.to_string(),
            k,
            epsilon,
            metric: metric.to_string(),
            trials: values.len(),
            failures: outcomes.len() - values.len(),
            mean,
            std_dev,
            errors,
            wall_clock_ms: None,
        }
    }
}

/// Mean and sample standard deviation, summed in the given order.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Encode(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// `field,value` lines for a JSON object, nested keys joined with `.`,
/// array entries indexed from 0.
pub fn flatten_csv(value: &Value) -> CliResult<String> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let key = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}.{k}")
            }
        };
        match v {
            Value::Object(map) => map.iter().for_each(|(k, v)| walk(&key(k), v, out)),
            Value::Array(items) => items
                .iter()
                .enumerate()
                .for_each(|(i, v)| walk(&key(&i.to_string()), v, out)),
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            Value::Null => out.push((prefix.to_string(), String::new())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut rows = Vec::new();
    walk("", value, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    let enc = |e: csv::Error| CliError::Encode(e.to_string());
    w.write_record(["field", "value"]).map_err(enc)?;
    for (k, v) in rows {
        w.write_record([k, v]).map_err(enc)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Encode(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Encode(e.to_string()))
}

pub fn render_value<T: Serialize>(value: &T, format: Format) -> CliResult<String> {
    match format {
        Format::Json => to_json(value),
        Format::Csv => flatten_csv(&serde_json::to_value(value).map_err(|e| CliError::Encode(e.to_string()))?),
    }
}

/// Writes to `out`, or to standard output.
pub fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}
