//! Shared helpers for the acceptance suite in `tests/acceptance.rs`.

use std::io::Write;
use std::path::Path;

use gcurkit_cli::report::ExperimentReport;

/// Writes `criterion N title ... PASS|FAIL (detail)` straight to stderr, so
/// the line shows even under test output capture, then asserts `pass`.
pub fn verdict(n: u32, title: &str, pass: bool, detail: &str) {
    let line = format!(
        "criterion {n:>2} {title} ... {} ({detail})\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {n} failed: {detail}");
}

/// `|value − target| ≤ rel·target`.
pub fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target
}

/// Mean of a report cell; panics if the cell is missing or any trial failed.
pub fn mean(report: &ExperimentReport, method: &str, k: usize, eps: Option<f64>, metric: &str) -> f64 {
    let c = report
        .cell(method, Some(k), eps, metric)
        .unwrap_or_else(|| panic!("missing cell {method} k={k} eps={eps:?} {metric}"));
    assert_eq!(c.failures, 0, "{method}: {:?}", c.errors);
    c.mean
}

/// Smallest relative gap among the leading `k + 1` values (sorted descending).
pub fn leading_gap(values: &[f64], k: usize) -> f64 {
    values[..=k]
        .windows(2)
        .map(|w| (w[0] - w[1]) / w[0])
        .fold(f64::INFINITY, f64::min)
}

/// Runs the CLI in-process with `GCURKIT_THREADS = threads`, sending the
/// report to `out`, and returns the exit code and the report bytes.
///
/// Sets a process-wide environment variable; callers must not run
/// concurrently with each other.
pub fn run_cli(args: &[&str], threads: usize, out: &Path) -> (i32, Vec<u8>) {
    std::env::set_var(gcurkit_cli::THREADS_ENV, threads.to_string());
    let mut full = vec!["gcurkit"];
    full.extend_from_slice(args);
    let out_str = out.to_str().expect("utf-8 path");
    full.extend_from_slice(&["--out", out_str]);
    let code = gcurkit_cli::run(full);
    std::env::remove_var(gcurkit_cli::THREADS_ENV);
    (code, std::fs::read(out).unwrap_or_default())
}
