//! Benchmark harness: timed satisfiability runs aggregated into CSV rows.
//!
//! Each case runs once untimed as warm-up, then `repeats` timed runs on one
//! thread with a monotonic clock. A single timeout marks the whole row with
//! the -1 convention. Everything except the millisecond columns is
//! deterministic across runs.

use crate::suite::CuratedCase;
use fxsat::{is_satisfiable, Algorithm, Mode, Verdict};
use std::time::Duration;

/// One aggregated result row.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub name: String,
    /// "TRUE", "FALSE", or "TIMEOUT".
    pub satisfiable: String,
    /// Solutions found; -1 on timeout.
    pub found: i64,
    pub family: char,
    pub size: usize,
    pub ms_avg: f64,
    pub ms_std: f64,
    pub tested_avg: f64,
    pub tested_std: f64,
}

pub const CSV_HEADER: &str = "name,satisfiable,found,type,size,ms_avg,ms_std,tested_avg,tested_std";

impl BenchRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{:.1},{:.1},{:.1},{:.1}",
            self.name,
            self.satisfiable,
            self.found,
            self.family,
            self.size,
            self.ms_avg,
            self.ms_std,
            self.tested_avg,
            self.tested_std
        )
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    (mean, var.sqrt())
}

/// Runs every case `repeats` times and aggregates wall-clock and tested
/// counts. Timeouts are data, not errors.
pub fn run_benchmark(
    cases: &[CuratedCase],
    algorithm: Algorithm,
    mode: Mode,
    repeats: usize,
    timeout: Duration,
) -> Vec<BenchRow> {
    cases
        .iter()
        .map(|case| {
            // Warm-up, excluded from the aggregates.
            let _ = is_satisfiable(&case.bgp, algorithm, mode, timeout);

            let mut millis = Vec::with_capacity(repeats);
            let mut tested = Vec::with_capacity(repeats);
            let mut found: i64 = 0;
            let mut verdict = Verdict::Unsatisfiable;
            let mut timed_out = false;
            for _ in 0..repeats.max(1) {
                let report = is_satisfiable(&case.bgp, algorithm, mode, timeout);
                millis.push(report.elapsed.as_secs_f64() * 1e3);
                tested.push(report.tested as f64);
                verdict = report.verdict;
                found = report.solutions.len() as i64;
                if report.verdict == Verdict::Timeout {
                    timed_out = true;
                    break;
                }
            }

            if timed_out {
                BenchRow {
                    name: case.label.to_string(),
                    satisfiable: "TIMEOUT".to_string(),
                    found: -1,
                    family: case.family(),
                    size: case.size(),
                    ms_avg: -1.0,
                    ms_std: 0.0,
                    tested_avg: -1.0,
                    tested_std: 0.0,
                }
            } else {
                let (ms_avg, ms_std) = mean_std(&millis);
                let (tested_avg, tested_std) = mean_std(&tested);
                BenchRow {
                    name: case.label.to_string(),
                    satisfiable: match verdict {
                        Verdict::Satisfiable => "TRUE".to_string(),
                        Verdict::Unsatisfiable => "FALSE".to_string(),
                        Verdict::Timeout => "TIMEOUT".to_string(),
                    },
                    found,
                    family: case.family(),
                    size: case.size(),
                    ms_avg,
                    ms_std,
                    tested_avg,
                    tested_std,
                }
            }
        })
        .collect()
}

pub fn render_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}
