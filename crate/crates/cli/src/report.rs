use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::config::RunConfig;
use crate::suites::Check;

pub const SCHEMA_VERSION: u32 = 1;

/// Column order of the convergence CSV.
pub const CSV_HEADER: &str = "check,nr,nt,np,residual,order";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    /// Checks whose evaluation raised an error instead of a number.
    pub errors: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    /// Wall seconds per suite; absent in normalized output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
    pub summary: Summary,
}

impl Report {
    pub fn new(config: RunConfig, checks: Vec<Check>, timings: BTreeMap<String, f64>) -> Self {
        let errors = checks.iter().filter(|c| c.error.is_some()).count();
        let passed = checks.iter().filter(|c| c.pass).count();
        let summary = Summary { total: checks.len(), passed, failed: checks.len() - passed, errors };
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            checks,
            timings: Some(timings),
            summary,
        }
    }

    /// Drops timings and output paths, which vary between runs of the same
    /// configuration.
    pub fn normalized(mut self) -> Self {
        self.timings = None;
        self.config.output = Default::default();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    /// One row per check and rung. Checks without a ladder get one row with
    /// empty grid columns; `order` is the local estimate from the previous
    /// rung.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for c in &self.checks {
            if c.rungs.is_empty() {
                let v = c.measured.map(|v| format!("{v:e}")).unwrap_or_default();
                let _ = writeln!(out, "{},,,,{v},", c.name);
                continue;
            }
            for (i, r) in c.rungs.iter().enumerate() {
                let order = if i == 0 {
                    String::new()
                } else {
                    crate::suites::order_estimate(&c.rungs[i - 1..=i]).map(|p| format!("{p:.3}")).unwrap_or_default()
                };
                let [nr, nt, np] = r.grid;
                let _ = writeln!(out, "{},{nr},{nt},{np},{:e},{order}", c.name, r.residual);
            }
        }
        out
    }

    /// Human-readable lines, one per check.
    pub fn text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            let value = match (&c.measured, &c.error) {
                (_, Some(e)) => format!("error: {e}"),
                (Some(v), None) => format!("{v:.3e}"),
                (None, None) => "-".into(),
            };
            let order = c.order.map(|p| format!(" order {p:.2}")).unwrap_or_default();
            let _ = writeln!(out, "{status} {:<52} {value} (tol {:.1e}){order}", c.name, c.tolerance);
        }
        let s = &self.summary;
        let _ = writeln!(out, "{} checks, {} passed, {} failed, {} errors", s.total, s.passed, s.failed, s.errors);
        out
    }
}
