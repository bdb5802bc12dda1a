//! Batch runner for the splitlab checks: configuration, suites and reports.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{ConfigError, RunConfig};
pub use report::Report;
pub use suites::{run_all, run_suite, Check, Suite};

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const RUNTIME: i32 = 3;
}

/// Runs `cfg` and assembles the report.
pub fn run(cfg: &RunConfig) -> Report {
    let (checks, timings) = run_all(cfg);
    let timings = timings.into_iter().map(|(s, t)| (s.name().to_string(), t)).collect();
    Report::new(cfg.clone(), checks, timings)
}

/// Exit code for a finished report: evaluation errors outrank failures.
pub fn exit_code(report: &Report) -> i32 {
    if report.summary.errors > 0 {
        exit::RUNTIME
    } else if report.all_pass() {
        exit::PASS
    } else {
        exit::CHECK_FAILED
    }
}
