//! `verify`: run the aggregated check matrix, print one line per report,
//! and write `suite.json`. Exit code 0 only when every check passes.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use dressing_core::report::ResidualReport;

use crate::commands::construct::GridEcho;
use crate::config::Validated;
use crate::emit::write_json;
use crate::error::CliResult;
use crate::suite::run_suite;

// wall time and thread count are printed to stdout only: suite.json is
// byte-identical between runs with the same configuration
#[derive(Serialize)]
struct SuiteReport {
    config_hash: String,
    grid: GridEcho,
    suite_filter: String,
    perturbation: f64,
    report_count: usize,
    overall_pass: bool,
    reports: Vec<ResidualReport>,
}

pub fn run(
    cfg: &Validated,
    out: &Path,
    filter: Option<&str>,
    perturb: Option<f64>,
) -> CliResult<bool> {
    let started = Instant::now();
    let run = run_suite(cfg, filter, perturb)?;
    for r in &run.reports {
        println!(
            "{} {:<64} max {:.3e}  (tol {:.1e})",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.max_abs,
            r.tolerance
        );
    }
    let passed = run.reports.iter().filter(|r| r.pass).count();
    println!(
        "{}/{} checks passed in {:.2} s on {} thread(s)",
        passed,
        run.reports.len(),
        started.elapsed().as_secs_f64(),
        rayon::current_num_threads()
    );

    let report = SuiteReport {
        config_hash: cfg.config_hash.clone(),
        grid: GridEcho {
            x_min: cfg.grid.x_min(),
            x_max: cfg.grid.x_max(),
            n: cfg.grid.len(),
        },
        suite_filter: filter.unwrap_or("all").to_string(),
        perturbation: perturb.unwrap_or(0.0),
        report_count: run.reports.len(),
        overall_pass: run.all_pass,
        reports: run.reports,
    };
    write_json(&out.join("suite.json"), &report)?;
    Ok(run.all_pass)
}
