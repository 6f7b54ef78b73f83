//! `greens`: the solution-pair Green's function (for negative energies),
//! the discrete resolvent ladder with its recursion, convolution and
//! evolution checks, and the sum rule.

use std::path::{Path, PathBuf};

use serde::Serialize;

use dressing_core::dressing::{dress, seed_set};
use dressing_core::evolution::AlphaSchedule;
use dressing_core::greens::{
    discrete_g_hierarchy, g_convolution_check, g_recursion_residual, g_sum_rule,
    greens_evolution_check, greens_identity_residual, xi_pair, CONVOLUTION_SIGN,
};
use dressing_core::report::ResidualReport;

use crate::config::Validated;
use crate::emit::{write_csv, write_json};
use crate::error::{CliError, CliResult};

#[derive(Serialize)]
struct PairBlock {
    rho: f64,
    wronskian_spread: f64,
    diagonal_identity: ResidualReport,
}

#[derive(Serialize)]
struct GreensReport {
    config_hash: String,
    e: f64,
    j_max: usize,
    sigma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pair: Option<PairBlock>,
    recursion: Vec<ResidualReport>,
    convolution: Vec<ResidualReport>,
    evolution: Vec<ResidualReport>,
    sum_rule_integral: f64,
    sum_rule_closed_form: f64,
    overall_pass: bool,
}

pub fn run(cfg: &Validated, out: &Path) -> CliResult<Vec<PathBuf>> {
    let Some(AlphaSchedule::Greens { e, order }) = cfg.schedule else {
        return Err(CliError::config(
            "greens requires a schedule of kind `greens` carrying E and j",
        ));
    };
    let grid = cfg.grid;
    let seeds = seed_set(&cfg.u0, &cfg.states)?;
    let d = dress(&cfg.u0, &seeds)?;
    let j_max = order + 1;

    // the solution pair exists below the continuum only
    let pair = if e < 0.0 {
        Some(xi_pair(d.u_n(), e)?)
    } else {
        None
    };
    let h = discrete_g_hierarchy(&d, e, j_max, true)?;

    let mut header = vec!["x".to_string(), "xi1".to_string(), "xi2".to_string(), "g_diag".to_string()];
    for j in 0..=j_max {
        header.push(format!("g{j}_diag"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let path = out.join("greens.csv");
    write_csv(
        &path,
        &header_refs,
        (0..grid.len()).map(|i| {
            let mut row = vec![grid.node(i)];
            match &pair {
                Some(p) => {
                    row.push(p.xi1.value(i));
                    row.push(p.xi2.value(i));
                    row.push(p.diag.value(i));
                }
                None => row.extend([0.0, 0.0, 0.0]),
            }
            for j in 0..=j_max {
                row.push(h.members_diag[j].value(i));
            }
            row
        }),
    )?;

    let pair_block = match &pair {
        Some(p) => Some(PairBlock {
            rho: p.rho,
            wronskian_spread: p.wronskian_spread(),
            diagonal_identity: greens_identity_residual(p, d.u_n())?,
        }),
        None => None,
    };

    let mut recursion = Vec::new();
    for j in 0..j_max {
        recursion.push(g_recursion_residual(&h, d.u_n(), j)?);
    }
    let mut convolution = Vec::new();
    for j in 0..j_max {
        convolution.push(g_convolution_check(&h, j)?);
    }
    let mut evolution = Vec::new();
    if !cfg.states.is_empty() {
        evolution.push(greens_evolution_check(&cfg.u0, &seeds, e, order, 0.0)?);
    }
    let (sum_lhs, sum_rhs) = g_sum_rule(&h)?;

    let overall_pass = pair_block
        .as_ref()
        .is_none_or(|p| p.diagonal_identity.pass && p.wronskian_spread < 1e-6)
        && recursion.iter().all(|r| r.pass)
        && convolution.iter().all(|r| r.pass)
        && evolution.iter().all(|r| r.pass)
        && (sum_lhs - sum_rhs).abs() <= 1e-6;

    let report = GreensReport {
        config_hash: cfg.config_hash.clone(),
        e,
        j_max,
        sigma: CONVOLUTION_SIGN,
        pair: pair_block,
        recursion,
        convolution,
        evolution,
        sum_rule_integral: sum_lhs,
        sum_rule_closed_form: sum_rhs,
        overall_pass,
    };
    write_json(&out.join("greens_report.json"), &report)?;
    Ok(vec![path])
}
