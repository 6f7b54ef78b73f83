//! `evolve`: reconstruct the dressed system along the requested times and
//! verify the evolution identities at each snapshot.

use std::path::{Path, PathBuf};

use serde::Serialize;

use dressing_core::dressing::seed_set;
use dressing_core::evolution::{
    b1_check, du_dt_rhs, kdv_residual, psisq_identity_residual, snapshot, snapshot_triple,
    sum_rule, u_time_derivative_fd, AlphaSchedule, FD_TIME_STEP,
};
use dressing_core::report::ResidualReport;

use crate::config::Validated;
use crate::emit::{write_csv, write_json};
use crate::error::{CliError, CliResult};

#[derive(Serialize)]
struct TimeBlock {
    t: f64,
    evolution_law: ResidualReport,
    sum_rule_lhs: f64,
    sum_rule_rhs: f64,
    sum_rule: ResidualReport,
    density_identities: Vec<ResidualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kdv: Option<ResidualReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    lax_pair: Vec<ResidualReport>,
}

#[derive(Serialize)]
struct EvolveReport {
    config_hash: String,
    schedule: String,
    times: Vec<f64>,
    blocks: Vec<TimeBlock>,
    overall_pass: bool,
}

pub fn run(cfg: &Validated, out: &Path) -> CliResult<Vec<PathBuf>> {
    let sched = cfg
        .schedule
        .as_ref()
        .ok_or_else(|| CliError::config("evolve requires a schedule"))?;
    let times = cfg
        .times
        .as_ref()
        .filter(|t| !t.is_empty())
        .ok_or_else(|| CliError::config("evolve requires a non-empty times list"))?;

    let grid = cfg.grid;
    let seeds0 = seed_set(&cfg.u0, &cfg.states)?;
    let is_kdv_setting = matches!(sched, AlphaSchedule::LaxPower { .. }) && cfg.u0.is_zero();

    let mut written = Vec::new();
    let mut blocks = Vec::with_capacity(times.len());
    for &t in times {
        let s = snapshot(&cfg.u0, &seeds0, sched, t)?;
        let path = out.join(format!("potential_t{t}.csv"));
        write_csv(
            &path,
            &["x", "un"],
            (0..grid.len()).map(|i| vec![grid.node(i), s.dressed.u_n().samples().value(i)]),
        )?;
        written.push(path);

        let rhs = du_dt_rhs(&s)?;
        let fd = u_time_derivative_fd(&s, FD_TIME_STEP)?;
        let resid = rhs.zip_with(&fd, |a, b| a - b)?;
        let evolution_law =
            ResidualReport::from_interior(format!("evolution-law[t={t}]"), &resid, 1e-4);
        let (lhs, rv) = sum_rule(&s)?;
        let sum_rule_report =
            ResidualReport::from_scalar(format!("sum-rule[t={t}]"), lhs - rv, 1e-4);
        let mut density = Vec::new();
        for k in 0..s.dressed.n_states() {
            let mut r = psisq_identity_residual(&s, k)?;
            r.name = format!("density-identity[t={t} state {k}]");
            density.push(r);
        }

        let (kdv, lax_pair) = if is_kdv_setting {
            let snaps = snapshot_triple(&cfg.u0, &seeds0, sched, t, FD_TIME_STEP)?;
            let mut kr = kdv_residual(&snaps)?;
            kr.name = format!("kdv-residual[t={t}]");
            let mut pairs = Vec::new();
            for k in 0..s.dressed.n_states() {
                let mut b = b1_check(&snaps, k)?;
                b.name = format!("lax-pair-consistency[t={t} state {k}]");
                pairs.push(b);
            }
            (Some(kr), pairs)
        } else {
            (None, Vec::new())
        };

        blocks.push(TimeBlock {
            t,
            evolution_law,
            sum_rule_lhs: lhs,
            sum_rule_rhs: rv,
            sum_rule: sum_rule_report,
            density_identities: density,
            kdv,
            lax_pair,
        });
    }

    let overall_pass = blocks.iter().all(|b| {
        b.evolution_law.pass
            && b.sum_rule.pass
            && b.density_identities.iter().all(|r| r.pass)
            && b.kdv.as_ref().is_none_or(|r| r.pass)
            && b.lax_pair.iter().all(|r| r.pass)
    });
    let report = EvolveReport {
        config_hash: cfg.config_hash.clone(),
        schedule: sched.kind_name().to_string(),
        times: times.clone(),
        blocks,
        overall_pass,
    };
    write_json(&out.join("evolution_report.json"), &report)?;
    Ok(written)
}
