//! `construct`: build the dressed system and emit the potential, states,
//! matrix-field diagnostics and a machine-readable report.

use std::path::{Path, PathBuf};

use serde::Serialize;

use dressing_core::dressing::{
    dress, kernel_diagonal_slope_residual, kernel_reconstruction_residuals,
    potential_route_consistency, seed_set, wronskian_diagnostics,
};
use dressing_core::report::ResidualReport;
use dressing_core::schrodinger::shoot_bound_states;

use crate::config::Validated;
use crate::emit::{write_csv, write_json};
use crate::error::CliResult;

#[derive(Serialize)]
struct StateReport {
    gamma: f64,
    c: f64,
    energy_target: f64,
    energy_shooting: Option<f64>,
    norm_constant: f64,
}

#[derive(Serialize)]
struct ConstructReport {
    config_hash: String,
    grid: GridEcho,
    base_potential: String,
    states: Vec<StateReport>,
    eigenvalues_shooting: Vec<f64>,
    orthonormality: Vec<Vec<f64>>,
    orthonormality_deviation: f64,
    logdet_edge: f64,
    wronskian: Vec<ResidualReport>,
    kernel: Vec<ResidualReport>,
    route_consistency: ResidualReport,
    overall_pass: bool,
}

#[derive(Serialize)]
pub struct GridEcho {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

pub fn run(cfg: &Validated, out: &Path) -> CliResult<Vec<PathBuf>> {
    let grid = cfg.grid;
    let seeds = seed_set(&cfg.u0, &cfg.states)?;
    let d = dress(&cfg.u0, &seeds)?;

    let mut written = Vec::new();

    let potential_csv = out.join("potential.csv");
    write_csv(
        &potential_csv,
        &["x", "u0", "un"],
        (0..grid.len()).map(|i| {
            vec![
                grid.node(i),
                cfg.u0.samples().value(i),
                d.u_n().samples().value(i),
            ]
        }),
    )?;
    written.push(potential_csv);

    let state_names: Vec<String> = (1..=d.n_states()).map(|k| format!("psi_{k}")).collect();
    let mut header = vec!["x".to_string()];
    header.extend(state_names);
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let states_csv = out.join("states.csv");
    write_csv(
        &states_csv,
        &header_refs,
        (0..grid.len()).map(|i| {
            let mut row = vec![grid.node(i)];
            row.extend(d.psis().iter().map(|p| p.value(i)));
            row
        }),
    )?;
    written.push(states_csv);

    let deta_csv = out.join("detA.csv");
    write_csv(
        &deta_csv,
        &["x", "logdet_a", "w"],
        (0..grid.len()).map(|i| vec![grid.node(i), d.logdet_a().value(i), d.w().value(i)]),
    )?;
    written.push(deta_csv);

    // independent spectrum check
    let gamma_max = cfg
        .states
        .iter()
        .map(|s| s.gamma)
        .fold(0.5f64, f64::max)
        + 0.5;
    let found = if d.n_states() > 0 {
        shoot_bound_states(d.u_n(), gamma_max, 1e-9)?
    } else {
        dressing_core::schrodinger::EigenResult {
            energies: vec![],
            gammas: vec![],
        }
    };
    let norm_constants = d.norm_constants();
    let states: Vec<StateReport> = cfg
        .states
        .iter()
        .enumerate()
        .map(|(k, s)| {
            // the shooting result is sorted by energy; match by gamma
            let target = -s.gamma * s.gamma;
            let energy_shooting = found
                .energies
                .iter()
                .cloned()
                .min_by(|a, b| {
                    (a - target)
                        .abs()
                        .partial_cmp(&(b - target).abs())
                        .unwrap()
                });
            StateReport {
                gamma: s.gamma,
                c: s.c,
                energy_target: target,
                energy_shooting,
                norm_constant: norm_constants[k],
            }
        })
        .collect();

    let wronskian = wronskian_diagnostics(&d)?;
    let mut kernel = vec![kernel_diagonal_slope_residual(&d)?];
    kernel.extend(kernel_reconstruction_residuals(&d)?);
    let route = potential_route_consistency(&d)?;
    let overall_pass = wronskian.iter().all(|r| r.pass)
        && kernel.iter().all(|r| r.pass)
        && route.pass
        && found.len() == d.n_states();

    let report = ConstructReport {
        config_hash: cfg.config_hash.clone(),
        grid: GridEcho {
            x_min: grid.x_min(),
            x_max: grid.x_max(),
            n: grid.len(),
        },
        base_potential: cfg.u0.label().to_string(),
        states,
        eigenvalues_shooting: found.energies.clone(),
        orthonormality: d.orthonormality_matrix(),
        orthonormality_deviation: d.orthonormality_deviation(),
        logdet_edge: d.logdet_a().value(grid.len() - 1),
        wronskian,
        kernel,
        route_consistency: route,
        overall_pass,
    };
    write_json(&out.join("report.json"), &report)?;
    Ok(written)
}
